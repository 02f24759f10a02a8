#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gecforge/llm/request.hpp"

namespace gecforge::llm {

using Slots = std::map<std::string, std::string, std::less<>>;

/// `{{name}}` is a required slot. `{{#name}} ... {{/name}}` is emitted only
/// when `name` is supplied and nonempty; slots referenced inside such a
/// section are required only when it is emitted. Values are inserted
/// verbatim and never re-scanned.
class PromptTemplate {
 public:
  /// Throws ConfigError on unbalanced or malformed markup.
  static PromptTemplate parse(std::string_view text);

  /// Throws TemplateError naming the first unfilled required slot.
  std::string render(const Slots& slots) const;

  /// Slots referenced outside any section.
  std::vector<std::string> required_slots() const;

 private:
  struct Node;
  using Nodes = std::vector<Node>;
  struct Node {
    enum class Kind { Text, Slot, Section } kind;
    std::string value;  // literal text or slot name
    Nodes children;     // Section only
  };

  static void render_nodes(const Nodes& nodes, const Slots& slots, std::string& out);

  Nodes nodes_;
};

/// Named templates, their system prompts and demonstrations. Built-in
/// defaults are compiled in; `load(dir)` overlays `<name>.tmpl`,
/// `<name>.system.txt` and `<name>.demos.jsonl` files found in `dir`.
class PromptLibrary {
 public:
  static PromptLibrary builtin();
  static PromptLibrary load(const std::filesystem::path& dir);

  bool has(std::string_view name) const;

  /// Throws ConfigError for an unknown template and TemplateError for a missing slot.
  std::string render(std::string_view name, const Slots& slots) const;
  std::string system_prompt(std::string_view name) const;
  const std::vector<Demonstration>& demonstrations(std::string_view name) const;

  /// SHA-256 over the template, system prompt and demonstrations of `name`.
  std::string fingerprint(std::string_view name) const;

 private:
  struct Entry {
    std::string source;
    PromptTemplate tmpl;
    std::string system;
    std::vector<Demonstration> demos;
  };

  void set_file(const std::string& filename, const std::string& content);
  const Entry& entry(std::string_view name) const;

  std::map<std::string, Entry, std::less<>> entries_;
};

/// Free-function form: renders a template from the built-in library.
std::string render_prompt(std::string_view template_name, const Slots& slots);

}  // namespace gecforge::llm
