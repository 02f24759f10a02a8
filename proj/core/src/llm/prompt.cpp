#include "gecforge/llm/prompt.hpp"

#include <algorithm>
#include <utility>

#include "gecforge/corpus.hpp"
#include "gecforge/errors.hpp"
#include "gecforge/text.hpp"

namespace gecforge::llm {

namespace {

const std::pair<const char*, const char*> kBuiltinFiles[] = {
#include "builtin_prompts.inc"
};

bool valid_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

std::vector<Demonstration> parse_demos(std::string_view content, const std::string& filename) {
  std::vector<Demonstration> demos;
  std::size_t lineno = 0;
  for (std::string_view line : corpus::split_lines(content)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      demos.push_back({j.at("input").get<std::string>(), j.at("output").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(filename + ":" + std::to_string(lineno) + ": bad demonstration: " + e.what());
    }
  }
  return demos;
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text) {
  PromptTemplate t;
  std::vector<Nodes*> stack{&t.nodes_};
  std::vector<std::string> open;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t tag = text.find("{{", pos);
    if (tag == std::string_view::npos) {
      stack.back()->push_back({Node::Kind::Text, std::string(text.substr(pos)), {}});
      break;
    }
    if (tag > pos) stack.back()->push_back({Node::Kind::Text, std::string(text.substr(pos, tag - pos)), {}});
    const std::size_t close = text.find("}}", tag + 2);
    if (close == std::string_view::npos) throw ConfigError("unterminated {{ in template");
    std::string_view body = text.substr(tag + 2, close - tag - 2);
    char sigil = 0;
    if (!body.empty() && (body.front() == '#' || body.front() == '/')) {
      sigil = body.front();
      body.remove_prefix(1);
    }
    if (body.empty()) throw ConfigError("empty {{}} tag in template");
    for (char c : body) {
      if (!valid_name_char(c)) throw ConfigError("bad slot name '" + std::string(body) + "' in template");
    }
    const std::string name(body);
    if (sigil == '#') {
      stack.back()->push_back({Node::Kind::Section, name, {}});
      stack.push_back(&stack.back()->back().children);
      open.push_back(name);
    } else if (sigil == '/') {
      if (open.empty() || open.back() != name) throw ConfigError("unbalanced section close {{/" + name + "}}");
      open.pop_back();
      stack.pop_back();
    } else {
      stack.back()->push_back({Node::Kind::Slot, name, {}});
    }
    pos = close + 2;
  }
  if (!open.empty()) throw ConfigError("unclosed section {{#" + open.back() + "}}");
  return t;
}

void PromptTemplate::render_nodes(const Nodes& nodes, const Slots& slots, std::string& out) {
  for (const Node& n : nodes) {
    switch (n.kind) {
      case Node::Kind::Text:
        out += n.value;
        break;
      case Node::Kind::Slot: {
        const auto it = slots.find(n.value);
        if (it == slots.end()) throw TemplateError(n.value);
        out += it->second;
        break;
      }
      case Node::Kind::Section: {
        const auto it = slots.find(n.value);
        if (it != slots.end() && !it->second.empty()) render_nodes(n.children, slots, out);
        break;
      }
    }
  }
}

std::string PromptTemplate::render(const Slots& slots) const {
  std::string out;
  render_nodes(nodes_, slots, out);
  return out;
}

std::vector<std::string> PromptTemplate::required_slots() const {
  std::vector<std::string> out;
  for (const Node& n : nodes_) {
    if (n.kind == Node::Kind::Slot) out.push_back(n.value);
  }
  return out;
}

// ---------------------------------------------------------------------------

void PromptLibrary::set_file(const std::string& filename, const std::string& content) {
  const auto strip = [&](std::string_view suffix) -> std::string {
    return filename.substr(0, filename.size() - suffix.size());
  };
  if (filename.ends_with(".demos.jsonl")) {
    entries_[strip(".demos.jsonl")].demos = parse_demos(content, filename);
  } else if (filename.ends_with(".system.txt")) {
    std::string system = content;
    while (!system.empty() && (system.back() == '\n' || system.back() == '\r')) system.pop_back();
    entries_[strip(".system.txt")].system = std::move(system);
  } else if (filename.ends_with(".tmpl")) {
    Entry& e = entries_[strip(".tmpl")];
    e.tmpl = PromptTemplate::parse(content);
    e.source = content;
  }
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  for (const auto& [name, body] : kBuiltinFiles) lib.set_file(name, body);
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw ConfigError("prompt directory not found: " + dir.string());
  PromptLibrary lib = builtin();
  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(dir)) {
    if (f.is_regular_file()) files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) lib.set_file(f.filename().string(), corpus::read_file(f));
  return lib;
}

bool PromptLibrary::has(std::string_view name) const {
  const auto it = entries_.find(name);
  return it != entries_.end() && !it->second.source.empty();
}

const PromptLibrary::Entry& PromptLibrary::entry(std::string_view name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end() || it->second.source.empty()) {
    throw ConfigError("unknown prompt template '" + std::string(name) + "'");
  }
  return it->second;
}

std::string PromptLibrary::render(std::string_view name, const Slots& slots) const {
  return entry(name).tmpl.render(slots);
}

std::string PromptLibrary::system_prompt(std::string_view name) const { return entry(name).system; }

const std::vector<Demonstration>& PromptLibrary::demonstrations(std::string_view name) const {
  return entry(name).demos;
}

std::string PromptLibrary::fingerprint(std::string_view name) const {
  const Entry& e = entry(name);
  nlohmann::ordered_json j;
  j["template"] = e.source;
  j["system"] = e.system;
  j["demonstrations"] = nlohmann::ordered_json::array();
  for (const auto& d : e.demos) j["demonstrations"].push_back({{"input", d.input}, {"output", d.output}});
  return sha256_hex(j.dump());
}

std::string render_prompt(std::string_view template_name, const Slots& slots) {
  static const PromptLibrary lib = PromptLibrary::builtin();
  return lib.render(template_name, slots);
}

}  // namespace gecforge::llm
