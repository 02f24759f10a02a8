#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gecforge {

/// Root of every error the toolkit throws. `category()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { Input, Config, Backend, Internal };

  Error(Category category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class DecodeError : public Error {
 public:
  explicit DecodeError(std::size_t byte_offset)
      : Error(Category::Input, "invalid UTF-8 at byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Malformed input. `line` is 1-based, 0 when the input is not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string text, const std::string& reason)
      : Error(Category::Input, format(line, text, reason)), line_(line), text_(std::move(text)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& text() const noexcept { return text_; }

 private:
  static std::string format(std::size_t line, const std::string& text, const std::string& reason) {
    std::string m = "parse error";
    if (line > 0) m += " at line " + std::to_string(line);
    m += ": " + reason;
    if (!text.empty()) m += " [" + text.substr(0, 200) + "]";
    return m;
  }

  std::size_t line_;
  std::string text_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(const std::string& id)
      : Error(Category::Input, "duplicate sample id: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(Category::Input, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(Category::Input, m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(Category::Config, m) {}
};

/// A value violates a documented type invariant.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& m) : Error(Category::Input, m) {}
};

class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& m) : Error(Category::Input, m) {}
};

class OverlapError : public Error {
 public:
  explicit OverlapError(const std::string& m) : Error(Category::Input, m) {}
};

class GranularityError : public Error {
 public:
  explicit GranularityError(const std::string& m) : Error(Category::Input, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(Category::Input, m) {}
};

class MissingSampleError : public Error {
 public:
  explicit MissingSampleError(std::vector<std::string> ids)
      : Error(Category::Input, format(ids)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  static std::string format(const std::vector<std::string>& ids) {
    std::string m = "predictions reference unknown sample ids:";
    for (const auto& id : ids) m += " " + id;
    return m;
  }
  std::vector<std::string> ids_;
};

class TemplateError : public Error {
 public:
  explicit TemplateError(const std::string& slot)
      : Error(Category::Config, "missing template slot: " + slot), slot_(slot) {}
  const std::string& slot() const noexcept { return slot_; }

 private:
  std::string slot_;
};

class ReplayMissError : public Error {
 public:
  explicit ReplayMissError(const std::string& digest)
      : Error(Category::Backend, "replay cache miss for key " + digest), digest_(digest) {}
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& m) : Error(Category::Backend, m) {}
};

/// Transport failure worth retrying: timeouts, connection resets, 429 and 5xx.
class TransientError : public TransportError {
 public:
  explicit TransientError(const std::string& m) : TransportError(m) {}
};

class RefusalError : public Error {
 public:
  explicit RefusalError(std::string body)
      : Error(Category::Backend, "provider refused the request"), body_(std::move(body)) {}
  const std::string& body() const noexcept { return body_; }

 private:
  std::string body_;
};

/// No JSON value could be extracted from an LLM response.
class ResponseParseError : public ParseError {
 public:
  explicit ResponseParseError(std::string raw)
      : ParseError(0, "", "no JSON value found in response"), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string field, std::string value, std::string raw)
      : Error(Category::Input, "schema violation in field '" + field + "': " + value),
        field_(std::move(field)), value_(std::move(value)), raw_(std::move(raw)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& value() const noexcept { return value_; }
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string field_;
  std::string value_;
  std::string raw_;
};

/// Shared shape of per-sample LLM failures: keeps every raw response for audit.
class SampleFailure : public Error {
 public:
  SampleFailure(const std::string& what, std::string sample_id, std::string reason,
                std::vector<std::string> raw_responses, bool backend_failure)
      : Error(backend_failure ? Category::Backend : Category::Input,
              what + " for sample " + sample_id + ": " + reason),
        sample_id_(std::move(sample_id)), reason_(std::move(reason)),
        raw_responses_(std::move(raw_responses)), backend_failure_(backend_failure) {}

  const std::string& sample_id() const noexcept { return sample_id_; }
  const std::string& reason() const noexcept { return reason_; }
  const std::vector<std::string>& raw_responses() const noexcept { return raw_responses_; }
  bool backend_failure() const noexcept { return backend_failure_; }

 private:
  std::string sample_id_;
  std::string reason_;
  std::vector<std::string> raw_responses_;
  bool backend_failure_;
};

class AnnotationFailed : public SampleFailure {
 public:
  AnnotationFailed(std::string sample_id, std::string reason, std::vector<std::string> raw,
                   bool backend_failure = false)
      : SampleFailure("annotation failed", std::move(sample_id), std::move(reason), std::move(raw),
                      backend_failure) {}
};

class JudgmentFailed : public SampleFailure {
 public:
  JudgmentFailed(std::string sample_id, std::string reason, std::vector<std::string> raw,
                 bool backend_failure = false)
      : SampleFailure("judgment failed", std::move(sample_id), std::move(reason), std::move(raw),
                      backend_failure) {}
};

class CoverageError : public Error {
 public:
  explicit CoverageError(const std::string& m) : Error(Category::Input, m) {}
};

class EncodingError : public Error {
 public:
  explicit EncodingError(const std::string& m) : Error(Category::Input, m) {}
};

}  // namespace gecforge
