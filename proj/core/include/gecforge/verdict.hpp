#pragma once

#include <optional>
#include <string_view>

namespace gecforge {

/// Per-edit judgment of the semantic evaluator.
enum class EditVerdict { CorrectEdit, WrongEdit, ReasonableEdit };

constexpr std::string_view to_string(EditVerdict v) noexcept {
  switch (v) {
    case EditVerdict::CorrectEdit:
      return "CorrectEdit";
    case EditVerdict::WrongEdit:
      return "WrongEdit";
    case EditVerdict::ReasonableEdit:
      return "ReasonableEdit";
  }
  return "?";
}

constexpr std::optional<EditVerdict> parse_verdict(std::string_view s) noexcept {
  if (s == "CorrectEdit") return EditVerdict::CorrectEdit;
  if (s == "WrongEdit") return EditVerdict::WrongEdit;
  if (s == "ReasonableEdit") return EditVerdict::ReasonableEdit;
  return std::nullopt;
}

}  // namespace gecforge
