#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mealy {

enum class ErrorKind {
  syntax,
  unknown_state_name,
  letter_out_of_range,
  duplicate_definition,
  missing_definition,
  invalid_state_index,
  alphabet_mismatch,
  invalid_argument,
  subset_blowup,
  no_convergence,
  budget_exceeded,
  state_blowup,
  infinite_costs,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "SyntaxError";
    case ErrorKind::unknown_state_name: return "UnknownStateName";
    case ErrorKind::letter_out_of_range: return "LetterOutOfRange";
    case ErrorKind::duplicate_definition: return "DuplicateDefinition";
    case ErrorKind::missing_definition: return "MissingDefinition";
    case ErrorKind::invalid_state_index: return "InvalidStateIndex";
    case ErrorKind::alphabet_mismatch: return "AlphabetMismatch";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::subset_blowup: return "SubsetBlowup";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::budget_exceeded: return "BudgetExceeded";
    case ErrorKind::state_blowup: return "StateBlowup";
    case ErrorKind::infinite_costs: return "InfiniteCosts";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(format(kind, message, line)), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

  // Resource caps (as opposed to bad input) map to a distinct exit status in the CLI.
  bool is_resource_cap() const noexcept {
    return kind_ == ErrorKind::subset_blowup || kind_ == ErrorKind::budget_exceeded ||
           kind_ == ErrorKind::state_blowup || kind_ == ErrorKind::no_convergence;
  }

 private:
  static std::string format(ErrorKind kind, const std::string& message,
                            std::optional<std::size_t> line) {
    std::string out(to_string(kind));
    if (line) out += " (line " + std::to_string(*line) + ")";
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

}  // namespace mealy
