#include "valuepilot/errors.hpp"

namespace valuepilot {

std::string format_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.location + ": " + v.message;
  }
  return out;
}

ValidationError::ValidationError(std::string message)
    : Error(message), violations_{{"", std::move(message)}} {}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(format_violations(violations)), violations_(std::move(violations)) {}

ParseError::ParseError(const std::string& what, std::size_t line,
                       std::size_t column)
    : Error("line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

}  // namespace valuepilot
