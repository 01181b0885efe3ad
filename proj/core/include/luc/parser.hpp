#pragma once

#include <string>
#include <variant>
#include <vector>

#include "luc/syntax.hpp"

namespace luc {

struct ParseError {
  enum class Kind { Syntax, LocationLiteral };
  Kind kind = Kind::Syntax;
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;  // token descriptions at failure point

  std::string render(const std::string& filename = "<input>") const;
};

using ParseResult = std::variant<ExprPtr, ParseError>;

// Parses a whole program. On success the result is source-form (no
// locations), annotations are normalized, and node ids are assigned in
// preorder. Field updates with a non-value right-hand side and calls
// whose callee is not a variable or function literal are let-desugared
// so runtime forms stay inside the evaluation-context grammar.
ParseResult parse_program(const std::string& text);

// Parses a type in the surface syntax (used by tests and tools).
std::variant<TypePtr, ParseError> parse_type_text(const std::string& text);

}  // namespace luc
