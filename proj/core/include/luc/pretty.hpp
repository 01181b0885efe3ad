#pragma once

#include <string>

#include "luc/syntax.hpp"

namespace luc {

// Canonical surface rendering; parse_program(pretty_print(e)) == e for
// every source-form expression the grammar can produce directly.
// Residuals containing locations print them as "@loc<n>", which is
// reserved (unparseable) syntax for trace output.
std::string pretty_print(const ExprPtr& e);
std::string pretty_print(const Expr& e);

}  // namespace luc
