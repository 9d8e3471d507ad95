#pragma once

// Recursive-descent parser for the expression grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
// Reserved identifiers: x, t, i. Functions: exp, ln, atan.
// Decimal literals are read exactly (0.3 is 3/10). Exponents must be
// integer constants.

#include "ssqm/expr.hpp"

#include <map>
#include <string>

namespace ssqm {

// Parameters found in `bind` are substituted; other identifiers become free
// parameters when allow_free is set, otherwise UnboundSymbol is thrown.
Expr parse_expr(const std::string& text, const std::map<std::string, CQ>& bind = {}, bool allow_free = true);

}  // namespace ssqm
