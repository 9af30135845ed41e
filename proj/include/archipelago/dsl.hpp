#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "archipelago/projective.hpp"

namespace archipelago {

/// Syntax tree of the word language:
///
///   expr  := term+                      (juxtaposition or "·")
///   term  := atom ("^" int)?
///   atom  := "1" | letter | "(" expr ")" | func
///   letter:= "g" int ":" element-literal
///   func  := "inv(" expr ")" | "tau[" int "](" expr ")" | "p[" int "](" expr ")"
///          | "nest(" key "=" value ("," key "=" value)* ")"   keys k, base, exp
///          | "eps" ("[" int "]")? "(" list ("|" list)? ")"
///
/// nest(k=s.., base=g{k+c}:x, exp=A*k+B) is w_l = x_{l+c} (w_{l+1})^{A l + B}
/// from level s; the defaults are k=1.., base=g{k}:1, exp=k+1.
/// eps[s](c_1,...,c_m | d_1,...,d_q) has the coordinates c followed by the d
/// repeated forever; without "|" the last coordinate repeats, and a trailing
/// "..." is allowed.
struct Expr {
  enum class Kind { Identity, Letter, Product, Power, Inverse, Tau, Project, Nest, Eps };

  Kind kind = Kind::Identity;
  std::optional<Letter> letter;                 // Letter
  std::vector<std::shared_ptr<const Expr>> children;
  std::int64_t exponent = 0;                    // Power
  Index param = 0;                              // Tau level, Project depth
  std::optional<NestRule> nest;                 // Nest
  std::optional<EpsRule> eps;                   // Eps

  friend bool operator==(const Expr& a, const Expr& b);
};

using ExprPtr = std::shared_ptr<const Expr>;

/// ParseError carries the byte offset; element literals are checked against
/// the descriptor of their index.
ExprPtr parse_expression(std::string_view text, const FamilySpec& spec);
std::string format_expression(const Expr& e);

/// True when no nest or eps occurs outside a p[n](...).
bool is_finite_expression(const Expr& e);

/// The word over `spec`; subterms with different base indices are lowered
/// to the smallest one before multiplying.
ProjectiveWord evaluate(const Expr& e, const FamilySpec& spec);

}  // namespace archipelago
