#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "confgeo/bilinear.hpp"

namespace confgeo {

/// Immutable expression tree over the parameters u1..ud.
///
/// Nodes are shared, so substituting one expression into another (as the
/// Möbius composition does) does not copy subtrees.
class Expr {
 public:
  enum class Op { Literal, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
  enum class Func { Sin, Cos, Exp, Sqrt };

  static Expr literal(double value);
  /// `index` is 1-based, matching the textual name u<index>.
  static Expr variable(int index);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, int exponent);
  static Expr neg(Expr a);
  static Expr call(Func f, Expr arg);

  Op op() const;
  double literal_value() const;
  int variable_index() const;
  int exponent() const;
  Func func() const;
  const Expr& lhs() const;  // also the operand of Neg, Pow and Call
  const Expr& rhs() const;

  /// Largest variable index referenced, 0 for constant expressions.
  int max_variable() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

/// Parses `text` over the variables u1..u{num_params}.
///
/// Grammar (whitespace insignificant):
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | factor
///   factor := base ('^' ['-'] int)?
///   base   := number | 'u'int | func '(' expr ')' | '(' expr ')'
///   func   := sin | cos | exp | sqrt
/// so that -u1^2 is -(u1^2).
Expr parse(std::string_view text, int num_params);

/// Fully parenthesised text that parses back to an equivalent tree.
/// Literals are written with 17 significant digits.
std::string unparse(const Expr& e);

/// Value, gradient and Hessian of a scalar function of the parameters.
struct Jet2 {
  double value = 0.0;
  Vector grad;
  Matrix hess;

  static Jet2 constant(double v, int d);
  static Jet2 variable(double v, int index0, int d);

  int dim() const { return static_cast<int>(grad.size()); }
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);

/// Forward-mode second-order evaluation. Throws DomainError on division by
/// zero, sqrt of a non-positive value, or a non-finite result.
Jet2 eval_jet2(const Expr& e, const Vector& u);

/// Plain value; same domain rules as eval_jet2.
double eval_value(const Expr& e, const Vector& u);

}  // namespace confgeo
