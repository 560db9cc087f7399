#include "confgeo/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "confgeo/errors.hpp"

namespace confgeo {

struct Expr::Node {
  Op op;
  double value = 0.0;
  int index = 0;  // variable index or integer exponent
  Func func = Func::Sin;
  Expr a{nullptr};
  Expr b{nullptr};
  int max_var = 0;
};

namespace {

std::shared_ptr<Expr::Node> make_node(Expr::Op op) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  return n;
}

const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::Sin: return "sin";
    case Expr::Func::Cos: return "cos";
    case Expr::Func::Exp: return "exp";
    case Expr::Func::Sqrt: return "sqrt";
  }
  return "?";
}

}  // namespace

Expr Expr::literal(double value) {
  auto n = make_node(Op::Literal);
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 1) throw UnknownIdentifier("variable index must be >= 1");
  auto n = make_node(Op::Variable);
  n->index = index;
  n->max_var = index;
  return Expr(std::move(n));
}

#define CONFGEO_BINARY(name, OP)                                  \
  Expr Expr::name(Expr a, Expr b) {                               \
    auto n = make_node(Op::OP);                                   \
    n->max_var = std::max(a.max_variable(), b.max_variable());    \
    n->a = std::move(a);                                          \
    n->b = std::move(b);                                          \
    return Expr(std::move(n));                                    \
  }
CONFGEO_BINARY(add, Add)
CONFGEO_BINARY(sub, Sub)
CONFGEO_BINARY(mul, Mul)
CONFGEO_BINARY(div, Div)
#undef CONFGEO_BINARY

Expr Expr::pow(Expr base, int exponent) {
  auto n = make_node(Op::Pow);
  n->max_var = base.max_variable();
  n->index = exponent;
  n->a = std::move(base);
  return Expr(std::move(n));
}

Expr Expr::neg(Expr a) {
  auto n = make_node(Op::Neg);
  n->max_var = a.max_variable();
  n->a = std::move(a);
  return Expr(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
  auto n = make_node(Op::Call);
  n->max_var = arg.max_variable();
  n->func = f;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr::Op Expr::op() const { return node_->op; }
double Expr::literal_value() const { return node_->value; }
int Expr::variable_index() const { return node_->index; }
int Expr::exponent() const { return node_->index; }
Expr::Func Expr::func() const { return node_->func; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
int Expr::max_variable() const { return node_ ? node_->max_var : 0; }

Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::sub(std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::mul(std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::div(std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::neg(std::move(a)); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, int num_params) : s_(text), d_(num_params) {}

  Expr run() {
    skip_ws();
    if (pos_ >= s_.size()) throw SyntaxError(pos_, "empty expression");
    Expr e = expr();
    skip_ws();
    if (pos_ < s_.size()) {
      throw SyntaxError(pos_, std::string("unexpected '") + s_[pos_] + "'");
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw SyntaxError(pos_, std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return factor();
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      const bool negative = accept('-');
      skip_ws();
      const long long n = integer();
      if (n > 1024) throw SyntaxError(at, "exponent out of range");
      return Expr::pow(std::move(b), static_cast<int>(negative ? -n : n));
    }
    return b;
  }

  long long integer() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) throw SyntaxError(start, "expected integer");
    if (pos_ - start > 9) throw SyntaxError(start, "integer too long");
    long long v = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, v);
    return v;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError(start, "malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError(pos_, "malformed exponent");
    }
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
      throw SyntaxError(start, "malformed number");
    }
    return Expr::literal(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);

    if (name.size() > 1 && name[0] == 'u' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int idx = 0;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec != std::errc() || idx < 1 || idx > d_) {
        throw UnknownIdentifier("unknown variable '" + std::string(name) + "' (parameters are u1..u" +
                                std::to_string(d_) + ")");
      }
      return Expr::variable(idx);
    }

    Expr::Func f;
    if (name == "sin") {
      f = Expr::Func::Sin;
    } else if (name == "cos") {
      f = Expr::Func::Cos;
    } else if (name == "exp") {
      f = Expr::Func::Exp;
    } else if (name == "sqrt") {
      f = Expr::Func::Sqrt;
    } else {
      throw UnknownIdentifier("unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ')') {
      throw ArityError(std::string(name) + " takes exactly one argument, got none");
    }
    Expr arg = expr();
    if (accept(',')) {
      throw ArityError(std::string(name) + " takes exactly one argument");
    }
    expect(')');
    return Expr::call(f, std::move(arg));
  }

  std::string_view s_;
  int d_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int num_params) { return Parser(text, num_params).run(); }

// ---------------------------------------------------------------------------
// Unparse

namespace {

void write_literal(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (v < 0.0 || (v == 0.0 && std::signbit(v))) {
    out += "(-";
    out += (buf[0] == '-') ? buf + 1 : buf;
    out += ')';
  } else {
    out += buf;
  }
}

void unparse_into(std::string& out, const Expr& e) {
  switch (e.op()) {
    case Expr::Op::Literal:
      write_literal(out, e.literal_value());
      return;
    case Expr::Op::Variable:
      out += 'u';
      out += std::to_string(e.variable_index());
      return;
    case Expr::Op::Add:
    case Expr::Op::Sub:
    case Expr::Op::Mul:
    case Expr::Op::Div: {
      static constexpr char ops[] = {'+', '-', '*', '/'};
      out += '(';
      unparse_into(out, e.lhs());
      out += ' ';
      out += ops[static_cast<int>(e.op()) - static_cast<int>(Expr::Op::Add)];
      out += ' ';
      unparse_into(out, e.rhs());
      out += ')';
      return;
    }
    case Expr::Op::Pow:
      out += '(';
      unparse_into(out, e.lhs());
      out += ")^";
      out += std::to_string(e.exponent());
      return;
    case Expr::Op::Neg:
      out += "(-";
      unparse_into(out, e.lhs());
      out += ')';
      return;
    case Expr::Op::Call:
      out += func_name(e.func());
      out += '(';
      unparse_into(out, e.lhs());
      out += ')';
      return;
  }
}

}  // namespace

std::string unparse(const Expr& e) {
  std::string out;
  unparse_into(out, e);
  return out;
}

// ---------------------------------------------------------------------------
// Jets

Jet2 Jet2::constant(double v, int d) {
  return Jet2{v, Vector::Zero(d), Matrix::Zero(d, d)};
}

Jet2 Jet2::variable(double v, int index0, int d) {
  Jet2 j = constant(v, d);
  j.grad[index0] = 1.0;
  return j;
}

Jet2 operator+(const Jet2& a, const Jet2& b) {
  return Jet2{a.value + b.value, a.grad + b.grad, a.hess + b.hess};
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
  return Jet2{a.value - b.value, a.grad - b.grad, a.hess - b.hess};
}

Jet2 operator-(const Jet2& a) { return Jet2{-a.value, -a.grad, -a.hess}; }

Jet2 operator*(const Jet2& a, const Jet2& b) {
  const Matrix cross = a.grad * b.grad.transpose();
  const Matrix sym = cross + cross.transpose();
  return Jet2{a.value * b.value, a.value * b.grad + b.value * a.grad, a.value * b.hess + b.value * a.hess + sym};
}

namespace {

/// f(a) given f, f', f'' at a.value.
Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  if (!std::isfinite(f0) || !std::isfinite(f1) || !std::isfinite(f2)) {
    throw DomainError("non-finite value in expression evaluation");
  }
  Jet2 out{f0, f1 * a.grad, f1 * a.hess};
  if (f2 != 0.0) {
    const Matrix outer = a.grad * a.grad.transpose();
    out.hess += f2 * outer;
  }
  return out;
}

Jet2 reciprocal(const Jet2& a) {
  if (a.value == 0.0) throw DomainError("division by zero");
  const double r = 1.0 / a.value;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

double ipow(double x, int n) {
  if (n == 0) return 1.0;
  if (n < 0) return 1.0 / ipow(x, -n);
  double r = 1.0;
  double b = x;
  unsigned k = static_cast<unsigned>(n);
  while (k) {
    if (k & 1u) r *= b;
    b *= b;
    k >>= 1u;
  }
  return r;
}

Jet2 power(const Jet2& a, int n) {
  const int d = a.dim();
  if (n == 0) return Jet2::constant(1.0, d);
  if (n == 1) return a;
  if (n < 0 && a.value == 0.0) throw DomainError("negative power of zero");
  const double x = a.value;
  const double f0 = ipow(x, n);
  const double f1 = n * ipow(x, n - 1);
  const double f2 = static_cast<double>(n) * (n - 1) * ipow(x, n - 2);
  return chain(a, f0, f1, f2);
}

Jet2 apply(Expr::Func f, const Jet2& a) {
  const double x = a.value;
  switch (f) {
    case Expr::Func::Sin: return chain(a, std::sin(x), std::cos(x), -std::sin(x));
    case Expr::Func::Cos: return chain(a, std::cos(x), -std::sin(x), -std::cos(x));
    case Expr::Func::Exp: {
      const double e = std::exp(x);
      return chain(a, e, e, e);
    }
    case Expr::Func::Sqrt: {
      if (!(x > 0.0)) throw DomainError("sqrt of non-positive value " + std::to_string(x));
      const double s = std::sqrt(x);
      return chain(a, s, 0.5 / s, -0.25 / (s * x));
    }
  }
  throw DomainError("unknown function");
}

}  // namespace

Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

namespace {

Jet2 jet_rec(const Expr& e, const Vector& u) {
  const int d = static_cast<int>(u.size());
  switch (e.op()) {
    case Expr::Op::Literal: return Jet2::constant(e.literal_value(), d);
    case Expr::Op::Variable: {
      const int k = e.variable_index() - 1;
      if (k >= d) throw UnknownIdentifier("variable u" + std::to_string(k + 1) + " out of range");
      return Jet2::variable(u[k], k, d);
    }
    case Expr::Op::Add: return jet_rec(e.lhs(), u) + jet_rec(e.rhs(), u);
    case Expr::Op::Sub: return jet_rec(e.lhs(), u) - jet_rec(e.rhs(), u);
    case Expr::Op::Mul: return jet_rec(e.lhs(), u) * jet_rec(e.rhs(), u);
    case Expr::Op::Div: return jet_rec(e.lhs(), u) / jet_rec(e.rhs(), u);
    case Expr::Op::Pow: return power(jet_rec(e.lhs(), u), e.exponent());
    case Expr::Op::Neg: return -jet_rec(e.lhs(), u);
    case Expr::Op::Call: return apply(e.func(), jet_rec(e.lhs(), u));
  }
  throw DomainError("malformed expression");
}

double value_rec(const Expr& e, const Vector& u) {
  switch (e.op()) {
    case Expr::Op::Literal: return e.literal_value();
    case Expr::Op::Variable: {
      const int k = e.variable_index() - 1;
      if (k >= u.size()) throw UnknownIdentifier("variable u" + std::to_string(k + 1) + " out of range");
      return u[k];
    }
    case Expr::Op::Add: return value_rec(e.lhs(), u) + value_rec(e.rhs(), u);
    case Expr::Op::Sub: return value_rec(e.lhs(), u) - value_rec(e.rhs(), u);
    case Expr::Op::Mul: return value_rec(e.lhs(), u) * value_rec(e.rhs(), u);
    case Expr::Op::Div: {
      const double den = value_rec(e.rhs(), u);
      if (den == 0.0) throw DomainError("division by zero");
      return value_rec(e.lhs(), u) / den;
    }
    case Expr::Op::Pow: {
      const double x = value_rec(e.lhs(), u);
      if (e.exponent() < 0 && x == 0.0) throw DomainError("negative power of zero");
      return ipow(x, e.exponent());
    }
    case Expr::Op::Neg: return -value_rec(e.lhs(), u);
    case Expr::Op::Call: {
      const double x = value_rec(e.lhs(), u);
      switch (e.func()) {
        case Expr::Func::Sin: return std::sin(x);
        case Expr::Func::Cos: return std::cos(x);
        case Expr::Func::Exp: return std::exp(x);
        case Expr::Func::Sqrt:
          if (!(x > 0.0)) throw DomainError("sqrt of non-positive value " + std::to_string(x));
          return std::sqrt(x);
      }
    }
  }
  throw DomainError("malformed expression");
}

}  // namespace

Jet2 eval_jet2(const Expr& e, const Vector& u) {
  Jet2 j = jet_rec(e, u);
  if (!std::isfinite(j.value) || !j.grad.allFinite() || !j.hess.allFinite()) {
    throw DomainError("non-finite jet");
  }
  return j;
}

double eval_value(const Expr& e, const Vector& u) {
  const double v = value_rec(e, u);
  if (!std::isfinite(v)) throw DomainError("non-finite value");
  return v;
}

}  // namespace confgeo
