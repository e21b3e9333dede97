#pragma once

#include <map>
#include <string>
#include <string_view>

#include "asdnk/error.hpp"
#include "asdnk/fields/expr.hpp"

namespace asdnk {

// Sparse multivariate polynomial with real coefficients. Only used to take
// exact antiderivatives of user-supplied polynomial parameters.
class Polynomial {
 public:
  using Monomial = std::map<std::string, int>;  // variable -> positive exponent

  Polynomial() = default;
  explicit Polynomial(double c) {
    if (c != 0.0) terms_[{}] = c;
  }
  static Polynomial variable(const std::string& v) {
    Polynomial p;
    p.terms_[{{v, 1}}] = 1.0;
    return p;
  }

  static Polynomial from_expr(const Expr& e) {
    switch (e.op()) {
      case Op::Const: return Polynomial(e.value());
      case Op::Var: return variable(e.name());
      case Op::Add: return from_expr(e.lhs()) + from_expr(e.rhs());
      case Op::Mul: return from_expr(e.lhs()) * from_expr(e.rhs());
      case Op::Neg: return from_expr(e.lhs()) * Polynomial(-1.0);
      case Op::Div:
        if (e.rhs().is_const() && e.rhs().value() != 0.0)
          return from_expr(e.lhs()) * Polynomial(1.0 / e.rhs().value());
        break;
      case Op::PowInt:
        if (e.exponent() >= 0) {
          Polynomial base = from_expr(e.lhs()), acc(1.0);
          for (int i = 0; i < e.exponent(); ++i) acc = acc * base;
          return acc;
        }
        break;
      default: break;
    }
    throw Error("non-polynomial input: " + to_string(e));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m = ma;
        for (const auto& [v, k] : mb) m[v] += k;
        r.add_term(m, ca * cb);
      }
    return r;
  }

  Polynomial antiderivative(const std::string& var) const {
    Polynomial r;
    for (const auto& [m0, c] : terms_) {
      Monomial m = m0;
      int k = ++m[var];
      r.add_term(m, c / k);
    }
    return r;
  }

  Expr to_expr() const {
    Expr sum(0.0);
    for (const auto& [m, c] : terms_) {
      Expr term(c);
      for (const auto& [v, k] : m) term = term * pow(Expr::variable(v), k);
      sum = sum + term;
    }
    return sum;
  }

  const std::map<Monomial, double>& terms() const { return terms_; }

 private:
  void add_term(const Monomial& m, double c) {
    double& slot = terms_[m];
    slot += c;
    if (slot == 0.0) terms_.erase(m);
  }
  std::map<Monomial, double> terms_;
};

inline Expr antiderivative(const Expr& e, const std::string& var) {
  return Polynomial::from_expr(e).antiderivative(var).to_expr();
}

}  // namespace asdnk
