#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "asdnk/error.hpp"

namespace asdnk {

enum class Op : std::uint8_t { Const, Var, Add, Mul, Div, PowInt, Pow, Neg, Sin, Cos, Exp, Log };

namespace detail {
struct Node {
  Op op = Op::Const;
  double value = 0.0;
  int exponent = 0;
  std::string name;
  std::shared_ptr<const Node> a, b;
};
}  // namespace detail

// Immutable expression DAG. Nodes are shared, never mutated; the smart
// constructors below fold constants and drop 0/1 identities but do no other
// simplification.
class Expr {
 public:
  Expr() : Expr(0.0) {}
  Expr(double c) {  // NOLINT: constants convert implicitly
    auto n = std::make_shared<detail::Node>();
    n->op = Op::Const;
    n->value = c;
    n_ = std::move(n);
  }
  Expr(int c) : Expr(static_cast<double>(c)) {}  // NOLINT

  static Expr variable(std::string name) {
    auto n = std::make_shared<detail::Node>();
    n->op = Op::Var;
    n->name = std::move(name);
    return Expr(std::move(n));
  }

  Op op() const { return n_->op; }
  double value() const { return n_->value; }
  int exponent() const { return n_->exponent; }
  const std::string& name() const { return n_->name; }
  Expr lhs() const { return Expr(n_->a); }
  Expr rhs() const { return Expr(n_->b); }
  const detail::Node* node() const { return n_.get(); }

  bool is_const() const { return n_->op == Op::Const; }
  bool is_const(double c) const { return n_->op == Op::Const && n_->value == c; }
  bool is_integer_const() const {
    return is_const() && std::isfinite(value()) && value() == std::nearbyint(value());
  }

  static Expr make(Op op, Expr a, Expr b = Expr(), double value = 0.0, int exponent = 0) {
    auto n = std::make_shared<detail::Node>();
    n->op = op;
    n->a = a.n_;
    if (op == Op::Add || op == Op::Mul || op == Op::Div || op == Op::Pow) n->b = b.n_;
    n->value = value;
    n->exponent = exponent;
    return Expr(std::move(n));
  }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const detail::Node> n_;
};

inline Expr operator-(const Expr& a) {
  if (a.is_const()) return Expr(-a.value());
  if (a.op() == Op::Neg) return a.lhs();
  return Expr::make(Op::Neg, a);
}

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.value() + b.value());
  if (a.is_const(0.0)) return b;
  if (b.is_const(0.0)) return a;
  return Expr::make(Op::Add, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.value() * b.value());
  if (a.is_const(0.0) || b.is_const(0.0)) return Expr(0.0);
  if (a.is_const(1.0)) return b;
  if (b.is_const(1.0)) return a;
  if (a.is_const(-1.0)) return -b;
  if (b.is_const(-1.0)) return -a;
  if (b.is_const()) return b * a;  // constants to the left
  if (a.is_const() && b.op() == Op::Mul && b.lhs().is_const())
    return Expr(a.value() * b.lhs().value()) * b.rhs();
  if (a.is_const() && b.op() == Op::Neg) return Expr(-a.value()) * b.lhs();
  return Expr::make(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_const(1.0)) return a;
  if (b.is_const(-1.0)) return -a;
  if (b.is_const(0.0)) return Expr::make(Op::Div, a, b);  // raises on evaluation
  if (a.is_const(0.0)) return Expr(0.0);
  if (a.is_const() && b.is_const()) return Expr(a.value() / b.value());
  return Expr::make(Op::Div, a, b);
}

inline Expr pow(const Expr& a, int n) {
  if (n == 0) return Expr(1.0);
  if (n == 1) return a;
  if (a.is_const(1.0)) return Expr(1.0);
  if (a.is_const(0.0) && n > 0) return Expr(0.0);
  if (a.is_const() && !(a.value() == 0.0 && n < 0)) return Expr(std::pow(a.value(), n));
  if (a.op() == Op::PowInt) return pow(a.lhs(), a.exponent() * n);
  return Expr::make(Op::PowInt, a, Expr(), 0.0, n);
}

inline Expr pow(const Expr& a, const Expr& e) {
  if (e.is_integer_const() && std::abs(e.value()) <= 64) return pow(a, static_cast<int>(e.value()));
  if (a.is_const() && e.is_const() && a.value() > 0) return Expr(std::pow(a.value(), e.value()));
  return Expr::make(Op::Pow, a, e);
}

inline Expr sin(const Expr& a) {
  if (a.is_const()) return Expr(std::sin(a.value()));
  return Expr::make(Op::Sin, a);
}
inline Expr cos(const Expr& a) {
  if (a.is_const()) return Expr(std::cos(a.value()));
  return Expr::make(Op::Cos, a);
}
inline Expr exp(const Expr& a) {
  if (a.is_const()) return Expr(std::exp(a.value()));
  return Expr::make(Op::Exp, a);
}
inline Expr log(const Expr& a) {
  if (a.is_const() && a.value() > 0) return Expr(std::log(a.value()));
  return Expr::make(Op::Log, a);
}
inline Expr sqrt(const Expr& a) { return pow(a, Expr(0.5)); }

inline bool depends_on(const Expr& e, std::string_view var) {
  std::unordered_map<const detail::Node*, bool> memo;
  std::function<bool(const Expr&)> rec = [&](const Expr& x) -> bool {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    bool r = false;
    switch (x.op()) {
      case Op::Const: r = false; break;
      case Op::Var: r = x.name() == var; break;
      case Op::Add: case Op::Mul: case Op::Div: case Op::Pow:
        r = rec(x.lhs()) || rec(x.rhs());
        break;
      default: r = rec(x.lhs()); break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return rec(e);
}

inline Expr diff(const Expr& e, std::string_view var) {
  std::unordered_map<const detail::Node*, Expr> memo;
  std::function<Expr(const Expr&)> d = [&](const Expr& x) -> Expr {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (x.op()) {
      case Op::Const: r = Expr(0.0); break;
      case Op::Var: r = Expr(x.name() == var ? 1.0 : 0.0); break;
      case Op::Add: r = d(x.lhs()) + d(x.rhs()); break;
      case Op::Mul: r = d(x.lhs()) * x.rhs() + x.lhs() * d(x.rhs()); break;
      case Op::Div: {
        Expr da = d(x.lhs()), db = d(x.rhs());
        if (db.is_const(0.0)) r = da / x.rhs();
        else r = (da * x.rhs() - x.lhs() * db) / pow(x.rhs(), 2);
        break;
      }
      case Op::PowInt: {
        int n = x.exponent();
        r = Expr(static_cast<double>(n)) * pow(x.lhs(), n - 1) * d(x.lhs());
        break;
      }
      case Op::Pow: {
        Expr u = x.lhs(), v = x.rhs();
        Expr du = d(u), dv = d(v);
        if (dv.is_const(0.0)) r = v * pow(u, v - Expr(1.0)) * du;
        else r = x * (dv * log(u) + v * du / u);
        break;
      }
      case Op::Neg: r = -d(x.lhs()); break;
      case Op::Sin: r = cos(x.lhs()) * d(x.lhs()); break;
      case Op::Cos: r = -(sin(x.lhs()) * d(x.lhs())); break;
      case Op::Exp: r = x * d(x.lhs()); break;
      case Op::Log: r = d(x.lhs()) / x.lhs(); break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return d(e);
}

// Rebuilds e through the smart constructors with `var` replaced.
inline Expr substitute(const Expr& e, std::string_view var, const Expr& replacement) {
  std::unordered_map<const detail::Node*, Expr> memo;
  std::function<Expr(const Expr&)> s = [&](const Expr& x) -> Expr {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (x.op()) {
      case Op::Const: r = x; break;
      case Op::Var: r = x.name() == var ? replacement : x; break;
      case Op::Add: r = s(x.lhs()) + s(x.rhs()); break;
      case Op::Mul: r = s(x.lhs()) * s(x.rhs()); break;
      case Op::Div: r = s(x.lhs()) / s(x.rhs()); break;
      case Op::PowInt: r = pow(s(x.lhs()), x.exponent()); break;
      case Op::Pow: r = pow(s(x.lhs()), s(x.rhs())); break;
      case Op::Neg: r = -s(x.lhs()); break;
      case Op::Sin: r = sin(s(x.lhs())); break;
      case Op::Cos: r = cos(s(x.lhs())); break;
      case Op::Exp: r = exp(s(x.lhs())); break;
      case Op::Log: r = log(s(x.lhs())); break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return s(e);
}

inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  std::set<const detail::Node*> seen;
  std::function<void(const Expr&)> rec = [&](const Expr& x) {
    if (!seen.insert(x.node()).second) return;
    switch (x.op()) {
      case Op::Const: break;
      case Op::Var: out.insert(x.name()); break;
      case Op::Add: case Op::Mul: case Op::Div: case Op::Pow:
        rec(x.lhs());
        rec(x.rhs());
        break;
      default: rec(x.lhs()); break;
    }
  };
  rec(e);
  return out;
}

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {
inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add: return 1;
    case Op::Mul: case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::PowInt: case Op::Pow: return 4;
    case Op::Const: return e.value() < 0 ? 3 : 5;
    default: return 5;
  }
}
}  // namespace detail

// Infix form accepted back by parse_expression.
inline std::string to_string(const Expr& e) {
  auto wrap = [](const Expr& x, int min_prec) {
    std::string s = to_string(x);
    return detail::precedence(x) < min_prec ? "(" + s + ")" : s;
  };
  switch (e.op()) {
    case Op::Const: return format_number(e.value());
    case Op::Var: return e.name();
    case Op::Add:
      if (e.rhs().op() == Op::Neg) return wrap(e.lhs(), 1) + " - " + wrap(e.rhs().lhs(), 2);
      return wrap(e.lhs(), 1) + " + " + wrap(e.rhs(), 2);
    case Op::Mul: return wrap(e.lhs(), 2) + "*" + wrap(e.rhs(), 3);
    case Op::Div: return wrap(e.lhs(), 2) + "/" + wrap(e.rhs(), 3);
    case Op::PowInt: {
      std::string n = std::to_string(e.exponent());
      return wrap(e.lhs(), 5) + "^" + (e.exponent() < 0 ? "(" + n + ")" : n);
    }
    case Op::Pow: return wrap(e.lhs(), 5) + "^" + wrap(e.rhs(), 5);
    case Op::Neg: return "-" + wrap(e.lhs(), 3);
    case Op::Sin: return "sin(" + to_string(e.lhs()) + ")";
    case Op::Cos: return "cos(" + to_string(e.lhs()) + ")";
    case Op::Exp: return "exp(" + to_string(e.lhs()) + ")";
    case Op::Log: return "log(" + to_string(e.lhs()) + ")";
  }
  return {};
}

// Structural form, e.g. product(x, power(y, 3)).
inline std::string to_tree(const Expr& e) {
  switch (e.op()) {
    case Op::Const: return format_number(e.value());
    case Op::Var: return e.name();
    case Op::Add: return "sum(" + to_tree(e.lhs()) + ", " + to_tree(e.rhs()) + ")";
    case Op::Mul: return "product(" + to_tree(e.lhs()) + ", " + to_tree(e.rhs()) + ")";
    case Op::Div: return "quotient(" + to_tree(e.lhs()) + ", " + to_tree(e.rhs()) + ")";
    case Op::PowInt: return "power(" + to_tree(e.lhs()) + ", " + std::to_string(e.exponent()) + ")";
    case Op::Pow: return "power(" + to_tree(e.lhs()) + ", " + to_tree(e.rhs()) + ")";
    case Op::Neg: return "negate(" + to_tree(e.lhs()) + ")";
    case Op::Sin: return "sin(" + to_tree(e.lhs()) + ")";
    case Op::Cos: return "cos(" + to_tree(e.lhs()) + ")";
    case Op::Exp: return "exp(" + to_tree(e.lhs()) + ")";
    case Op::Log: return "log(" + to_tree(e.lhs()) + ")";
  }
  return {};
}

// Flat register program for an Expr over a fixed chart. Structurally equal
// subtrees share one slot, which matters for the large trees produced by
// repeated differentiation.
class Tape {
 public:
  Tape() = default;

  Tape(const Expr& e, const std::vector<std::string>& chart) {
    std::unordered_map<const detail::Node*, int> by_node;
    std::map<Key, int> by_key;
    root_ = emit(e, chart, by_node, by_key);
  }

  std::size_t size() const { return code_.size(); }

  double operator()(const double* point) const {
    constexpr std::size_t kStack = 512;
    if (code_.size() <= kStack) {
      double regs[kStack];
      return run(point, regs);
    }
    std::vector<double> regs(code_.size());
    return run(point, regs.data());
  }

 private:
  struct Instr {
    Op op;
    int a = -1, b = -1;
    double c = 0.0;
    int k = 0;
  };
  using Key = std::tuple<int, std::uint64_t, int, int, int>;

  int emit(const Expr& e, const std::vector<std::string>& chart,
           std::unordered_map<const detail::Node*, int>& by_node, std::map<Key, int>& by_key) {
    auto it = by_node.find(e.node());
    if (it != by_node.end()) return it->second;
    Instr in;
    in.op = e.op();
    switch (e.op()) {
      case Op::Const: in.c = e.value(); break;
      case Op::Var: {
        in.k = -1;
        for (std::size_t i = 0; i < chart.size(); ++i)
          if (chart[i] == e.name()) in.k = static_cast<int>(i);
        if (in.k < 0) throw Error("variable '" + e.name() + "' is not a chart coordinate");
        break;
      }
      case Op::Add: case Op::Mul: case Op::Div: case Op::Pow:
        in.a = emit(e.lhs(), chart, by_node, by_key);
        in.b = emit(e.rhs(), chart, by_node, by_key);
        break;
      case Op::PowInt:
        in.a = emit(e.lhs(), chart, by_node, by_key);
        in.k = e.exponent();
        break;
      default: in.a = emit(e.lhs(), chart, by_node, by_key); break;
    }
    std::uint64_t bits;
    std::memcpy(&bits, &in.c, sizeof bits);
    Key key{static_cast<int>(in.op), bits, in.k, in.a, in.b};
    auto kt = by_key.find(key);
    int slot;
    if (kt != by_key.end()) {
      slot = kt->second;
    } else {
      slot = static_cast<int>(code_.size());
      code_.push_back(in);
      by_key.emplace(key, slot);
    }
    by_node.emplace(e.node(), slot);
    return slot;
  }

  double run(const double* p, double* r) const {
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Instr& in = code_[i];
      double v = 0.0;
      switch (in.op) {
        case Op::Const: v = in.c; break;
        case Op::Var: v = p[in.k]; break;
        case Op::Add: v = r[in.a] + r[in.b]; break;
        case Op::Mul: v = r[in.a] * r[in.b]; break;
        case Op::Div:
          if (r[in.b] == 0.0) throw SingularityError("division by zero");
          v = r[in.a] / r[in.b];
          break;
        case Op::PowInt:
          if (in.k < 0 && r[in.a] == 0.0) throw SingularityError("division by zero (negative power of 0)");
          v = ipow(r[in.a], in.k);
          break;
        case Op::Pow:
          if (r[in.a] < 0.0) throw SingularityError("real power of a negative number");
          if (r[in.a] == 0.0 && r[in.b] < 0.0) throw SingularityError("negative power of 0");
          v = std::pow(r[in.a], r[in.b]);
          break;
        case Op::Neg: v = -r[in.a]; break;
        case Op::Sin: v = std::sin(r[in.a]); break;
        case Op::Cos: v = std::cos(r[in.a]); break;
        case Op::Exp: v = std::exp(r[in.a]); break;
        case Op::Log:
          if (!(r[in.a] > 0.0)) throw SingularityError("log of a non-positive number");
          v = std::log(r[in.a]);
          break;
      }
      r[i] = v;
    }
    double out = r[root_];
    if (!std::isfinite(out)) throw SingularityError("non-finite result");
    return out;
  }

  static double ipow(double x, int n) {
    bool inv = n < 0;
    unsigned m = static_cast<unsigned>(inv ? -n : n);
    double acc = 1.0, base = x;
    while (m) {
      if (m & 1u) acc *= base;
      base *= base;
      m >>= 1;
    }
    return inv ? 1.0 / acc : acc;
  }

  std::vector<Instr> code_;
  int root_ = 0;
};

// Reference evaluation by name lookup; slow, used by tests and diagnostics.
inline double evaluate(const Expr& e, const std::map<std::string, double>& env) {
  std::vector<std::string> chart;
  std::vector<double> pt;
  for (const auto& [k, v] : env) {
    chart.push_back(k);
    pt.push_back(v);
  }
  return Tape(e, chart)(pt.data());
}

}  // namespace asdnk
