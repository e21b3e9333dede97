#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/domain.hpp"
#include "asdnk/fields/expr.hpp"
#include "asdnk/fields/grid.hpp"
#include "asdnk/fields/parser.hpp"

namespace asdnk {

inline constexpr int kMaxChartDim = 6;
inline constexpr int kMaxDerivativeOrder = 4;

class MultiIndex {
 public:
  MultiIndex() { orders_.fill(0); }

  static MultiIndex unit(int axis, int times = 1) {
    MultiIndex m;
    m.set(axis, times);
    return m;
  }
  static MultiIndex of(const std::vector<std::string>& chart, std::initializer_list<std::string_view> vars) {
    MultiIndex m;
    for (auto v : vars) {
      auto it = std::find(chart.begin(), chart.end(), v);
      if (it == chart.end()) throw Error("derivative variable '" + std::string(v) + "' not in chart");
      ++m.orders_[static_cast<std::size_t>(it - chart.begin())];
    }
    return m;
  }

  int operator[](int i) const { return orders_[static_cast<std::size_t>(i)]; }
  void set(int i, int k) {
    if (i < 0 || i >= kMaxChartDim || k < 0) throw Error("bad multi-index entry");
    orders_[static_cast<std::size_t>(i)] = k;
  }
  int total() const {
    int s = 0;
    for (int k : orders_) s += k;
    return s;
  }
  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r;
    for (int i = 0; i < kMaxChartDim; ++i) r.orders_[i] = orders_[i] + o.orders_[i];
    return r;
  }
  bool operator==(const MultiIndex&) const = default;

 private:
  std::array<int, kMaxChartDim> orders_;
};

enum class Backend { ClosedForm, Sampled };

namespace detail {

struct SampledData {
  GridSpec grid;
  std::vector<double> values;
};

// Weights of the k-fold repeated 4th-order central first-derivative stencil.
inline std::vector<std::pair<int, double>> stencil_weights(int order, double h) {
  std::vector<std::pair<int, double>> w{{0, 1.0}};
  static const std::pair<int, double> base[] = {{-2, 1.0}, {-1, -8.0}, {1, 8.0}, {2, -1.0}};
  for (int k = 0; k < order; ++k) {
    std::vector<std::pair<int, double>> next;
    for (const auto& [o, c] : w)
      for (const auto& [bo, bc] : base) {
        int off = o + bo;
        double val = c * bc / (12.0 * h);
        auto it = std::find_if(next.begin(), next.end(), [&](const auto& p) { return p.first == off; });
        if (it == next.end()) next.emplace_back(off, val);
        else it->second += val;
      }
    std::sort(next.begin(), next.end());
    w = std::move(next);
  }
  return w;
}

// Calls fn(index tuple, weight) for each element of the tensor product of per-axis (index, weight) lists.
template <class Fn>
void for_each_product(const std::vector<std::vector<std::pair<long, double>>>& lists, Fn&& fn) {
  const std::size_t d = lists.size();
  std::vector<std::size_t> pos(d, 0);
  std::vector<long> idx(d);
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      idx[a] = lists[a][pos[a]].first;
      w *= lists[a][pos[a]].second;
    }
    fn(idx, w);
    std::size_t a = d;
    while (a-- > 0) {
      if (++pos[a] < lists[a].size()) break;
      pos[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace detail

// Real function on a named chart. Closed-form fields hold an Expr and are
// differentiated symbolically; sampled fields hold grid values plus a
// pending derivative multi-index that is applied lazily with central
// stencils at evaluation time.
class ScalarField {
 public:
  ScalarField() : closed_(std::make_shared<const Closed>(Closed{Expr(0.0), Tape(Expr(0.0), {})})) {}

  static ScalarField closed_form(const Expr& e, std::vector<std::string> chart, const Domain& domain = {}) {
    if (static_cast<int>(chart.size()) > kMaxChartDim) throw Error("chart has too many coordinates");
    ScalarField f;
    f.closed_ = std::make_shared<const Closed>(Closed{e, Tape(e, chart)});
    f.chart_ = std::move(chart);
    f.set_domain(domain);
    return f;
  }
  static ScalarField constant(double c, std::vector<std::string> chart, const Domain& domain = {}) {
    return closed_form(Expr(c), std::move(chart), domain);
  }
  static ScalarField parse(std::string_view text, std::vector<std::string> chart, const Domain& domain = {},
                           const std::map<std::string, double>& params = {}) {
    Expr e = parse_expression(text, chart, params);
    return closed_form(e, std::move(chart), domain);
  }
  static ScalarField sampled(const GridSpec& grid, std::vector<double> values) {
    if (values.size() != grid.size()) throw Error("value count does not match grid");
    if (static_cast<int>(grid.dim()) > kMaxChartDim) throw Error("grid has too many axes");
    ScalarField f;
    f.closed_.reset();
    f.sampled_ = std::make_shared<const detail::SampledData>(detail::SampledData{grid, std::move(values)});
    f.chart_ = grid.names();
    Domain d;
    for (const auto& a : grid.axes()) d.bound(a.name, a.min, a.max);
    f.set_domain(d);
    return f;
  }

  Backend backend() const { return closed_ ? Backend::ClosedForm : Backend::Sampled; }
  const std::vector<std::string>& chart() const { return chart_; }
  const Domain& domain() const { return domain_; }
  const MultiIndex& pending() const { return pending_; }

  const Expr& expr() const {
    if (!closed_) throw Error("sampled field has no expression");
    return closed_->expr;
  }
  const GridSpec& grid() const {
    if (!sampled_) throw Error("closed-form field has no grid");
    return sampled_->grid;
  }

  bool is_zero() const { return closed_ && closed_->expr.is_const(0.0); }
  bool is_constant() const { return closed_ && closed_->expr.is_const(); }

  int axis(std::string_view name) const {
    for (std::size_t i = 0; i < chart_.size(); ++i)
      if (chart_[i] == name) return static_cast<int>(i);
    throw Error("coordinate '" + std::string(name) + "' not in chart");
  }

  double evaluate(const double* p) const {
    check_.check(p);
    if (closed_) return closed_->tape(p);
    return sampled_value(p);
  }
  double evaluate(const std::vector<double>& p) const {
    if (p.size() != chart_.size()) throw Error("point has wrong dimension");
    return evaluate(p.data());
  }
  double operator()(std::initializer_list<double> p) const { return evaluate(std::vector<double>(p)); }

  ScalarField differentiate(const MultiIndex& idx) const {
    for (int i = static_cast<int>(chart_.size()); i < kMaxChartDim; ++i)
      if (idx[i] != 0) throw Error("derivative index beyond chart");
    if (idx.total() > kMaxDerivativeOrder)
      throw OrderError("derivative order " + std::to_string(idx.total()) + " exceeds " +
                       std::to_string(kMaxDerivativeOrder));
    if (idx.total() == 0) return *this;
    if (closed_) {
      Expr e = closed_->expr;
      for (std::size_t a = 0; a < chart_.size(); ++a)
        for (int k = 0; k < idx[static_cast<int>(a)]; ++k) e = diff(e, chart_[a]);
      return closed_form(e, chart_, domain_);
    }
    MultiIndex total = pending_ + idx;
    if (total.total() > kMaxDerivativeOrder)
      throw OrderError("accumulated derivative order " + std::to_string(total.total()) + " exceeds " +
                       std::to_string(kMaxDerivativeOrder));
    ScalarField f = *this;
    f.pending_ = total;
    return f;
  }
  ScalarField d(std::string_view var, int times = 1) const {
    return differentiate(MultiIndex::unit(axis(var), times));
  }

  ScalarField sample_to_grid(const GridSpec& grid) const {
    std::vector<double> values(grid.size());
    if (grid.names() != chart_) throw Error("grid axes do not match the field chart");
    if (sampled_ && grid == sampled_->grid) {
      if (pending_.total() == 0) return *this;
      return sampled(grid, materialize());
    }
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < values.size(); ++i) {
      grid.node(i, x.data());
      if (closed_) {
        values[i] = evaluate(x.data());
      } else {
        try {
          values[i] = evaluate(x.data());
        } catch (const DomainError&) {
          values[i] = std::nan("");
        }
      }
    }
    return sampled(grid, std::move(values));
  }

  // Node values with the pending derivative applied; NaN where the stencil
  // has no support.
  std::vector<double> node_values() const {
    if (!sampled_) throw Error("closed-form field has no node values");
    return pending_.total() == 0 ? sampled_->values : materialize();
  }

  ScalarField rechart(std::vector<std::string> chart) const {
    if (!closed_) throw Error("cannot re-chart a sampled field");
    for (const auto& v : variables(closed_->expr))
      if (std::find(chart.begin(), chart.end(), v) == chart.end())
        throw Error("re-chart drops coordinate '" + v + "'");
    return closed_form(closed_->expr, std::move(chart), domain_);
  }

  ScalarField with_domain(const Domain& d) const {
    ScalarField f = *this;
    f.set_domain(sampled_ ? d.merged(domain_) : d);
    return f;
  }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return combine(a, b, Op::Add);
  }
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return combine(a, b, Op::Neg);
  }
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return combine(a, b, Op::Mul);
  }
  friend ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    return combine(a, b, Op::Div);
  }
  friend ScalarField operator-(const ScalarField& a) { return a * -1.0; }
  friend ScalarField operator*(const ScalarField& a, double c) {
    if (a.closed_) return closed_form(Expr(c) * a.expr(), a.chart_, a.domain_);
    ScalarField f = a;
    std::vector<double> v = a.sampled_->values;
    for (auto& x : v) x *= c;
    f.sampled_ = std::make_shared<const detail::SampledData>(detail::SampledData{a.sampled_->grid, std::move(v)});
    return f;
  }
  friend ScalarField operator*(double c, const ScalarField& a) { return a * c; }
  friend ScalarField operator+(const ScalarField& a, double c) { return a + a.lift(c); }
  friend ScalarField operator+(double c, const ScalarField& a) { return a.lift(c) + a; }
  friend ScalarField operator-(const ScalarField& a, double c) { return a + a.lift(-c); }
  friend ScalarField operator-(double c, const ScalarField& a) { return a.lift(c) - a; }
  friend ScalarField operator/(const ScalarField& a, double c) { return a / a.lift(c); }
  friend ScalarField operator/(double c, const ScalarField& a) { return a.lift(c) / a; }

  friend ScalarField pow(const ScalarField& a, int n) {
    if (a.closed_) return closed_form(pow(a.expr(), n), a.chart_, a.domain_);
    std::vector<double> v = a.node_values();
    for (auto& x : v) x = std::pow(x, n);
    return sampled(a.grid(), std::move(v)).with_domain(a.domain_);
  }

 private:
  struct Closed {
    Expr expr;
    Tape tape;
  };

  ScalarField lift(double c) const { return constant(c, chart_); }

  void set_domain(const Domain& d) {
    domain_ = d;
    check_ = DomainCheck(d, chart_);
  }

  static ScalarField combine(const ScalarField& a0, const ScalarField& b0, Op op) {
    ScalarField a = a0, b = b0;
    if (a.chart_ != b.chart_) {
      if (a.is_constant()) a = a.rechart(b.chart_);
      else if (b.is_constant()) b = b.rechart(a.chart_);
      else throw Error("fields live on different charts");
    }
    Domain dom = a.domain_.merged(b.domain_);
    if (a.closed_ && b.closed_) {
      Expr x = a.expr(), y = b.expr(), r;
      switch (op) {
        case Op::Add: r = x + y; break;
        case Op::Neg: r = x - y; break;
        case Op::Mul: r = x * y; break;
        default: r = x / y; break;
      }
      return closed_form(r, a.chart_, dom);
    }
    const GridSpec& grid = a.sampled_ ? a.sampled_->grid : b.sampled_->grid;
    if (a.sampled_ && b.sampled_ && !(a.sampled_->grid == b.sampled_->grid))
      throw Error("sampled fields live on different grids");
    std::vector<double> x = a.sample_to_grid(grid).node_values();
    std::vector<double> y = b.sample_to_grid(grid).node_values();
    for (std::size_t i = 0; i < x.size(); ++i) {
      switch (op) {
        case Op::Add: x[i] += y[i]; break;
        case Op::Neg: x[i] -= y[i]; break;
        case Op::Mul: x[i] *= y[i]; break;
        default: x[i] = y[i] == 0.0 ? std::nan("") : x[i] / y[i]; break;
      }
    }
    return sampled(grid, std::move(x)).with_domain(dom);
  }

  // Value at a node with the pending stencil applied; NaN when the stencil
  // leaves the grid or touches an unsupported node.
  double node_value(const std::vector<long>& idx,
                    const std::vector<std::vector<std::pair<long, double>>>& stencils) const {
    const GridSpec& g = sampled_->grid;
    double acc = 0.0;
    bool bad = false;
    std::vector<std::vector<std::pair<long, double>>> lists(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) {
      for (const auto& [off, w] : stencils[a]) {
        long k = idx[a] + off;
        if (k < 0 || k >= static_cast<long>(g.axes()[a].count)) bad = true;
        lists[a].emplace_back(k, w);
      }
    }
    if (bad) return std::nan("");
    detail::for_each_product(lists, [&](const std::vector<long>& k, double w) {
      std::size_t flat = 0;
      for (std::size_t a = 0; a < g.dim(); ++a) flat += static_cast<std::size_t>(k[a]) * g.stride(a);
      double v = sampled_->values[flat];
      if (std::isnan(v)) bad = true;
      acc += w * v;
    });
    return bad ? std::nan("") : acc;
  }

  std::vector<std::vector<std::pair<long, double>>> stencils() const {
    const GridSpec& g = sampled_->grid;
    std::vector<std::vector<std::pair<long, double>>> s(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a)
      for (const auto& [o, w] : detail::stencil_weights(pending_[static_cast<int>(a)], g.axes()[a].spacing()))
        s[a].emplace_back(o, w);
    return s;
  }

  double sampled_value(const double* p) const {
    const GridSpec& g = sampled_->grid;
    auto st = stencils();
    std::vector<std::vector<std::pair<long, double>>> lists(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) {
      const Axis& ax = g.axes()[a];
      const long n = static_cast<long>(ax.count);
      double s = (p[a] - ax.min) / ax.spacing();
      double r = std::nearbyint(s);
      if (std::abs(s - r) < 1e-9) {
        lists[a].emplace_back(static_cast<long>(r), 1.0);
        continue;
      }
      long start = std::clamp(static_cast<long>(std::floor(s)) - 1, 0L, n - 4);
      for (long i = 0; i < 4; ++i) {
        double w = 1.0;
        for (long j = 0; j < 4; ++j)
          if (j != i) w *= (s - static_cast<double>(start + j)) / static_cast<double>(i - j);
        lists[a].emplace_back(start + i, w);
      }
    }
    double acc = 0.0;
    detail::for_each_product(lists, [&](const std::vector<long>& idx, double w) {
      acc += w * node_value(idx, st);
    });
    if (std::isnan(acc)) throw DomainError("stencil has no support here (too close to the grid boundary)");
    return acc;
  }

  std::vector<double> materialize() const {
    const GridSpec& g = sampled_->grid;
    auto st = stencils();
    std::vector<double> out(g.size());
    std::vector<std::size_t> ui(g.dim());
    std::vector<long> idx(g.dim());
    for (std::size_t i = 0; i < out.size(); ++i) {
      g.unflatten(i, ui.data());
      for (std::size_t a = 0; a < g.dim(); ++a) idx[a] = static_cast<long>(ui[a]);
      out[i] = node_value(idx, st);
    }
    return out;
  }

  std::vector<std::string> chart_;
  Domain domain_;
  DomainCheck check_;
  std::shared_ptr<const Closed> closed_;
  std::shared_ptr<const detail::SampledData> sampled_;
  MultiIndex pending_;
};

}  // namespace asdnk
