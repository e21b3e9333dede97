#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/expr.hpp"

namespace asdnk {

inline constexpr double kBandHalfWidth = 0.05;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ExcludedBand {
  std::string coordinate;
  double center = 0.0;
  double half_width = kBandHalfWidth;
};

// A coordinate box (possibly unbounded in some coordinates) minus a set of
// slabs around singular loci. Keyed by coordinate name so the same domain
// can be attached to fields on different charts.
class Domain {
 public:
  Domain& bound(const std::string& coord, double lo, double hi) {
    if (!(hi > lo)) throw Error("empty interval for coordinate '" + coord + "'");
    box_[coord] = {lo, hi};
    return *this;
  }
  Domain& exclude(const std::string& coord, double center, double half_width = kBandHalfWidth) {
    bands_.push_back({coord, center, half_width});
    return *this;
  }

  const std::map<std::string, Interval>& box() const { return box_; }
  const std::vector<ExcludedBand>& bands() const { return bands_; }

  std::optional<Interval> interval(const std::string& coord) const {
    auto it = box_.find(coord);
    if (it == box_.end()) return std::nullopt;
    return it->second;
  }

  // Intersection: boxes are intersected and bands accumulated.
  Domain merged(const Domain& o) const {
    Domain r = *this;
    for (const auto& [c, iv] : o.box_) {
      auto it = r.box_.find(c);
      if (it == r.box_.end()) {
        r.box_[c] = iv;
      } else {
        it->second.lo = std::max(it->second.lo, iv.lo);
        it->second.hi = std::min(it->second.hi, iv.hi);
      }
    }
    for (const auto& b : o.bands_) {
      bool dup = false;
      for (const auto& a : r.bands_)
        dup |= a.coordinate == b.coordinate && a.center == b.center && a.half_width == b.half_width;
      if (!dup) r.bands_.push_back(b);
    }
    return r;
  }

  bool operator==(const Domain& o) const {
    if (box_.size() != o.box_.size() || bands_.size() != o.bands_.size()) return false;
    for (const auto& [c, iv] : box_) {
      auto it = o.box_.find(c);
      if (it == o.box_.end() || it->second.lo != iv.lo || it->second.hi != iv.hi) return false;
    }
    for (std::size_t i = 0; i < bands_.size(); ++i)
      if (bands_[i].coordinate != o.bands_[i].coordinate || bands_[i].center != o.bands_[i].center ||
          bands_[i].half_width != o.bands_[i].half_width)
        return false;
    return true;
  }

 private:
  std::map<std::string, Interval> box_;
  std::vector<ExcludedBand> bands_;
};

// Domain constraints resolved against a chart for fast per-point checks.
class DomainCheck {
 public:
  DomainCheck() = default;
  DomainCheck(const Domain& d, const std::vector<std::string>& chart) {
    for (std::size_t i = 0; i < chart.size(); ++i) {
      if (auto iv = d.interval(chart[i])) bounds_.push_back({static_cast<int>(i), iv->lo, iv->hi});
      for (const auto& b : d.bands())
        if (b.coordinate == chart[i])
          bands_.push_back({static_cast<int>(i), b.center - b.half_width, b.center + b.half_width});
    }
    chart_ = chart;
  }

  void check(const double* p) const {
    for (const auto& b : bounds_) {
      double slack = 1e-12 * std::max(1.0, std::abs(b.lo) + std::abs(b.hi));
      if (!(p[b.index] >= b.lo - slack && p[b.index] <= b.hi + slack))
        throw DomainError("point outside domain: " + chart_[b.index] + " = " + format_number(p[b.index]) +
                          " not in [" + format_number(b.lo) + ", " + format_number(b.hi) + "]");
    }
    for (const auto& b : bands_)
      if (p[b.index] > b.lo && p[b.index] < b.hi)
        throw DomainError("point inside excluded band: " + chart_[b.index] + " = " +
                          format_number(p[b.index]));
  }

 private:
  struct Range {
    int index;
    double lo, hi;
  };
  std::vector<Range> bounds_, bands_;
  std::vector<std::string> chart_;
};

}  // namespace asdnk
