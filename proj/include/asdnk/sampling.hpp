#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/domain.hpp"

namespace asdnk {

inline double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Halton points with a seeded Cranley-Patterson shift, mapped into the
// domain box; points inside excluded bands are skipped. Every chart
// coordinate must be bounded.
inline std::vector<std::vector<double>> sample_points(const Domain& domain,
                                                      const std::vector<std::string>& chart,
                                                      std::size_t n, std::uint64_t seed) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (chart.size() > std::size(kPrimes)) throw Error("too many coordinates for sampling");
  std::vector<Interval> box;
  for (const auto& c : chart) {
    auto iv = domain.interval(c);
    if (!iv) throw Error("cannot sample: coordinate '" + c + "' is unbounded");
    box.push_back(*iv);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> shift(chart.size());
  for (auto& s : shift) s = uni(rng);

  DomainCheck check(domain, chart);
  std::vector<std::vector<double>> out;
  std::vector<double> p(chart.size());
  for (std::uint64_t i = 1; out.size() < n; ++i) {
    if (i > 1000 * (n + 10)) throw Error("domain is (almost) entirely excluded");
    for (std::size_t d = 0; d < chart.size(); ++d) {
      double u = radical_inverse(i, kPrimes[d]) + shift[d];
      u -= static_cast<double>(static_cast<long>(u));
      p[d] = box[d].lo + u * (box[d].hi - box[d].lo);
    }
    try {
      check.check(p.data());
    } catch (const DomainError&) {
      continue;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace asdnk
