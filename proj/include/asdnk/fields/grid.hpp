#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/expr.hpp"

namespace asdnk {

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::size_t count = 0;

  double spacing() const { return (max - min) / static_cast<double>(count - 1); }
  double node(std::size_t i) const {
    return i + 1 == count ? max : min + static_cast<double>(i) * spacing();
  }
  bool operator==(const Axis&) const = default;
};

inline constexpr std::size_t kMinGridPoints = 9;

// Tensor-product grid, row-major: the last axis varies fastest.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw DegenerateError("grid has no axes");
    for (const auto& a : axes_) {
      if (a.count < kMinGridPoints)
        throw DegenerateError("grid axis '" + a.name + "' has " + std::to_string(a.count) +
                              " points; at least " + std::to_string(kMinGridPoints) + " required");
      if (!(a.max > a.min)) throw DegenerateError("grid axis '" + a.name + "' has empty extent");
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t i = axes_.size() - 1; i-- > 0;) strides_[i] = strides_[i + 1] * axes_[i + 1].count;
  }

  // "x:-1:1:33,y:-1:1:33"
  static GridSpec parse(const std::string& spec) {
    std::vector<Axis> axes;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::vector<std::string> parts;
      std::stringstream is(item);
      std::string p;
      while (std::getline(is, p, ':')) parts.push_back(p);
      if (parts.size() != 4) throw Error("bad axis spec '" + item + "' (want name:min:max:count)");
      Axis a;
      a.name = trim(parts[0]);
      try {
        a.min = std::stod(parts[1]);
        a.max = std::stod(parts[2]);
        long n = std::stol(parts[3]);
        if (n < 0) throw Error("negative count");
        a.count = static_cast<std::size_t>(n);
      } catch (const std::logic_error&) {
        throw Error("bad number in axis spec '" + item + "'");
      }
      axes.push_back(a);
    }
    return GridSpec(std::move(axes));
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (i) s += ',';
      s += axes_[i].name + ":" + format_number(axes_[i].min) + ":" + format_number(axes_[i].max) + ":" +
           std::to_string(axes_[i].count);
    }
    return s;
  }

  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t dim() const { return axes_.size(); }
  std::size_t stride(std::size_t i) const { return strides_[i]; }
  std::size_t size() const { return axes_.empty() ? 0 : strides_[0] * axes_[0].count; }
  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& a : axes_) n.push_back(a.name);
    return n;
  }

  void unflatten(std::size_t flat, std::size_t* idx) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      idx[i] = flat / strides_[i];
      flat %= strides_[i];
    }
  }
  void node(std::size_t flat, double* x) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      std::size_t k = flat / strides_[i];
      flat %= strides_[i];
      x[i] = axes_[i].node(k);
    }
  }

  bool operator==(const GridSpec& o) const { return axes_ == o.axes_; }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
};

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Header "# axes: <spec>", then one line per run of the last axis.
inline void write_csv(std::ostream& os, const GridSpec& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw Error("value count does not match grid");
  os << "# axes: " << grid.to_string() << "\n";
  std::size_t row = grid.axes().back().count;
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << format_g17(values[i]) << ((i + 1) % row == 0 ? "\n" : ",");
  }
}

inline std::pair<GridSpec, std::vector<double>> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# axes:", 0) != 0) throw Error("missing '# axes:' header");
  GridSpec grid = GridSpec::parse(line.substr(7));
  std::vector<double> values;
  values.reserve(grid.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        values.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
      } catch (const std::logic_error&) {
        throw Error("bad CSV value '" + cell + "'");
      }
    }
  }
  if (values.size() != grid.size())
    throw Error("CSV has " + std::to_string(values.size()) + " values, grid needs " +
                std::to_string(grid.size()));
  return {grid, values};
}

}  // namespace asdnk
