#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsm/numerics/quadrature.hpp"

namespace qsm::io {

/// Column-oriented result of one CLI command plus everything the emitters
/// need to describe it.
struct Table {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  /// Free-form notes, emitted in insertion order.
  std::vector<std::pair<std::string, std::string>> notes;
  std::vector<Interval> excised;
  std::vector<double> singularities;

  // Plot description for the SVG emitter.
  std::string title;
  std::string x_label;
  std::string y_label;
  std::size_t x_column = 0;
  /// Columns drawn as series; empty means every column except x.
  std::vector<std::size_t> series;
  /// Fixed y window; values outside are clamped to the frame.
  std::optional<std::pair<double, double>> y_range;

  std::size_t add_column(std::string name, std::vector<double> values) {
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
    return columns.size() - 1;
  }

  void note(std::string key, std::string value) { notes.emplace_back(std::move(key), std::move(value)); }

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  std::vector<std::size_t> plotted() const {
    if (!series.empty()) return series;
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (c != x_column) out.push_back(c);
    return out;
  }
};

/// 12 significant digits; non-finite values spelled nan / inf / -inf.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_intervals(const std::vector<Interval>& xs) {
  std::string s;
  for (const auto& x : xs) {
    if (!s.empty()) s += ';';
    s += '[' + format_number(x.lo) + ',' + format_number(x.hi) + ']';
  }
  return s;
}

inline std::string format_list(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) {
    if (!s.empty()) s += ';';
    s += format_number(x);
  }
  return s;
}

}  // namespace qsm::io
