#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "qsm/io/csv.hpp"
#include "qsm/io/table.hpp"

namespace qsm::io {

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::pair<double, double> padded(double lo, double hi) {
  if (!(hi > lo)) {
    const double w = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - w, hi + w};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace detail

/// Single-panel line chart: axes with ticks, one polyline per series, a
/// legend, and the CSV form of the table inside <metadata>. Series are broken
/// at non-finite values and clamped to `y_range` when one is set.
inline void write_svg(std::ostream& os, const Table& t) {
  constexpr double width = 720, height = 480;
  constexpr double left = 80, right = 160, top = 40, bottom = 60;
  constexpr double pw = width - left - right, ph = height - top - bottom;
  static constexpr std::array<const char*, 6> palette = {"#1f77b4", "#d95f02", "#2ca02c",
                                                         "#9467bd", "#8c564b", "#e7298a"};

  const auto& xs = t.columns.at(t.x_column);
  const auto series = t.plotted();
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (double x : xs)
    if (std::isfinite(x)) x_lo = std::min(x_lo, x), x_hi = std::max(x_hi, x);
  if (t.y_range) {
    y_lo = t.y_range->first;
    y_hi = t.y_range->second;
  } else {
    for (auto c : series)
      for (double y : t.columns[c])
        if (std::isfinite(y)) y_lo = std::min(y_lo, y), y_hi = std::max(y_hi, y);
    std::tie(y_lo, y_hi) = detail::padded(y_lo, y_hi);
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1;
  if (!std::isfinite(y_lo)) y_lo = 0, y_hi = 1;
  if (!(x_hi > x_lo)) std::tie(x_lo, x_hi) = detail::padded(x_lo, x_hi);

  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return top + (y_hi - std::clamp(y, y_lo, y_hi)) / (y_hi - y_lo) * ph; };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<metadata><![CDATA[\n" << to_csv(t) << "]]></metadata>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!t.title.empty())
    os << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << detail::xml_escape(t.title) << "</text>\n";

  // Frame and ticks.
  os << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
     << "\" height=\"" << ph << "\"/></g>\n";
  os << "<g class=\"ticks\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 5.0, yv = y_lo + (y_hi - y_lo) * k / 5.0;
    const double xp = px(xv), yp = py(yv);
    os << "<line x1=\"" << xp << "\" y1=\"" << top + ph << "\" x2=\"" << xp << "\" y2=\"" << top + ph + 5
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << xp << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << detail::short_number(xv)
       << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << yp << "\" x2=\"" << left << "\" y2=\"" << yp
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << left - 8 << "\" y=\"" << yp + 4 << "\" text-anchor=\"end\">" << detail::short_number(yv)
       << "</text>\n";
  }
  if (y_lo < 0 && y_hi > 0)
    os << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left + pw << "\" y2=\"" << py(0)
       << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  os << "</g>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">"
     << detail::xml_escape(t.x_label.empty() ? t.names[t.x_column] : t.x_label) << "</text>\n";
  os << "<text transform=\"translate(20," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << detail::xml_escape(t.y_label) << "</text>\n";

  // One polyline per series, split where values are missing.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& ys = t.columns[series[i]];
    const char* colour = palette[i % palette.size()];
    os << "<g class=\"series\" data-name=\"" << detail::xml_escape(t.names[series[i]]) << "\">\n";
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << points
           << "\"/>\n";
      points.clear();
    };
    for (std::size_t r = 0; r < ys.size(); ++r) {
      if (!std::isfinite(ys[r]) || !std::isfinite(xs[r])) {
        flush();
        continue;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", points.empty() ? "" : " ", px(xs[r]), py(ys[r]));
      points += buf;
    }
    flush();
    os << "</g>\n";
    const double ly = top + 12 + 18 * static_cast<double>(i);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
       << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << detail::xml_escape(t.names[series[i]])
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace qsm::io
