#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "qsm/errors.hpp"

namespace qsm {

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  /// Neighbourhoods of flagged singular points that were left out.
  std::vector<Interval> excised;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_levels = 20;
  long max_evaluations = 4'000'000;
};

/// Where to cut the integration range. Breakpoints only split the range
/// (use them for kinks); singular points additionally have the open
/// neighbourhood (x - excision, x + excision) removed.
struct QuadPartition {
  std::vector<double> breakpoints;
  std::vector<double> singular_points;
  double excision = 1e-6;
};

namespace numerics {
namespace detail {

// 15-point Kronrod rule with its embedded 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  int level;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel kronrod15(F& f, double lo, double hi, int level) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) throw NumericalError("adaptive_quad: integrand is not finite");
    return y;
  };
  const double fc = eval(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[static_cast<std::size_t>(j)];
    const double pair = eval(centre - dx) + eval(centre + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(j)] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(j / 2)] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss), level};
}

/// Splits [a, b] into the panels to integrate, excising singular
/// neighbourhoods and grading the panels geometrically towards them.
inline std::vector<Interval> initial_panels(double a, double b, const QuadPartition& part,
                                            std::vector<Interval>& excised) {
  std::vector<double> cuts = {a, b};
  std::vector<Interval> holes;
  for (double x : part.singular_points) {
    if (x + part.excision <= a || x - part.excision >= b) continue;
    holes.push_back({std::max(a, x - part.excision), std::min(b, x + part.excision)});
    for (double step = 4.0 * part.excision; step < (b - a); step *= 4.0) {
      cuts.push_back(x - step);
      cuts.push_back(x + step);
    }
    cuts.push_back(x - part.excision);
    cuts.push_back(x + part.excision);
  }
  for (double x : part.breakpoints) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());

  std::sort(holes.begin(), holes.end(), [](auto& l, auto& r) { return l.lo < r.lo; });
  for (const auto& h : holes) {
    if (!excised.empty() && h.lo <= excised.back().hi)
      excised.back().hi = std::max(excised.back().hi, h.hi);
    else
      excised.push_back(h);
  }
  auto inside_hole = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    return std::any_of(excised.begin(), excised.end(),
                       [&](const Interval& h) { return mid > h.lo && mid < h.hi; });
  };

  std::vector<Interval> panels;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i]);
    const double hi = std::min(b, cuts[i + 1]);
    if (hi <= lo || inside_hole(lo, hi)) continue;
    panels.push_back({lo, hi});
  }
  return panels;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
/// The panel with the largest error estimate is bisected until the summed
/// estimate is below max(abs_tol, rel_tol * |value|). A panel that has been
/// bisected `max_levels` times is not refined further; if the tolerance is
/// still unmet once only such panels remain, ToleranceNotMet is thrown.
template <class F>
QuadratureResult adaptive_quad(F&& f, double a, double b, const QuadOptions& opts = {},
                               const QuadPartition& partition = {}) {
  if (!(a <= b)) throw DomainError("adaptive_quad: requires a <= b");
  QuadratureResult result;
  if (a == b) {
    result.evaluations = 1;
    return result;
  }

  std::priority_queue<detail::Panel> active;
  std::vector<detail::Panel> frozen;
  long evaluations = 0;
  double value = 0.0;
  double error = 0.0;
  for (const auto& iv : detail::initial_panels(a, b, partition, result.excised)) {
    auto panel = detail::kronrod15(f, iv.lo, iv.hi, 0);
    evaluations += 15;
    value += panel.value;
    error += panel.error;
    active.push(panel);
  }

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };
  while (error > target()) {
    if (active.empty() || evaluations >= opts.max_evaluations)
      throw ToleranceNotMet("adaptive_quad: refinement budget exhausted");
    auto worst = active.top();
    active.pop();
    if (worst.level >= opts.max_levels) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::kronrod15(f, worst.lo, mid, worst.level + 1);
    auto right = detail::kronrod15(f, mid, worst.hi, worst.level + 1);
    evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }

  // Re-sum from the panels to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (; !active.empty(); active.pop()) {
    value += active.top().value;
    error += active.top().error;
  }
  for (const auto& p : frozen) {
    value += p.value;
    error += p.error;
  }
  result.value = value;
  result.error_estimate = error;
  result.evaluations = static_cast<int>(std::max<long>(evaluations, 1));
  return result;
}

}  // namespace numerics
}  // namespace qsm
