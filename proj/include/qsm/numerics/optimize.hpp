#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qsm/errors.hpp"

namespace qsm {

struct ScalarMinimum {
  double argmin;
  double value;
};

namespace numerics {

/// Golden-section search on [lo, hi]. Assumes f is unimodal there; the
/// bracket is shrunk until it is narrower than tol.
template <class F>
ScalarMinimum minimize_scalar(F&& f, double lo, double hi, double tol = 1e-10) {
  if (!(lo < hi)) throw DomainError("minimize_scalar: requires lo < hi");
  if (!(tol > 0.0)) throw DomainError("minimize_scalar: tol must be positive");
  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) throw NumericalError("minimize_scalar: objective is not finite");
    return y;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  // The end points can win when the minimum sits on the boundary.
  ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
  for (double x : {lo, hi}) {
    if (x < a - tol || x > b + tol) continue;
    const double fx = eval(x);
    if (fx < best.value) best = {x, fx};
  }
  return best;
}

/// Brent's method on a sign-changing bracket. Stops once |f(root)| <= tol
/// or the bracket is narrower than tol.
template <class F>
double find_root(F&& f, double lo, double hi, double tol = 1e-12) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) throw NumericalError("find_root: f is not finite at the bracket");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NoSignChange("find_root: f(lo) and f(hi) have the same sign");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol1 || std::abs(fb) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (m > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if (!std::isfinite(fb)) throw NumericalError("find_root: f is not finite inside the bracket");
  }
  throw NoConvergence("find_root: iteration cap reached");
}

/// Every sign change of f on a uniform scan of [lo, hi], refined by Brent.
template <class F>
std::vector<double> find_roots(F&& f, double lo, double hi, int scan_points = 512, double tol = 1e-14) {
  std::vector<double> roots;
  if (!(lo < hi)) return roots;
  const double h = (hi - lo) / scan_points;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= scan_points; ++i) {
    const double x1 = i == scan_points ? hi : lo + i * h;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      if (roots.empty() || roots.back() != x0) roots.push_back(x0);
    } else if (f1 != 0.0 && (f0 > 0.0) != (f1 > 0.0)) {
      roots.push_back(find_root(f, x0, x1, tol));
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0 && (roots.empty() || roots.back() != x0)) roots.push_back(x0);
  return roots;
}

}  // namespace numerics
}  // namespace qsm
