#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "qsm/numerics/optimize.hpp"
#include "qsm/numerics/quadrature.hpp"
#include "qsm/numerics/spectral.hpp"
#include "qsm/quantum/generator.hpp"
#include "qsm/semimarkov/process.hpp"

namespace qsm {

enum class SssMode {
  /// Deviation from a caller-chosen constant rate (default 0, the identity map).
  PaperReference,
  /// Deviation minimised over constant rates in [0, gamma_max].
  TrueMinimum,
};

enum class SssForm {
  /// (1/T) int |gamma(t) - gamma_ref| dt
  RateForm,
  /// (1/T) int || chi_L(t) - chi_L || dt with trace norm on Choi matrices
  ChoiForm,
};

struct SssConfig {
  double horizon = 1.0;
  SssMode mode = SssMode::PaperReference;
  SssForm form = SssForm::RateForm;
  /// Reference rate used in PaperReference mode.
  double reference_rate = 0.0;
  /// Upper end of the TrueMinimum search; unset means 10 max_t gamma(t).
  std::optional<double> gamma_max;
  /// Half-width of the neighbourhood removed around each rate singularity.
  double excision = 1e-6;
  QuadOptions quad{};
};

/// Generators c gamma (J - 1) of one jump structure, indexed by the rate.
struct GeneratorFamily {
  Eigen::Index dim = 2;
  JumpStructure structure = JumpStructure::ClockDephasing;
  RateNormalization normalization = RateNormalization::PerDimension;

  GeneratorSnapshot at(double rate) const { return {dim, rate, structure, normalization}; }
};

struct MeasureResult {
  /// Time-averaged deviation. In Choi form this is the raw trace-norm integral.
  double xi = 0.0;
  /// xi / (1 + xi)
  double zeta = 0.0;
  double gamma_ref = 0.0;
  /// ||chi_L(gamma=1)||, computed from the family; 1 in rate form.
  double family_constant = 1.0;
  double error_estimate = 0.0;
  std::vector<Interval> excised;
  SssConfig config;

  /// xi divided by the family constant, comparable with the rate form.
  double xi_normalized() const { return xi / family_constant; }
};

namespace measures {

inline double normalized_measure(double xi) { return xi / (1.0 + xi); }

namespace detail {

/// [0, T] without the excised neighbourhoods of the singular points.
inline std::vector<Interval> regular_segments(double horizon, const std::vector<double>& singular, double eps) {
  std::vector<Interval> out;
  double lo = 0.0;
  std::vector<double> sorted = singular;
  std::sort(sorted.begin(), sorted.end());
  for (double x : sorted) {
    if (x + eps <= 0.0 || x - eps >= horizon) continue;
    if (x - eps > lo) out.push_back({lo, x - eps});
    lo = std::max(lo, x + eps);
  }
  if (horizon > lo) out.push_back({lo, horizon});
  return out;
}

/// Evaluates the time-averaged deviation of one integrand family at a
/// reference rate, splitting the range where gamma(t) crosses it.
class DeviationIntegral {
 public:
  using Integrand = std::function<double(double t, double rate_t, double reference)>;

  DeviationIntegral(std::function<double(double)> rate, Integrand integrand, const SssConfig& cfg,
                    std::vector<double> singular)
      : rate_(std::move(rate)), integrand_(std::move(integrand)), cfg_(cfg), singular_(std::move(singular)) {
    segments_ = regular_segments(cfg.horizon, singular_, cfg.excision);
  }

  const std::vector<Interval>& segments() const { return segments_; }

  QuadratureResult operator()(double reference, const QuadOptions& quad) const {
    QuadPartition part;
    part.singular_points = singular_;
    part.excision = cfg_.excision;
    auto shifted = [&](double t) { return rate_(t) - reference; };
    for (const auto& seg : segments_) {
      const auto roots = numerics::find_roots(shifted, seg.lo, seg.hi, 256);
      part.breakpoints.insert(part.breakpoints.end(), roots.begin(), roots.end());
    }
    auto f = [&](double t) { return integrand_(t, rate_(t), reference); };
    auto r = numerics::adaptive_quad(f, 0.0, cfg_.horizon, quad, part);
    r.value /= cfg_.horizon;
    r.error_estimate /= cfg_.horizon;
    return r;
  }

  /// Rates sampled at midpoints of a uniform partition of the segments.
  std::vector<double> sample_rates(std::size_t count) const {
    double total = 0.0;
    for (const auto& s : segments_) total += s.length();
    std::vector<double> out;
    if (total <= 0.0) return out;
    for (const auto& s : segments_) {
      const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(count * s.length() / total));
      for (std::size_t i = 0; i < n; ++i) out.push_back(rate_(s.lo + (i + 0.5) * s.length() / n));
    }
    return out;
  }

 private:
  std::function<double(double)> rate_;
  Integrand integrand_;
  SssConfig cfg_;
  std::vector<double> singular_;
  std::vector<Interval> segments_;
};

inline void validate(const SssConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw DomainError("SssConfig: horizon must be positive");
  if (!(cfg.excision > 0.0)) throw DomainError("SssConfig: excision must be positive");
  if (cfg.gamma_max && !(*cfg.gamma_max >= 0.0)) throw DomainError("SssConfig: gamma_max must be non-negative");
}

/// Minimises the (convex) deviation over reference rates in [0, gamma_max].
/// The sampled median of gamma(t) seeds a narrow bracket; the golden-section
/// search falls back to the whole interval if that bracket does not hold
/// the minimum.
inline double minimize_reference(const DeviationIntegral& dev, const SssConfig& cfg, const QuadOptions& quad) {
  auto samples = dev.sample_rates(4096);
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double top = std::max(0.0, samples.back());
  const double gamma_max = cfg.gamma_max.value_or(10.0 * top);
  if (gamma_max <= 0.0) return 0.0;

  auto objective = [&](double c) { return dev(c, quad).value; };
  const double tol = 1e-10 * std::max(1.0, gamma_max);

  const std::size_t mid = samples.size() / 2;
  const std::size_t width = std::max<std::size_t>(8, samples.size() / 64);
  double lo = std::clamp(samples[mid >= width ? mid - width : 0], 0.0, gamma_max);
  double hi = std::clamp(samples[std::min(samples.size() - 1, mid + width)], 0.0, gamma_max);
  const double centre = std::clamp(samples[mid], 0.0, gamma_max);
  // Widen degenerate brackets (e.g. constant rates) by a little.
  const double pad = 1e-6 * std::max(1.0, gamma_max);
  lo = std::max(0.0, std::min(lo, centre - pad));
  hi = std::min(gamma_max, std::max(hi, centre + pad));

  const double f_centre = objective(centre);
  const bool lo_ok = lo == 0.0 || objective(lo) >= f_centre;
  const bool hi_ok = hi == gamma_max || objective(hi) >= f_centre;
  if (lo_ok && hi_ok && lo < hi) return numerics::minimize_scalar(objective, lo, hi, tol).argmin;
  return numerics::minimize_scalar(objective, 0.0, gamma_max, tol).argmin;
}

inline MeasureResult evaluate(const DeviationIntegral& dev, const SssConfig& cfg, double family_constant) {
  validate(cfg);
  MeasureResult out;
  out.config = cfg;
  out.family_constant = family_constant;
  if (cfg.mode == SssMode::TrueMinimum) {
    // The argmin is only as sharp as the objective, so tighten the quadrature.
    QuadOptions tight = cfg.quad;
    tight.abs_tol = std::min(tight.abs_tol, 1e-13);
    tight.rel_tol = std::min(tight.rel_tol, 1e-12);
    out.gamma_ref = minimize_reference(dev, cfg, tight);
  } else {
    out.gamma_ref = cfg.reference_rate;
  }
  const auto r = dev(out.gamma_ref, cfg.quad);
  out.xi = r.value;
  out.error_estimate = r.error_estimate;
  out.excised = r.excised;
  out.zeta = normalized_measure(out.xi);
  return out;
}

}  // namespace detail

/// SSS measure from a scalar rate: xi = (1/T) int_0^T |gamma(t) - gamma_ref| dt.
inline MeasureResult sss_rate_form(std::function<double(double)> rate, const SssConfig& cfg,
                                   std::vector<double> singular_points = {}) {
  detail::validate(cfg);
  auto integrand = [](double, double rate_t, double reference) { return std::abs(rate_t - reference); };
  detail::DeviationIntegral dev(std::move(rate), integrand, cfg, std::move(singular_points));
  auto out = detail::evaluate(dev, cfg, 1.0);
  out.config.form = SssForm::RateForm;
  return out;
}

/// ||chi_L(gamma=1)||: by linearity the Choi-form integrand equals this
/// constant times |gamma(t) - gamma_ref|.
inline double family_constant(const GeneratorFamily& family) {
  return numerics::trace_norm(quantum::choi_of_generator(family.at(1.0)).matrix());
}

/// SSS measure evaluated on Choi matrices of the generators themselves.
inline MeasureResult sss_choi_form(std::function<double(double)> rate, const GeneratorFamily& family,
                                   const SssConfig& cfg, std::vector<double> singular_points = {}) {
  detail::validate(cfg);
  auto integrand = [family](double, double rate_t, double reference) {
    const ComplexMatrix diff = quantum::choi_of_generator(family.at(rate_t)).matrix() -
                               quantum::choi_of_generator(family.at(reference)).matrix();
    return numerics::trace_norm(diff);
  };
  detail::DeviationIntegral dev(std::move(rate), integrand, cfg, std::move(singular_points));
  auto out = detail::evaluate(dev, cfg, family_constant(family));
  out.config.form = SssForm::ChoiForm;
  return out;
}

template <TimeLocalProcess Process>
MeasureResult sss_rate_form(const Process& proc, const SssConfig& cfg) {
  return sss_rate_form([&proc](double t) { return proc.rate(t); }, cfg, proc.singular_times(0.0, cfg.horizon));
}

template <TimeLocalProcess Process>
MeasureResult sss_choi_form(const Process& proc, const SssConfig& cfg,
                            RateNormalization normalization = RateNormalization::PerDimension) {
  const GeneratorFamily family{proc.dim(), proc.jump_structure(), normalization};
  return sss_choi_form([&proc](double t) { return proc.rate(t); }, family, cfg,
                       proc.singular_times(0.0, cfg.horizon));
}

/// Dispatches on cfg.form.
template <TimeLocalProcess Process>
MeasureResult sss_measure(const Process& proc, const SssConfig& cfg,
                          RateNormalization normalization = RateNormalization::PerDimension) {
  return cfg.form == SssForm::ChoiForm ? sss_choi_form(proc, cfg, normalization) : sss_rate_form(proc, cfg);
}

}  // namespace measures
}  // namespace qsm
