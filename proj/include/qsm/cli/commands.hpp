#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qsm/io/csv.hpp"
#include "qsm/io/json_writer.hpp"
#include "qsm/io/svg.hpp"
#include "qsm/measures/blp.hpp"
#include "qsm/measures/divisibility.hpp"
#include "qsm/measures/holevo.hpp"
#include "qsm/measures/sss.hpp"
#include "qsm/numerics/volterra.hpp"
#include "qsm/semimarkov/dephasing.hpp"
#include "qsm/semimarkov/monte_carlo.hpp"
#include "qsm/semimarkov/projector.hpp"
#include "qsm/version.hpp"

namespace qsm::cli {

/// Everything a command can be configured with. Flags that a command does
/// not use are accepted and ignored.
struct Options {
  std::optional<double> s, p, lambda1, lambda2, lambda;
  std::string family = "dephasing";
  double T = 1.0;
  std::optional<double> t_max;
  std::size_t grid = 500;
  std::string mode = "paper";
  std::string form = "rate";
  double epsilon = 1e-6;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::string out;

  std::optional<double> p_min, p_max;
  std::vector<double> p_list;
  bool boundary_search = false;
  std::string wtd = "exponential";
  double pi = 0.5;
  std::size_t paths = 100000;
  std::optional<double> dt;
  double gamma_ref = 0.0;
  Eigen::Index dim = 2;
  std::string normalization = "auto";
  std::string ensemble = "pm";
  unsigned threads = 0;
};

namespace detail {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return out;
}

/// Evaluates fn(0..n-1) on worker threads; results keep input order and the
/// first failure (by index) is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work);
    work();
  }
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

inline std::string label(const char* prefix, double v) { return std::string(prefix) + io::format_number(v); }

/// Resolves (lambda1, lambda2) into (s, p); the two parametrisations are
/// mutually exclusive.
inline void resolve_dephasing(Options& o, double default_s, double default_p) {
  if (o.lambda1 || o.lambda2) {
    if (!(o.lambda1 && o.lambda2)) throw DomainError("--lambda1 and --lambda2 must be given together");
    if (o.s || o.p) throw DomainError("--lambda1/--lambda2 cannot be combined with --s/--p");
    if (!(*o.lambda1 > 0.0 && *o.lambda2 > 0.0)) throw DomainError("--lambda1 and --lambda2 must be positive");
    o.s = *o.lambda1 + *o.lambda2;
    o.p = *o.lambda1 * *o.lambda2;
    o.lambda1.reset();
    o.lambda2.reset();
  }
  if (!o.s) o.s = default_s;
  if (!(*o.s > 0.0)) throw DomainError("--s must be positive");
  if (!o.p && default_p >= 0.0) o.p = default_p;
  if (o.p && !(*o.p >= 0.0)) throw DomainError("--p must be non-negative");
}

inline double lambda_or_default(const Options& o) {
  const double l = o.lambda.value_or(1.0);
  if (!(l > 0.0)) throw DomainError("--lambda must be positive");
  return l;
}

inline double positive(std::optional<double> v, double fallback, const char* flag) {
  const double x = v.value_or(fallback);
  if (!(x > 0.0)) throw DomainError(std::string(flag) + " must be positive");
  return x;
}

inline RateNormalization normalization_for(const Options& o, JumpStructure structure) {
  if (o.normalization == "unit") return RateNormalization::Unit;
  if (o.normalization == "per-dimension") return RateNormalization::PerDimension;
  // Dephasing is quoted with the 1/d convention, the projector family without it.
  return structure == JumpStructure::ClockDephasing ? RateNormalization::PerDimension : RateNormalization::Unit;
}

inline std::vector<double> p_sweep(const Options& o) {
  if (!o.p_list.empty()) return o.p_list;
  if (o.p && !o.p_min && !o.p_max) return {*o.p};
  const double lo = o.p_min.value_or(0.0), hi = o.p_max.value_or(0.5);
  if (!(lo >= 0.0 && hi >= lo)) throw DomainError("p sweep needs 0 <= --p-min <= --p-max");
  return linspace(lo, hi, o.grid);
}

inline void echo_dephasing(io::Table& t, const Options& o) {
  t.config["family"] = "dephasing";
  t.config["s"] = *o.s;
  if (o.p) t.config["p"] = *o.p;
}

}  // namespace detail

inline io::Table cmd_rate(Options o, std::ostream&) {
  io::Table t;
  t.command = "rate";
  const double t_max = detail::positive(o.t_max, 6.0, "--t-max");
  const auto times = detail::linspace(0.0, t_max, o.grid);
  t.x_label = "t";
  t.y_label = "gamma(t)";
  std::vector<double> gamma(times.size()), aux(times.size()), singular(times.size(), 0.0);

  if (o.family == "nonunital") {
    const double lambda = detail::lambda_or_default(o);
    const auto proc = semimarkov::nonunital(lambda);
    t.config["family"] = "nonunital";
    t.config["lambda"] = lambda;
    for (std::size_t k = 0; k < times.size(); ++k) {
      gamma[k] = proc.rate(times[k]);
      aux[k] = proc.survival(times[k]);
    }
    t.title = "Decay rate, lambda = " + io::format_number(lambda);
    t.add_column("t", times);
    t.add_column("gamma", gamma);
    t.add_column("survival", aux);
  } else {
    detail::resolve_dephasing(o, 1.0, 3.0);
    const DephasingSemiMarkov proc(*o.s, *o.p);
    detail::echo_dephasing(t, o);
    for (std::size_t k = 0; k < times.size(); ++k) {
      aux[k] = proc.q(times[k]);
      try {
        gamma[k] = proc.rate(times[k]);
      } catch (const Singularity&) {
        gamma[k] = std::nan("");
        singular[k] = 1.0;
      }
    }
    t.singularities = proc.singular_times(0.0, t_max);
    t.note("regime", to_string(proc.regime()));
    t.title = "Decay rate, s = " + io::format_number(*o.s) + ", p = " + io::format_number(*o.p);
    t.add_column("t", times);
    t.add_column("gamma", gamma);
    t.add_column("q", aux);
    t.add_column("singular", singular);
    if (!t.singularities.empty()) {
      // Keep the poles from flattening the rest of the curve.
      std::vector<double> finite;
      for (double g : gamma)
        if (std::isfinite(g)) finite.push_back(g);
      std::sort(finite.begin(), finite.end());
      const double lo = finite[finite.size() / 20], hi = finite[finite.size() - 1 - finite.size() / 20];
      const double pad = 0.5 * (hi - lo) + 1e-12;
      t.y_range = std::pair{lo - pad, hi + pad};
      t.note("svg_clip", "[" + io::format_number(lo - pad) + "," + io::format_number(hi + pad) + "]");
    }
  }
  t.config["t-max"] = t_max;
  t.config["grid"] = o.grid;
  t.series = {1};
  return t;
}

inline io::Table cmd_measure(Options o, std::ostream&) {
  io::Table t;
  t.command = "measure";
  SssConfig cfg;
  cfg.horizon = o.T;
  cfg.mode = o.mode == "min" ? SssMode::TrueMinimum : SssMode::PaperReference;
  cfg.form = o.form == "choi" ? SssForm::ChoiForm : SssForm::RateForm;
  cfg.reference_rate = o.gamma_ref;
  cfg.excision = o.epsilon;
  measures::detail::validate(cfg);
  const bool choi = cfg.form == SssForm::ChoiForm;

  auto evaluate = [&](const auto& proc) {
    const auto norm = detail::normalization_for(o, proc.jump_structure());
    if (!choi) return measures::sss_rate_form(proc, cfg);
    if (proc.jump_structure() == JumpStructure::ClockDephasing && o.dim != 2) {
      const GeneratorFamily family{o.dim, JumpStructure::ClockDephasing, norm};
      return measures::sss_choi_form([&proc](double x) { return proc.rate(x); }, family, cfg,
                                     proc.singular_times(0.0, cfg.horizon));
    }
    return measures::sss_choi_form(proc, cfg, norm);
  };

  std::vector<double> param, xi, zeta, gamma_ref, excised, extra;
  std::vector<MeasureResult> results;
  if (o.family == "nonunital") {
    const double lambda = detail::lambda_or_default(o);
    t.config["family"] = "nonunital";
    t.config["lambda"] = lambda;
    results.push_back(evaluate(semimarkov::nonunital(lambda)));
    param.push_back(lambda);
    // (1/T) int_0^T lambda tanh(lambda t) dt against the zero reference.
    const bool closed = cfg.mode == SssMode::PaperReference && cfg.reference_rate == 0.0;
    extra.push_back(closed ? std::log(std::cosh(lambda * cfg.horizon)) / cfg.horizon : std::nan(""));
  } else {
    detail::resolve_dephasing(o, 1.0, -1.0);
    const auto ps = detail::p_sweep(o);
    detail::echo_dephasing(t, o);
    t.config.erase("p");
    if (!o.p_list.empty()) {
      t.config["p-list"] = ps;
    } else if (ps.size() == 1) {
      t.config["p"] = ps[0];
    } else {
      t.config["p-min"] = ps.front();
      t.config["p-max"] = ps.back();
      t.config["grid"] = ps.size();
    }
    const double s = *o.s;
    for (double p : ps)
      if (!(p >= 0.0)) throw DomainError("p values must be non-negative");
    results = detail::parallel_map<MeasureResult>(ps.size(), o.threads,
                                                  [&](std::size_t i) { return evaluate(DephasingSemiMarkov(s, ps[i])); });
    param = ps;
    for (double p : ps) extra.push_back(p > s * s / 8.0 ? 1.0 : 0.0);
    t.note("cp_boundary", io::format_number(s * s / 8.0));
  }
  for (const auto& r : results) {
    xi.push_back(r.xi);
    zeta.push_back(r.zeta);
    gamma_ref.push_back(r.gamma_ref);
    double cut = 0.0;
    for (const auto& x : r.excised) cut += x.length();
    excised.push_back(cut);
    t.excised.insert(t.excised.end(), r.excised.begin(), r.excised.end());
  }

  const bool nonunital = o.family == "nonunital";
  t.add_column(nonunital ? "lambda" : "p", param);
  t.add_column("xi", xi);
  t.add_column("zeta", zeta);
  t.add_column("gamma_ref", gamma_ref);
  if (choi) {
    std::vector<double> normalized;
    for (const auto& r : results) normalized.push_back(r.xi_normalized());
    t.add_column("xi_normalized", normalized);
    t.note("family_constant", io::format_number(results.front().family_constant));
  }
  t.add_column(nonunital ? "closed_form" : "cp_indivisible", extra);
  t.add_column("excised", excised);

  t.config["T"] = cfg.horizon;
  t.config["mode"] = o.mode;
  t.config["form"] = o.form;
  if (cfg.mode == SssMode::PaperReference) t.config["gamma-ref"] = cfg.reference_rate;
  t.config["epsilon"] = cfg.excision;
  t.title = nonunital ? "SSS measure" : "SSS measure, s = " + io::format_number(*o.s);
  t.x_label = nonunital ? "lambda" : "p";
  t.y_label = "zeta";
  t.series = {2};
  return t;
}

inline io::Table cmd_holevo(Options o, std::ostream&) {
  if (o.family != "dephasing") throw UnsupportedVariant("only the dephasing family is supported");
  io::Table t;
  t.command = "holevo";
  detail::resolve_dephasing(o, 1.0, -1.0);
  const double s = *o.s;
  std::vector<double> ps = o.p_list;
  if (ps.empty()) ps = o.p ? std::vector<double>{*o.p} : std::vector<double>{2.0, 0.1, 0.01};
  for (double p : ps)
    if (!(p >= 0.0)) throw DomainError("p values must be non-negative");
  const double t_max = detail::positive(o.t_max, 6.0, "--t-max");
  const auto times = detail::linspace(0.0, t_max, o.grid);

  const HolevoEnsemble ensemble = o.ensemble == "z"
                                      ? HolevoEnsemble({DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)}, {0.5, 0.5})
                                      : HolevoEnsemble::plus_minus();
  const auto curves = detail::parallel_map<std::vector<double>>(ps.size(), o.threads, [&](std::size_t i) {
    std::vector<double> chi;
    for (const auto& pt : measures::holevo_curve(DephasingSemiMarkov(s, ps[i]), ensemble, times)) chi.push_back(pt.chi);
    return chi;
  });

  t.config["family"] = "dephasing";
  t.config["s"] = s;
  t.config["p"] = ps;
  t.config["t-max"] = t_max;
  t.config["grid"] = o.grid;
  t.config["ensemble"] = o.ensemble == "z" ? "z" : "pm";
  t.note("ensemble_states", o.ensemble == "z" ? "|0>,|1> equal weights" : "|+>,|-> equal weights");
  t.add_column("t", times);
  for (std::size_t i = 0; i < ps.size(); ++i) t.add_column(detail::label("chi_p=", ps[i]), curves[i]);
  t.title = "Holevo information, s = " + io::format_number(s);
  t.x_label = "t";
  t.y_label = "chi (bits)";
  t.y_range = std::pair{0.0, 1.05};
  return t;
}

inline io::Table cmd_blp(Options o, std::ostream&) {
  io::Table t;
  t.command = "blp";
  const double t_max = detail::positive(o.t_max, 10.0, "--t-max");
  const double dt = detail::positive(o.dt, 1e-3, "--dt");
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  t.config["t-max"] = t_max;
  t.config["dt"] = dt;
  if (o.family == "nonunital") {
    const double lambda = detail::lambda_or_default(o);
    const auto r = measures::blp_measure(semimarkov::nonunital(lambda), t_max, steps);
    t.config["family"] = "nonunital";
    t.config["lambda"] = lambda;
    t.add_column("lambda", {lambda});
    t.add_column("blp", {r.value});
    t.add_column("revivals", {static_cast<double>(r.revivals.size())});
    return t;
  }
  detail::resolve_dephasing(o, 1.0, -1.0);
  std::vector<double> ps = o.p_list;
  if (ps.empty()) ps = {o.p.value_or(3.0)};
  const double s = *o.s;
  const auto results = detail::parallel_map<BlpResult>(
      ps.size(), o.threads, [&](std::size_t i) { return measures::blp_measure(DephasingSemiMarkov(s, ps[i]), t_max, steps); });
  t.config["family"] = "dephasing";
  t.config["s"] = s;
  t.config["p"] = ps.size() == 1 ? nlohmann::ordered_json(ps[0]) : nlohmann::ordered_json(ps);
  std::vector<double> value, count, flag;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    value.push_back(results[i].value);
    count.push_back(static_cast<double>(results[i].revivals.size()));
    flag.push_back(ps[i] > s * s / 8.0 ? 1.0 : 0.0);
  }
  if (ps.size() == 1) t.note("revival_intervals", io::format_intervals(results[0].revivals));
  t.note("pair", "|+>,|->");
  t.add_column("p", ps);
  t.add_column("blp", value);
  t.add_column("revivals", count);
  t.add_column("cp_indivisible", flag);
  t.x_label = "p";
  t.series = {1};
  return t;
}

inline io::Table cmd_divisibility(Options o, std::ostream&) {
  io::Table t;
  t.command = "divisibility";
  if (o.boundary_search) {
    if (o.family != "dephasing") throw UnsupportedVariant("boundary search needs the dephasing family");
    detail::resolve_dephasing(o, 1.0, -1.0);
    const double s = *o.s;
    const double t_max = detail::positive(o.t_max, 80.0, "--t-max");
    const double dt = detail::positive(o.dt, 0.01, "--dt");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) grid.push_back(static_cast<double>(k) * dt);
    const double lo = o.p_min.value_or(0.05 * s * s), hi = o.p_max.value_or(0.25 * s * s);
    const auto est = measures::divisibility_boundary(s, grid, lo, hi, 1e-4 * s * s);
    t.config["family"] = "dephasing";
    t.config["s"] = s;
    t.config["boundary-search"] = true;
    t.config["p-min"] = lo;
    t.config["p-max"] = hi;
    t.config["t-max"] = t_max;
    t.config["dt"] = dt;
    t.note("condition_threshold", io::format_number(quantum::kMaxConditionNumber));
    t.add_column("s", {s});
    t.add_column("p_star", {est.p_star});
    t.add_column("p_lower", {est.lower});
    t.add_column("p_upper", {est.upper});
    t.add_column("analytic", {s * s / 8.0});
    t.add_column("iterations", {static_cast<double>(est.iterations)});
    return t;
  }

  const double t_max = detail::positive(o.t_max, 10.0, "--t-max");
  std::vector<double> grid;
  if (o.dt) {
    const double dt = detail::positive(o.dt, 0.0, "--dt");
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) grid.push_back(static_cast<double>(k) * dt);
    t.config["dt"] = dt;
  } else {
    grid = detail::linspace(0.0, t_max, o.grid);
    t.config["grid"] = o.grid;
  }
  t.config["t-max"] = t_max;

  DivisibilityReport report;
  if (o.family == "nonunital") {
    const double lambda = detail::lambda_or_default(o);
    t.config["family"] = "nonunital";
    t.config["lambda"] = lambda;
    report = measures::cp_divisibility_scan(semimarkov::nonunital(lambda), grid);
  } else {
    detail::resolve_dephasing(o, 1.0, 3.0);
    detail::echo_dephasing(t, o);
    const DephasingSemiMarkov proc(*o.s, *o.p);
    report = measures::cp_divisibility_scan(proc, grid);
    t.singularities = proc.singular_times(0.0, t_max);
    t.note("regime", to_string(proc.regime()));
  }
  std::vector<double> t1, t2, min_ev, cptp, singular;
  for (const auto& st : report.steps) {
    t1.push_back(st.t1);
    t2.push_back(st.t2);
    min_ev.push_back(st.min_eigenvalue);
    cptp.push_back(st.cptp ? 1.0 : 0.0);
    singular.push_back(st.singular ? 1.0 : 0.0);
  }
  t.note("divisible", report.divisible() ? "yes" : "no");
  t.note("violations", io::format_intervals(report.violations));
  t.note("singular_steps", std::to_string(report.singular_steps));
  t.note("min_eigenvalue", io::format_number(report.min_eigenvalue));
  t.add_column("t1", t1);
  t.add_column("t2", t2);
  t.add_column("min_eigenvalue", min_ev);
  t.add_column("cptp", cptp);
  t.add_column("singular", singular);
  t.title = "Intermediate-map Choi spectrum";
  t.x_label = "t1";
  t.y_label = "min eigenvalue";
  t.series = {2};
  return t;
}

inline io::Table cmd_classical_sim(Options o, std::ostream&) {
  if (!o.seed) throw DomainError("--seed is required");
  io::Table t;
  t.command = "classical-sim";
  std::optional<WaitingTimeDist> w;
  if (o.wtd == "exponential") {
    w = WaitingTimeDist::exponential(detail::lambda_or_default(o));
    t.config["lambda"] = detail::lambda_or_default(o);
  } else if (o.wtd == "tanhsech") {
    w = WaitingTimeDist::tanh_sech(detail::lambda_or_default(o));
    t.config["lambda"] = detail::lambda_or_default(o);
  } else {
    const double l1 = o.lambda1.value_or(1.0), l2 = o.lambda2.value_or(1.0);
    w = WaitingTimeDist::exp_convolution(l1, l2);
    t.config["lambda1"] = l1;
    t.config["lambda2"] = l2;
  }
  const double t_max = detail::positive(o.t_max, 5.0, "--t-max");
  const auto times = detail::linspace(0.0, t_max, o.grid);
  const auto sim = semimarkov::classical_jump_simulate(*w, o.pi, times, o.paths, *o.seed, o.threads);
  std::vector<double> exact;
  for (double x : times) exact.push_back(semimarkov::survival(*w, x));

  t.config["wtd"] = w->name();
  t.config["pi"] = o.pi;
  t.config["paths"] = o.paths;
  t.config["seed"] = *o.seed;
  t.config["t-max"] = t_max;
  t.config["grid"] = o.grid;
  t.add_column("t", times);
  t.add_column("survival", sim.survival);
  t.add_column("survival_se", sim.survival_se);
  t.add_column("survival_exact", exact);
  t.add_column("occupation0", sim.occupation0);
  t.add_column("occupation1", sim.occupation1);
  t.add_column("occupation_se", sim.occupation_se);
  t.title = "Classical jump process, " + w->name() + " waiting times";
  t.x_label = "t";
  t.series = {1, 3, 4};
  return t;
}

inline io::Table cmd_kernel_check(Options o, std::ostream& err) {
  io::Table t;
  t.command = "kernel-check";
  detail::resolve_dephasing(o, 1.0, 0.1);
  const DephasingSemiMarkov proc(*o.s, *o.p);
  const double dt = detail::positive(o.dt, 1e-3, "--dt");
  const double t_max = detail::positive(o.t_max, 5.0, "--t-max");
  const ExponentialKernel kernel{*o.p, *o.s};
  const ComplexMatrix gen = proc.jump_generator().matrix();

  auto sup_error = [&](const VolterraTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t n = 0; n < traj.times.size(); ++n)
      worst = std::max(worst, std::abs(traj.maps[n](2, 2).real() - proc.q(traj.times[n])));
    return worst;
  };
  const auto coarse = numerics::solve_volterra(kernel, gen, t_max, dt);
  const auto fine = numerics::solve_volterra(kernel, gen, t_max, dt / 2.0);
  const double e1 = sup_error(coarse), e2 = sup_error(fine);
  const double order = e2 > 0.0 ? std::log2(e1 / e2) : std::nan("");

  const std::size_t stride = std::max<std::size_t>(1, coarse.times.size() / std::max<std::size_t>(1, o.grid - 1));
  std::vector<double> ts, exact, numeric, error;
  for (std::size_t n = 0; n < coarse.times.size(); n += stride) {
    ts.push_back(coarse.times[n]);
    exact.push_back(proc.q(coarse.times[n]));
    numeric.push_back(coarse.maps[n](2, 2).real());
    error.push_back(std::abs(numeric.back() - exact.back()));
  }
  detail::echo_dephasing(t, o);
  t.config["dt"] = dt;
  t.config["t-max"] = t_max;
  t.note("kernel", "k(t) = p exp(-s t)");
  t.note("max_deviation", io::format_number(e1));
  t.note("max_deviation_half_dt", io::format_number(e2));
  t.note("error_ratio", io::format_number(e1 / e2));
  t.note("order", io::format_number(order));
  t.add_column("t", ts);
  t.add_column("q_exact", exact);
  t.add_column("q_volterra", numeric);
  t.add_column("abs_error", error);
  t.title = "Memory-kernel solution vs closed form";
  t.x_label = "t";
  t.y_label = "q(t)";
  t.series = {1, 2};
  err << "kernel-check: max deviation " << io::format_number(e1) << ", halved dt " << io::format_number(e2)
      << ", order " << io::format_number(order) << '\n';
  return t;
}

namespace detail {

struct Command {
  const char* name;
  const char* summary;
  std::function<io::Table(Options, std::ostream&)> run;
  std::function<void(CLI::App&, Options&)> extra_flags;
};

inline void add_common_flags(CLI::App& app, Options& o) {
  app.add_option("--s", o.s, "Sum of the two waiting-time rates");
  app.add_option("--p", o.p, "Product of the two waiting-time rates");
  app.add_option("--lambda1", o.lambda1, "First waiting-time rate (converted to s, p)");
  app.add_option("--lambda2", o.lambda2, "Second waiting-time rate (converted to s, p)");
  app.add_option("--lambda", o.lambda, "Rate of the tanh-sech (nonunital) family");
  app.add_option("--family", o.family, "Process family")->check(CLI::IsMember({"dephasing", "nonunital"}));
  app.add_option("--T", o.T, "Horizon of the SSS integral")->check(CLI::PositiveNumber);
  app.add_option("--t-max", o.t_max, "End of the time grid");
  app.add_option("--grid", o.grid, "Number of grid points")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  app.add_option("--mode", o.mode, "SSS reference: paper (fixed rate) or min (minimised)")
      ->check(CLI::IsMember({"paper", "min"}));
  app.add_option("--form", o.form, "SSS integrand: rate or choi")->check(CLI::IsMember({"rate", "choi"}));
  app.add_option("--epsilon", o.epsilon, "Half-width excised around rate poles")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "64-bit Monte Carlo seed");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--out", o.out, "Write output to this path instead of stdout");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

inline const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"rate", "Sample the time-local decay rate on a grid", cmd_rate, [](CLI::App&, Options&) {}},
      {"measure", "SSS measure xi and zeta, optionally over a sweep of p", cmd_measure,
       [](CLI::App& app, Options& o) {
         app.add_option("--p-min", o.p_min, "Start of the p sweep");
         app.add_option("--p-max", o.p_max, "End of the p sweep");
         app.add_option("--p-list", o.p_list, "Explicit p values")->delimiter(',');
         app.add_option("--gamma-ref", o.gamma_ref, "Reference rate in paper mode")->check(CLI::NonNegativeNumber);
         app.add_option("--dim", o.dim, "Dimension of the clock-dephasing family in Choi form")
             ->check(CLI::Range(2, 64));
         app.add_option("--normalization", o.normalization, "Generator normalisation")
             ->check(CLI::IsMember({"auto", "unit", "per-dimension"}));
       }},
      {"holevo", "Holevo information curves for a list of p", cmd_holevo,
       [](CLI::App& app, Options& o) {
         app.add_option("--p-list", o.p_list, "p values, one curve each")->delimiter(',');
         app.add_option("--ensemble", o.ensemble, "pm (|+>,|->) or z (|0>,|1>)")->check(CLI::IsMember({"pm", "z"}));
       }},
      {"blp", "Trace-distance revival measure", cmd_blp,
       [](CLI::App& app, Options& o) {
         app.add_option("--p-list", o.p_list, "p values")->delimiter(',');
         app.add_option("--dt", o.dt, "Grid spacing");
       }},
      {"divisibility", "CP-divisibility scan or boundary search", cmd_divisibility,
       [](CLI::App& app, Options& o) {
         app.add_flag("--boundary-search", o.boundary_search, "Bisect over p for the divisibility boundary");
         app.add_option("--p-min", o.p_min, "Lower bracket (divisible)");
         app.add_option("--p-max", o.p_max, "Upper bracket (indivisible)");
         app.add_option("--dt", o.dt, "Grid spacing");
       }},
      {"classical-sim", "Monte Carlo of the classical jump chain", cmd_classical_sim,
       [](CLI::App& app, Options& o) {
         app.add_option("--wtd", o.wtd, "Waiting-time distribution")
             ->check(CLI::IsMember({"exponential", "expconv", "tanhsech"}));
         app.add_option("--pi", o.pi, "Jump probability")->check(CLI::Range(0.0, 1.0));
         app.add_option("--paths", o.paths, "Number of paths")->check(CLI::PositiveNumber);
       }},
      {"kernel-check", "Memory-kernel integration against the closed-form q(t)", cmd_kernel_check,
       [](CLI::App& app, Options& o) { app.add_option("--dt", o.dt, "Step of the coarse solve"); }},
  };
  return table;
}

inline std::string usage() {
  std::string s = "qsm " QSM_VERSION " - quantum semi-Markov processes\n\nUsage: qsm <command> [flags]\n\nCommands:\n";
  for (const auto& c : commands()) {
    std::string name = c.name;
    name.resize(15, ' ');
    s += "  " + name + c.summary + '\n';
  }
  s += "\nRun 'qsm <command> --help' for the flags of a command.\n";
  return s;
}

inline void emit(const io::Table& t, const std::string& format, std::ostream& os) {
  if (format == "json") io::write_json(os, t);
  else if (format == "svg") io::write_svg(os, t);
  else io::write_csv(os, t);
}

}  // namespace detail

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns 0 on success, 2 for invalid input and 3 for
/// numerical failures.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << detail::usage();
    return 2;
  }
  const std::string& name = args.front();
  if (name == "--help" || name == "-h" || name == "help") {
    out << detail::usage();
    return 0;
  }
  if (name == "--version") {
    out << "qsm " << QSM_VERSION << '\n';
    return 0;
  }
  const auto& table = detail::commands();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& c) { return name == c.name; });
  if (it == table.end()) {
    err << "qsm: unknown command '" << name << "'\n\n" << detail::usage();
    return 2;
  }

  Options opts;
  CLI::App app{it->summary, std::string("qsm ") + it->name};
  detail::add_common_flags(app, opts);
  it->extra_flags(app, opts);
  app.set_config("--config", "", "Read flags from a key = value file; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qsm " << it->name << ": " << e.what() << '\n';
    return 2;
  }

  try {
    const io::Table result = it->run(opts, err);
    if (opts.out.empty()) {
      detail::emit(result, opts.format, out);
    } else {
      std::ofstream file(opts.out);
      if (!file) throw DomainError("cannot open output file " + opts.out);
      detail::emit(result, opts.format, file);
    }
    return 0;
  } catch (const InputError& e) {
    err << "qsm " << it->name << ": " << e.what() << '\n';
    return 2;
  } catch (const NumericalFailure& e) {
    err << "qsm " << it->name << ": numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "qsm " << it->name << ": numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace qsm::cli
