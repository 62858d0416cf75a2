#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qsm/measures/blp.hpp"
#include "qsm/measures/divisibility.hpp"
#include "qsm/measures/holevo.hpp"
#include "qsm/measures/sss.hpp"
#include "qsm/numerics/quadrature.hpp"
#include "qsm/semimarkov/dephasing.hpp"
#include "qsm/semimarkov/projector.hpp"

using namespace qsm;
using namespace qsm::measures;

namespace {

constexpr double kLnCosh1 = 0.4337808304830271870;
constexpr double kTanhHalf = 0.462117157260009759;
constexpr double kTrueMinXiLambda1 = 0.193551816566472138;
constexpr double kFirstZeroS1P3 = 0.740795521828108996;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
  return out;
}

SssConfig config(SssMode mode, double horizon = 1.0) {
  SssConfig cfg;
  cfg.mode = mode;
  cfg.horizon = horizon;
  return cfg;
}

/// Median of gamma over uniform t in [0, T], from dense midpoint samples.
template <class Process>
double sampled_median(const Process& proc, double horizon, int n = 400001) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = horizon * (k + 0.5) / n;
    try {
      v.push_back(proc.rate(t));
    } catch (const Singularity&) {
    }
  }
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

TEST(SssRateForm, ConstantRateHasNoDeviation) {
  const auto r = sss_rate_form([](double) { return 0.7; }, config(SssMode::TrueMinimum));
  EXPECT_NEAR(r.xi, 0.0, 1e-9);
  EXPECT_NEAR(r.gamma_ref, 0.7, 1e-8);
  EXPECT_NEAR(r.zeta, 0.0, 1e-9);
}

TEST(SssRateForm, NonUnitalClosedForm) {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto r = sss_rate_form(semimarkov::nonunital(lambda), config(SssMode::PaperReference));
    const double exact = std::log(std::cosh(lambda));
    EXPECT_NEAR(r.xi, exact, 1e-9 * exact);
    EXPECT_EQ(r.gamma_ref, 0.0);
    EXPECT_NEAR(r.zeta, exact / (1.0 + exact), 1e-12);
  }
  EXPECT_NEAR(sss_rate_form(semimarkov::nonunital(1.0), config(SssMode::PaperReference)).xi, kLnCosh1, 1e-12);
}

TEST(SssRateForm, NonUnitalTrueMinimum) {
  const auto r = sss_rate_form(semimarkov::nonunital(1.0), config(SssMode::TrueMinimum));
  EXPECT_NEAR(r.gamma_ref, kTanhHalf, 1e-6);
  EXPECT_NEAR(r.xi, kTrueMinXiLambda1, 1e-9);
  EXPECT_LT(r.xi, kLnCosh1);
  // Direct quadrature of |tanh t - tanh(1/2)| as an independent oracle.
  const auto direct = numerics::adaptive_quad([](double t) { return std::abs(std::tanh(t) - kTanhHalf); }, 0.0, 1.0,
                                              {1e-13, 1e-12}, {{0.5}, {}, 1e-6});
  EXPECT_NEAR(r.xi, direct.value, 1e-9);
}

TEST(SssRateForm, RejectsBadConfig) {
  auto cfg = config(SssMode::PaperReference, 0.0);
  EXPECT_THROW(sss_rate_form([](double) { return 1.0; }, cfg), DomainError);
  cfg.horizon = 1.0;
  cfg.excision = 0.0;
  EXPECT_THROW(sss_rate_form([](double) { return 1.0; }, cfg), DomainError);
}

TEST(SssRateForm, ExcisesRatePoles) {
  const DephasingSemiMarkov proc(1.0, 3.0);
  const auto r = sss_rate_form(proc, config(SssMode::PaperReference));
  EXPECT_TRUE(std::isfinite(r.xi));
  EXPECT_GT(r.xi, 0.0);
  EXPECT_LT(r.zeta, 1.0);
  ASSERT_EQ(r.excised.size(), 1u);
  EXPECT_NEAR(0.5 * (r.excised[0].lo + r.excised[0].hi), kFirstZeroS1P3, 1e-12);
  EXPECT_NEAR(r.excised[0].length(), 2e-6, 1e-12);
}

TEST(SssRateForm, ZetaInvariantsProperty) {
  for (double p : {0.0, 0.01, 0.1, 0.125, 0.3, 3.0}) {
    for (auto mode : {SssMode::PaperReference, SssMode::TrueMinimum}) {
      const auto r = sss_rate_form(DephasingSemiMarkov(1.0, p), config(mode));
      EXPECT_GE(r.xi, 0.0);
      EXPECT_GE(r.zeta, 0.0);
      EXPECT_LT(r.zeta, 1.0);
      EXPECT_NEAR(r.zeta, r.xi / (1.0 + r.xi), 1e-12);
      EXPECT_EQ(r.zeta == 0.0, r.xi == 0.0);
    }
  }
}

TEST(SssRateForm, TrueMinimumNeverExceedsReferenceProperty) {
  for (double horizon : {0.5, 1.0, 3.0}) {
    for (double p : {0.01, 0.1, 0.125, 0.4, 3.0}) {
      const DephasingSemiMarkov proc(1.0, p);
      EXPECT_LE(sss_rate_form(proc, config(SssMode::TrueMinimum, horizon)).xi,
                sss_rate_form(proc, config(SssMode::PaperReference, horizon)).xi + 1e-12)
          << p << " " << horizon;
    }
    for (double lambda : {0.5, 1.0, 2.0}) {
      const auto proc = semimarkov::nonunital(lambda);
      EXPECT_LE(sss_rate_form(proc, config(SssMode::TrueMinimum, horizon)).xi,
                sss_rate_form(proc, config(SssMode::PaperReference, horizon)).xi + 1e-12);
    }
  }
}

TEST(SssRateForm, TrueMinimumIsMedianProperty) {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto proc = semimarkov::nonunital(lambda);
    const auto r = sss_rate_form(proc, config(SssMode::TrueMinimum));
    EXPECT_NEAR(r.gamma_ref, lambda * std::tanh(lambda / 2.0), 1e-6);
    EXPECT_NEAR(r.gamma_ref, sampled_median(proc, 1.0), 1e-6);
  }
  for (double p : {0.05, 0.1, 0.4}) {
    const DephasingSemiMarkov proc(1.0, p);
    const auto r = sss_rate_form(proc, config(SssMode::TrueMinimum, 2.0));
    EXPECT_NEAR(r.gamma_ref, sampled_median(proc, 2.0), 1e-6) << p;
  }
}

TEST(SssRateForm, DephasingSweepIsMonotone) {
  double prev = -1.0;
  for (double p : linspace(0.0, 0.5, 11)) {
    const auto r = sss_rate_form(DephasingSemiMarkov(1.0, p), config(SssMode::PaperReference));
    if (p == 0.0) EXPECT_EQ(r.xi, 0.0);
    EXPECT_GE(r.xi, prev);
    prev = r.xi;
  }
}

TEST(FamilyConstant, Values) {
  const double c2 = family_constant({2, JumpStructure::ClockDephasing, RateNormalization::PerDimension});
  const double c3 = family_constant({3, JumpStructure::ClockDephasing, RateNormalization::PerDimension});
  EXPECT_NEAR(c2, 2.0, 1e-12);
  EXPECT_NEAR(c3, c2, 1e-9);
  EXPECT_NEAR(family_constant({2, JumpStructure::ClockDephasing, RateNormalization::Unit}), 4.0, 1e-12);
  EXPECT_NEAR(family_constant({2, JumpStructure::Projector, RateNormalization::Unit}), 1.0 + std::sqrt(5.0), 1e-9);
}

TEST(SssChoiForm, ConstantRateHasNoDeviation) {
  const auto r = sss_choi_form([](double) { return 0.3; }, GeneratorFamily{}, config(SssMode::TrueMinimum));
  EXPECT_NEAR(r.xi, 0.0, 1e-8);
  const auto paper = sss_choi_form([](double) { return 0.3; }, GeneratorFamily{}, [] {
    auto c = config(SssMode::PaperReference);
    c.reference_rate = 0.3;
    return c;
  }());
  EXPECT_NEAR(paper.xi, 0.0, 1e-14);
}

TEST(SssChoiForm, ProjectorClosedForm) {
  const auto proc = semimarkov::nonunital(1.0);
  const auto r = sss_choi_form(proc, config(SssMode::PaperReference), RateNormalization::Unit);
  EXPECT_NEAR(r.family_constant, 1.0 + std::sqrt(5.0), 1e-9);
  EXPECT_NEAR(r.xi, (1.0 + std::sqrt(5.0)) * kLnCosh1, 1e-8);
  EXPECT_NEAR(r.xi_normalized(), kLnCosh1, 1e-9);
}

TEST(SssChoiForm, FactorizesThroughFamilyConstantProperty) {
  for (auto mode : {SssMode::PaperReference, SssMode::TrueMinimum}) {
    for (double p : {0.05, 0.125, 0.4}) {
      const DephasingSemiMarkov proc(1.0, p);
      const auto rate = sss_rate_form(proc, config(mode));
      for (Eigen::Index d : {2, 3}) {
        const GeneratorFamily family{d, JumpStructure::ClockDephasing, RateNormalization::PerDimension};
        const auto choi = sss_choi_form([&](double t) { return proc.rate(t); }, family, config(mode));
        EXPECT_NEAR(choi.family_constant, 2.0, 1e-12);
        EXPECT_NEAR(choi.xi_normalized(), rate.xi, 1e-6) << p << " d=" << d;
        EXPECT_NEAR(choi.gamma_ref, rate.gamma_ref, 1e-6);
      }
    }
    for (double lambda : {0.5, 2.0}) {
      const auto proc = semimarkov::nonunital(lambda);
      const auto choi = sss_choi_form(proc, config(mode), RateNormalization::Unit);
      EXPECT_NEAR(choi.xi_normalized(), sss_rate_form(proc, config(mode)).xi, 1e-6);
    }
  }
}

TEST(SssMeasure, DispatchesOnForm) {
  const auto proc = semimarkov::nonunital(1.0);
  auto cfg = config(SssMode::PaperReference);
  EXPECT_EQ(sss_measure(proc, cfg).family_constant, 1.0);
  cfg.form = SssForm::ChoiForm;
  const auto r = sss_measure(proc, cfg, RateNormalization::Unit);
  EXPECT_EQ(r.config.form, SssForm::ChoiForm);
  EXPECT_NEAR(r.family_constant, 1.0 + std::sqrt(5.0), 1e-9);
}

TEST(Blp, Examples) {
  EXPECT_LE(blp_measure(DephasingSemiMarkov(1.0, 0.1), 10.0).value, 1e-10);
  EXPECT_LE(blp_measure(DephasingSemiMarkov(1.0, 0.0), 10.0).value, 1e-10);
  const auto r = blp_measure(DephasingSemiMarkov(1.0, 3.0), 10.0);
  EXPECT_GT(r.value, 0.01);
  ASSERT_FALSE(r.revivals.empty());
  EXPECT_NEAR(r.revivals.front().lo, kFirstZeroS1P3, 2e-3);
  const auto same = blp_measure(DephasingSemiMarkov(1.0, 3.0), 10.0, DensityMatrix::plus(), DensityMatrix::plus());
  EXPECT_EQ(same.value, 0.0);
}

TEST(Blp, DistanceIsAbsoluteCoherence) {
  const DephasingSemiMarkov proc(1.0, 3.0);
  const auto r = blp_measure(proc, 5.0, 500);
  for (std::size_t k = 0; k < r.times.size(); ++k) EXPECT_NEAR(r.distance[k], std::abs(proc.q(r.times[k])), 1e-12);
  // Sum of revivals of |q| between successive zeros and maxima.
  double expected = 0.0;
  for (std::size_t k = 0; k + 1 < r.times.size(); ++k)
    expected += std::max(0.0, std::abs(proc.q(r.times[k + 1])) - std::abs(proc.q(r.times[k])));
  EXPECT_NEAR(r.value, expected, 1e-12);
}

TEST(Divisibility, Examples) {
  const auto grid = linspace(0.0, 10.0, 1001);
  EXPECT_TRUE(cp_divisibility_scan(DephasingSemiMarkov(1.0, 0.0), grid).divisible());
  const auto divisible = cp_divisibility_scan(DephasingSemiMarkov(1.0, 0.1), grid);
  EXPECT_TRUE(divisible.divisible());
  EXPECT_EQ(divisible.singular_steps, 0u);
  EXPECT_EQ(divisible.steps.size(), 1000u);

  const auto report = cp_divisibility_scan(DephasingSemiMarkov(1.0, 3.0), grid);
  ASSERT_FALSE(report.divisible());
  EXPECT_LT(report.min_eigenvalue, 0.0);
  // The first violation starts where |q| turns around, i.e. at its first zero.
  const auto& first = report.violations.front();
  EXPECT_LE(first.lo, kFirstZeroS1P3 + 1e-2);
  EXPECT_GE(first.hi, kFirstZeroS1P3);
}

TEST(Divisibility, NonUnitalFamilyIsDivisible) {
  const auto grid = linspace(0.0, 5.0, 501);
  for (double lambda : {0.5, 1.0, 2.0})
    EXPECT_TRUE(cp_divisibility_scan(semimarkov::nonunital(lambda), grid).divisible());
}

TEST(Divisibility, AgreesWithBlpProperty) {
  const auto grid = linspace(0.0, 10.0, 1001);
  for (double p : {0.0, 0.05, 0.1, 0.124, 0.2, 0.5, 1.0, 3.0}) {
    const DephasingSemiMarkov proc(1.0, p);
    const bool divisible = cp_divisibility_scan(proc, grid).divisible();
    const double blp = blp_measure(proc, 10.0, 1000).value;
    EXPECT_EQ(divisible, blp <= 1e-10) << p << " blp=" << blp;
  }
}

TEST(Divisibility, BoundaryNearAnalyticValue) {
  std::vector<double> grid;
  for (int k = 0; k <= 8000; ++k) grid.push_back(0.01 * k);
  const auto est = divisibility_boundary(1.0, grid, 0.1, 0.2, 1e-4);
  EXPECT_NEAR(est.p_star, 0.125, 2e-3);
  EXPECT_GE(est.p_star, 0.125);
  EXPECT_LE(est.upper - est.lower, 1e-4);
}

TEST(Divisibility, Errors) {
  const std::vector<double> one = {0.0};
  EXPECT_THROW(cp_divisibility_scan(DephasingSemiMarkov(1.0, 0.1), one), GridError);
  const std::vector<double> grid = {0.0, 1.0};
  EXPECT_THROW(divisibility_boundary(1.0, grid, 0.2, 0.1), DomainError);
}

TEST(Holevo, Examples) {
  EXPECT_NEAR(holevo_chi(HolevoEnsemble::plus_minus()), 1.0, 1e-12);
  for (double p : {2.0, 0.1, 0.01}) {
    const std::vector<double> t0 = {0.0};
    EXPECT_NEAR(holevo_curve(DephasingSemiMarkov(1.0, p), HolevoEnsemble::plus_minus(), t0)[0].chi, 1.0, 1e-9);
  }
  const DephasingSemiMarkov proc(1.0, 3.0);
  const std::vector<double> zero = {kFirstZeroS1P3};
  EXPECT_NEAR(holevo_curve(proc, HolevoEnsemble::plus_minus(), zero)[0].chi, 0.0, 1e-12);
  EXPECT_THROW(HolevoEnsemble({DensityMatrix::plus()}, {0.9}), DomainError);
}

TEST(Holevo, MatrixPathMatchesClosedFormProperty) {
  const auto times = linspace(0.0, 6.0, 301);
  for (double p : {2.0, 0.1, 0.01, 0.125}) {
    const DephasingSemiMarkov proc(1.0, p);
    const auto curve = holevo_curve(proc, HolevoEnsemble::plus_minus(), times);
    for (const auto& pt : curve) EXPECT_NEAR(pt.chi, holevo_dephasing_closed_form(proc.q(pt.t)), 1e-8);
  }
}

TEST(Holevo, CurveShapes) {
  const auto times = linspace(0.0, 6.0, 601);
  auto chi = [&](double p) {
    std::vector<double> v;
    for (const auto& pt : holevo_curve(DephasingSemiMarkov(1.0, p), HolevoEnsemble::plus_minus(), times))
      v.push_back(pt.chi);
    return v;
  };
  const auto c2 = chi(2.0), c01 = chi(0.1), c001 = chi(0.01);
  bool revives = false;
  for (std::size_t k = 0; k + 1 < c2.size(); ++k) revives |= c2[k + 1] > c2[k] + 1e-12;
  EXPECT_TRUE(revives);
  for (std::size_t k = 0; k + 1 < c01.size(); ++k) {
    EXPECT_LE(c01[k + 1], c01[k] + 1e-15);
    EXPECT_LE(c001[k + 1], c001[k] + 1e-15);
  }
  // At t = 1 the smallest p has lost the least information.
  EXPECT_GT(c001[100], c01[100]);
  EXPECT_GT(c01[100], c2[100]);
}

TEST(Holevo, NonUnitalEnsemble) {
  const auto proc = semimarkov::nonunital(1.0);
  const HolevoEnsemble e({DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)}, {0.5, 0.5});
  const std::vector<double> times = {0.0, 50.0};
  const auto curve = holevo_curve(proc, e, times);
  EXPECT_NEAR(curve[0].chi, 1.0, 1e-12);
  EXPECT_NEAR(curve[1].chi, 0.0, 1e-9);
}
