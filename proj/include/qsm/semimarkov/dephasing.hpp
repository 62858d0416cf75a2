#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qsm/quantum/generator.hpp"

namespace qsm {

enum class Regime { SemigroupLimit, CPDivisible, CPIndivisible };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::SemigroupLimit: return "semigroup-limit";
    case Regime::CPDivisible: return "cp-divisible";
    case Regime::CPIndivisible: return "cp-indivisible";
  }
  return "unknown";
}

/// eta = sqrt(1 - 8p/s^2), kept as a branch tag plus a real magnitude so
/// that q(t) never picks up an imaginary residue.
struct Eta {
  enum class Branch { Real, Imaginary, Degenerate };
  Branch branch;
  /// |eta|; zero on the degenerate branch.
  double magnitude;
};

namespace semimarkov {

/// Below this |1 - 8p/s^2| the analytic eta -> 0 limit is used.
inline constexpr double kDegenerateEta = 1e-9;

inline Eta eta(double s, double p) {
  if (!(s > 0.0) || !(p >= 0.0)) throw DomainError("eta: requires s > 0 and p >= 0");
  const double arg = 1.0 - 8.0 * p / (s * s);
  if (std::abs(arg) < kDegenerateEta) return {Eta::Branch::Degenerate, 0.0};
  if (arg > 0.0) return {Eta::Branch::Real, std::sqrt(arg)};
  return {Eta::Branch::Imaginary, std::sqrt(-arg)};
}

/// Exact comparison of p against s^2/8.
inline Regime regime_classify(double s, double p) {
  if (!(s > 0.0) || !(p >= 0.0)) throw DomainError("regime_classify: requires s > 0 and p >= 0");
  if (p == 0.0) return Regime::SemigroupLimit;
  return p > s * s / 8.0 ? Regime::CPIndivisible : Regime::CPDivisible;
}

}  // namespace semimarkov

/// Qubit dephasing semi-Markov process built from the convolution of two
/// exponential waiting times with s = l1 + l2 and p = l1 l2. The coherence
/// factor is
///   q(t) = e^{-st/2} (cosh(eta s t/2) + sinh(eta s t/2) / eta)
/// and the time-local generator is gamma(t) (Z rho Z - rho).
class DephasingSemiMarkov {
 public:
  DephasingSemiMarkov(double s, double p) : s_(s), p_(p), eta_(semimarkov::eta(s, p)) {}

  static DephasingSemiMarkov from_rates(double rate1, double rate2) {
    if (!(rate1 > 0.0) || !(rate2 > 0.0)) throw DomainError("DephasingSemiMarkov: rates must be positive");
    return {rate1 + rate2, rate1 * rate2};
  }

  double s() const { return s_; }
  double p() const { return p_; }
  Eta eta() const { return eta_; }
  Regime regime() const { return semimarkov::regime_classify(s_, p_); }
  Eigen::Index dim() const { return 2; }

  double q(double t) const {
    if (!(t >= 0.0)) throw DomainError("q_of_t: requires t >= 0");
    const double x = 0.5 * s_ * t;
    const double m = eta_.magnitude;
    switch (eta_.branch) {
      case Eta::Branch::Real: {
        // e^{-x} cosh(m x) and e^{-x} sinh(m x) written as decaying exponentials.
        const double slow = std::exp(-(1.0 - m) * x);
        const double fast = std::exp(-(1.0 + m) * x);
        return 0.5 * (slow + fast) + 0.5 * (slow - fast) / m;
      }
      case Eta::Branch::Imaginary:
        return std::exp(-x) * (std::cos(m * x) + std::sin(m * x) / m);
      case Eta::Branch::Degenerate:
        return std::exp(-x) * (1.0 + x);
    }
    return 0.0;
  }

  /// gamma(t) = 2p / (s eta coth(s t eta / 2) + s) = -(1/2) d ln q / dt.
  double rate(double t) const {
    if (!(t >= 0.0)) throw DomainError("gamma_dephasing: requires t >= 0");
    if (t == 0.0 || p_ == 0.0) return 0.0;
    const double x = 0.5 * s_ * t;
    const double m = eta_.magnitude;
    double eta_coth = 0.0;
    switch (eta_.branch) {
      case Eta::Branch::Real: eta_coth = m / std::tanh(m * x); break;
      case Eta::Branch::Imaginary: {
        if (std::abs(std::cos(m * x) + std::sin(m * x) / m) < 1e-12)
          throw Singularity("gamma_dephasing: q(t) vanishes, the rate diverges");
        eta_coth = m / std::tan(m * x);
        break;
      }
      case Eta::Branch::Degenerate: eta_coth = 1.0 / x; break;
    }
    return 2.0 * p_ / (s_ * eta_coth + s_);
  }

  /// Zeros of q in [a, b]. They exist only on the imaginary branch, at
  /// eta s t / 2 = pi - atan(|eta|) + k pi.
  std::vector<double> coherence_zeros(double a, double b) const {
    std::vector<double> out;
    if (eta_.branch != Eta::Branch::Imaginary) return out;
    const double m = eta_.magnitude;
    const double first = std::numbers::pi - std::atan(m);
    for (int k = 0;; ++k) {
      const double t = 2.0 * (first + k * std::numbers::pi) / (m * s_);
      if (t > b) break;
      if (t >= a) out.push_back(t);
    }
    return out;
  }

  /// Rate singularities coincide with the zeros of q.
  std::vector<double> singular_times(double a, double b) const { return coherence_zeros(a, b); }

  /// Unit-rate generator Z rho Z - rho.
  SuperOperator jump_generator() const {
    return {2, quantum::conjugation_channel(quantum::weyl_z(2)).matrix() - numerics::identity(4)};
  }

  JumpStructure jump_structure() const { return JumpStructure::ClockDephasing; }

  QuantumMap map_at(double t) const {
    const double qt = q(t);
    const ComplexMatrix z = quantum::weyl_z(2);
    auto kraus = KrausSet::from_operators({std::sqrt(std::max(0.0, (1.0 + qt) / 2.0)) * numerics::identity(2),
                                           std::sqrt(std::max(0.0, (1.0 - qt) / 2.0)) * z});
    return {t, std::move(kraus), quantum::qubit_dephasing_channel(qt)};
  }

 private:
  double s_;
  double p_;
  Eta eta_;
};

namespace semimarkov {

inline double q_of_t(const DephasingSemiMarkov& proc, double t) { return proc.q(t); }
inline double gamma_dephasing(const DephasingSemiMarkov& proc, double t) { return proc.rate(t); }
inline QuantumMap map_at(const DephasingSemiMarkov& proc, double t) { return proc.map_at(t); }

}  // namespace semimarkov
}  // namespace qsm
