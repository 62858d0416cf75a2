#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "qsm/errors.hpp"

namespace qsm {

namespace wtd {

/// f(t) = rate e^{-rate t}
struct Exponential {
  double rate;
};
/// Density of the sum of two independent exponential waiting times.
struct ExpConvolution {
  double rate1;
  double rate2;
};
/// f(t) = rate tanh(rate t) sech(rate t), survival sech(rate t).
struct TanhSech {
  double rate;
};

}  // namespace wtd

/// A waiting-time distribution: density f, survival g = 1 - int_0^t f, and
/// hazard f / g.
class WaitingTimeDist {
 public:
  using Variant = std::variant<wtd::Exponential, wtd::ExpConvolution, wtd::TanhSech>;

  explicit WaitingTimeDist(Variant v) : v_(v) {
    std::visit([](const auto& w) { validate(w); }, v_);
  }

  static WaitingTimeDist exponential(double rate) { return WaitingTimeDist(wtd::Exponential{rate}); }
  static WaitingTimeDist exp_convolution(double rate1, double rate2) {
    return WaitingTimeDist(wtd::ExpConvolution{rate1, rate2});
  }
  static WaitingTimeDist tanh_sech(double rate) { return WaitingTimeDist(wtd::TanhSech{rate}); }

  const Variant& variant() const { return v_; }

  std::string name() const {
    return std::visit(
        [](const auto& w) -> std::string {
          using T = std::decay_t<decltype(w)>;
          if constexpr (std::is_same_v<T, wtd::Exponential>) return "exponential";
          else if constexpr (std::is_same_v<T, wtd::ExpConvolution>) return "expconv";
          else return "tanhsech";
        },
        v_);
  }

 private:
  static void require_rate(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("WaitingTimeDist: rates must be positive and finite");
  }
  static void validate(const wtd::Exponential& w) { require_rate(w.rate); }
  static void validate(const wtd::ExpConvolution& w) {
    require_rate(w.rate1);
    require_rate(w.rate2);
  }
  static void validate(const wtd::TanhSech& w) { require_rate(w.rate); }

  Variant v_;
};

/// Memory kernel of an exponential WTD: k(t) = rate * delta(t), i.e. a
/// memoryless (semigroup) process with constant rate.
struct DeltaKernel {
  double rate;
};

/// k(t) = amplitude * exp(-decay t)
struct ExponentialKernel {
  double amplitude;
  double decay;
  double operator()(double t) const { return amplitude * std::exp(-decay * t); }
};

using MemoryKernel = std::variant<DeltaKernel, ExponentialKernel>;

namespace semimarkov {
namespace detail {

inline void require_time(double t) {
  if (!(t >= 0.0)) throw DomainError("waiting-time distribution evaluated at negative time");
}

// (1 - e^{-delta t}) / delta, with the delta -> 0 limit t.
inline double relaxation_factor(double delta, double t) {
  if (delta == 0.0) return t;
  return -std::expm1(-delta * t) / delta;
}

}  // namespace detail

inline double wtd_density(const WaitingTimeDist& w, double t) {
  detail::require_time(t);
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, wtd::Exponential>) {
          return v.rate * std::exp(-v.rate * t);
        } else if constexpr (std::is_same_v<T, wtd::ExpConvolution>) {
          const double e = detail::relaxation_factor(v.rate2 - v.rate1, t);
          return v.rate1 * v.rate2 * std::exp(-v.rate1 * t) * e;
        } else {
          return v.rate * std::tanh(v.rate * t) / std::cosh(v.rate * t);
        }
      },
      w.variant());
}

inline double survival(const WaitingTimeDist& w, double t) {
  detail::require_time(t);
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, wtd::Exponential>) {
          return std::exp(-v.rate * t);
        } else if constexpr (std::is_same_v<T, wtd::ExpConvolution>) {
          const double e = detail::relaxation_factor(v.rate2 - v.rate1, t);
          return std::exp(-v.rate1 * t) * (1.0 + v.rate1 * e);
        } else {
          return 1.0 / std::cosh(v.rate * t);
        }
      },
      w.variant());
}

/// f(t) / g(t), evaluated without forming the ratio of two small numbers.
inline double hazard(const WaitingTimeDist& w, double t) {
  detail::require_time(t);
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, wtd::Exponential>) {
          return v.rate;
        } else if constexpr (std::is_same_v<T, wtd::ExpConvolution>) {
          const double e = detail::relaxation_factor(v.rate2 - v.rate1, t);
          return v.rate1 * v.rate2 * e / (1.0 + v.rate1 * e);
        } else {
          return v.rate * std::tanh(v.rate * t);
        }
      },
      w.variant());
}

/// Closed-form memory kernel from k~(u) = u f~(u) / (1 - f~(u)).
inline MemoryKernel kernel_closed_form(const WaitingTimeDist& w) {
  if (const auto* e = std::get_if<wtd::Exponential>(&w.variant())) return DeltaKernel{e->rate};
  if (const auto* c = std::get_if<wtd::ExpConvolution>(&w.variant()))
    return ExponentialKernel{c->rate1 * c->rate2, c->rate1 + c->rate2};
  throw UnsupportedVariant("kernel_closed_form: no rational Laplace transform for this distribution");
}

/// Draws a waiting time by inversion. `uniform` must yield values in (0, 1).
/// The two-exponential convolution is drawn as a sum of two exponential
/// draws, which is exact.
template <class Uniform>
double sample_waiting_time(const WaitingTimeDist& w, Uniform&& uniform) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, wtd::Exponential>) {
          return -std::log(uniform()) / v.rate;
        } else if constexpr (std::is_same_v<T, wtd::ExpConvolution>) {
          const double first = -std::log(uniform()) / v.rate1;
          return first - std::log(uniform()) / v.rate2;
        } else {
          // Survival sech(rate t) = u.
          return std::acosh(1.0 / uniform()) / v.rate;
        }
      },
      w.variant());
}

}  // namespace semimarkov
}  // namespace qsm
