#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "qsm/semimarkov/wtd.hpp"

namespace qsm {

/// Counter-based generator: draw n of stream k is splitmix64(key_k + n * phi),
/// with key_k derived from (seed, k). Streams are independent of each other
/// and of the order in which they are consumed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + kGolden))) {}

  std::uint64_t next() { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform double in the open interval (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Empirical curves of a two-site renewal process started on site 0.
struct JumpSimulation {
  std::vector<double> times;
  /// Fraction of paths with no jump by t.
  std::vector<double> survival;
  std::vector<double> survival_se;
  std::vector<double> occupation0;
  std::vector<double> occupation1;
  /// Standard error of either occupation (they sum to one).
  std::vector<double> occupation_se;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

namespace semimarkov {

/// Monte Carlo of the classical semi-Markov chain: waiting times are drawn
/// from `w` and each jump flips the site with probability `jump_probability`.
/// Path i uses CounterRng(seed, i), so results do not depend on `threads`.
inline JumpSimulation classical_jump_simulate(const WaitingTimeDist& w, double jump_probability,
                                              std::span<const double> times, std::size_t n_paths,
                                              std::uint64_t seed, unsigned threads = 0) {
  if (n_paths < 1) throw DomainError("classical_jump_simulate: n_paths must be at least 1");
  if (!(jump_probability >= 0.0 && jump_probability <= 1.0))
    throw DomainError("classical_jump_simulate: jump probability must lie in [0, 1]");
  if (times.empty() || times.front() < 0.0 || !std::is_sorted(times.begin(), times.end()))
    throw GridError("classical_jump_simulate: times must be non-negative and increasing");

  const std::size_t n_times = times.size();
  const double t_max = times.back();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_paths));

  struct Counts {
    std::vector<std::uint64_t> survived, on_site1;
  };
  std::vector<Counts> partial(threads, Counts{std::vector<std::uint64_t>(n_times, 0),
                                              std::vector<std::uint64_t>(n_times, 0)});

  auto run = [&](unsigned worker) {
    auto& counts = partial[worker];
    std::vector<double> flips;
    for (std::size_t path = worker; path < n_paths; path += threads) {
      CounterRng rng(seed, path);
      auto uniform = [&rng] { return rng.uniform(); };
      flips.clear();
      double first_jump = -1.0;
      for (double t = 0.0;;) {
        t += sample_waiting_time(w, uniform);
        if (first_jump < 0.0) first_jump = t;
        if (t > t_max) break;
        if (rng.uniform() < jump_probability) flips.push_back(t);
      }
      std::size_t next_flip = 0;
      for (std::size_t k = 0; k < n_times; ++k) {
        while (next_flip < flips.size() && flips[next_flip] <= times[k]) ++next_flip;
        if (first_jump > times[k]) ++counts.survived[k];
        if (next_flip % 2 == 1) ++counts.on_site1[k];
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned worker = 1; worker < threads; ++worker) pool.emplace_back(run, worker);
    run(0);
  }

  JumpSimulation out;
  out.times.assign(times.begin(), times.end());
  out.n_paths = n_paths;
  out.seed = seed;
  const double n = static_cast<double>(n_paths);
  for (std::size_t k = 0; k < n_times; ++k) {
    std::uint64_t survived = 0, on_site1 = 0;
    for (const auto& c : partial) {
      survived += c.survived[k];
      on_site1 += c.on_site1[k];
    }
    const double ps = static_cast<double>(survived) / n;
    const double p1 = static_cast<double>(on_site1) / n;
    out.survival.push_back(ps);
    out.survival_se.push_back(std::sqrt(ps * (1.0 - ps) / n));
    out.occupation0.push_back(1.0 - p1);
    out.occupation1.push_back(p1);
    out.occupation_se.push_back(std::sqrt(p1 * (1.0 - p1) / n));
  }
  return out;
}

}  // namespace semimarkov
}  // namespace qsm
