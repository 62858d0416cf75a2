#pragma once

#include <concepts>
#include <vector>

#include "qsm/quantum/channel.hpp"
#include "qsm/quantum/generator.hpp"

namespace qsm {

/// A time-local process L(t) = rate(t) G with a fixed unit-rate generator G
/// and a closed-form map.
template <class P>
concept TimeLocalProcess = requires(const P& p, double t) {
  { p.dim() } -> std::convertible_to<Eigen::Index>;
  { p.rate(t) } -> std::convertible_to<double>;
  { p.map_at(t) } -> std::same_as<QuantumMap>;
  { p.jump_generator() } -> std::same_as<SuperOperator>;
  { p.jump_structure() } -> std::same_as<JumpStructure>;
  { p.singular_times(t, t) } -> std::same_as<std::vector<double>>;
};

}  // namespace qsm
