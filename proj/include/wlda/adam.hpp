#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wlda/matrix.hpp"
#include "wlda/mlp.hpp"

namespace wlda::nn {

struct AdamConfig {
  double lr = 0.002;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment accumulators for a fixed list of parameter blocks.
struct AdamState {
  AdamConfig config;
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  /// Zeroed accumulators shaped like `params`.
  AdamState(AdamConfig cfg, const ParamBlocks& params);
};

/// One bias-corrected Adam update applied in place to `params`.
/// Throws DimensionError if `params` or `grads` disagree with the state's shapes.
void adam_step(AdamState& state, const ParamBlocks& params, const std::vector<std::span<const double>>& grads);

/// Convenience: view writable blocks as read-only gradient blocks.
std::vector<std::span<const double>> as_const(const ParamBlocks& blocks);

}  // namespace wlda::nn
