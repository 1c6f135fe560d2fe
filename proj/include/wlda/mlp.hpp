#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wlda/matrix.hpp"
#include "wlda/rng.hpp"
#include "wlda/simplex_vector.hpp"

namespace wlda::nn {

enum class Activation { softplus, leaky_relu };

inline constexpr double kLeakySlope = 0.01;

/// Writable views over every parameter array, in a fixed order. Used by the
/// optimizer and by the finite-difference oracle.
using ParamBlocks = std::vector<std::span<double>>;

/// Numerically stable softmax (max logit subtracted first).
/// Throws DimensionError on empty input, NumericError on non-finite input.
SimplexVector softmax(std::span<const double> logits);

/// In-place variant for hot loops; no validation.
void softmax_inplace(std::span<double> v);

double activate(Activation act, double x) noexcept;
double activate_derivative(Activation act, double x) noexcept;

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Fully connected network. Hidden layers apply `activation`; the last
/// layer is linear and produces pre-softmax logits.
struct MlpParams {
  std::vector<Layer> layers;
  Activation activation = Activation::softplus;

  std::size_t input_dim() const noexcept { return layers.empty() ? 0 : layers.front().weight.cols(); }
  std::size_t output_dim() const noexcept { return layers.empty() ? 0 : layers.back().weight.rows(); }
  std::vector<std::size_t> layer_sizes() const;

  ParamBlocks blocks();
  void fill(double v);

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// `sizes` lists input, hidden..., output widths (at least two entries).
MlpParams init_mlp(std::span<const std::size_t> sizes, Activation activation, Rng& rng);
MlpParams zeros_like(const MlpParams& params);

struct MlpCache {
  std::vector<Vector> inputs;  // input to each layer
  std::vector<Vector> pre;     // pre-activation output of each layer
};

struct MlpForward {
  Vector logits;
  MlpCache cache;
};

MlpForward mlp_forward(const MlpParams& params, std::span<const double> x);

struct MlpBackward {
  MlpParams grads;
  Vector grad_input;
};

MlpBackward mlp_backward(const MlpParams& params, const MlpCache& cache, std::span<const double> grad_logits);

/// Adds this example's parameter gradients into `grads` (shaped like
/// `params`). Writes d(loss)/d(input) into `grad_input` when non-null.
void mlp_backward_accumulate(const MlpParams& params, const MlpCache& cache, std::span<const double> grad_logits,
                             MlpParams& grads, Vector* grad_input = nullptr);

}  // namespace wlda::nn
