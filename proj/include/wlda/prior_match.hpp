#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wlda/kernels.hpp"
#include "wlda/mlp.hpp"
#include "wlda/simplex_vector.hpp"

namespace wlda {

/// Trains an encoder on standard Gaussian inputs so that its softmax output
/// matches a symmetric Dirichlet prior, minimizing the unbiased MMD alone.
struct PriorMatchConfig {
  std::size_t dim = 2;              // input, hidden and output width
  double alpha = 0.1;               // symmetric Dirichlet parameter
  std::size_t num_inputs = 100000;  // Gaussian training inputs
  std::size_t hidden_layers = 2;
  nn::Activation activation = nn::Activation::softplus;
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  double learning_rate = 0.002;
  double beta1 = 0.99;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 1;  // epochs; epoch 0 and the last epoch are always evaluated
  std::size_t eval_samples = 512;
  std::size_t null_resamples = 200;  // 0 skips the null distribution
  kernels::Exec exec = kernels::Exec::parallel;

  void validate() const;
};

struct PriorCheckpoint {
  std::size_t epoch = 0;
  double mmd = 0.0;  // encoder outputs on held-out inputs vs a fixed prior sample
  std::vector<SimplexVector> encoder_samples;
  std::vector<SimplexVector> prior_samples;
};

struct PriorMatchResult {
  std::vector<PriorCheckpoint> checkpoints;
  std::vector<double> null_mmd;  // sorted prior-vs-prior estimates
  double null_p95 = 0.0;         // 95th percentile of null_mmd (0 when skipped)
  nn::MlpParams encoder;
};

using PriorCheckpointCallback = std::function<void(const PriorCheckpoint&)>;

PriorMatchResult run_prior_matching(const PriorMatchConfig& config, const PriorCheckpointCallback& on_checkpoint = {});

/// Linear-interpolated empirical quantile of a sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double q);

}  // namespace wlda
