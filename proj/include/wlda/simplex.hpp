#pragma once

#include <span>
#include <vector>

#include "wlda/rng.hpp"
#include "wlda/simplex_vector.hpp"

namespace wlda::simplex {

/// Dirichlet concentration parameters; every entry must be positive.
struct DirichletParams {
  std::vector<double> alpha;

  static DirichletParams symmetric(std::size_t dim, double a) { return {std::vector<double>(dim, a)}; }
  std::size_t dim() const noexcept { return alpha.size(); }
  /// Throws InvalidArgument on an empty or non-positive parameter vector.
  void validate() const;
};

/// Normalized independent Gamma(alpha_k) draws. Gammas are formed in log
/// space so very small shapes never underflow to an all-zero vector.
SimplexVector sample_dirichlet(const DirichletParams& params, Rng& rng);

std::vector<SimplexVector> sample_dirichlet_batch(const DirichletParams& params, std::size_t count, Rng& rng);

/// sum_k sqrt(a_k b_k), clamped to [0, 1].
double sqrt_inner(std::span<const double> a, std::span<const double> b);

/// 2 * arccos(sum_k sqrt(a_k b_k)); in [0, pi].
double geodesic_distance(const SimplexVector& a, const SimplexVector& b);

/// Information diffusion kernel exp(-arccos^2(sum_k sqrt(a_k b_k))); in (0, 1].
double diffusion_kernel(const SimplexVector& a, const SimplexVector& b);
double diffusion_kernel(std::span<const double> a, std::span<const double> b);

/// Adds scale * d k(a, b) / d a into `grad_a`. Coordinates with a_k = 0
/// contribute nothing. At coincident points (inner sum >= 1 - 1e-12) the
/// factor arccos(s) / sqrt(1 - s^2) takes its limiting value 1.
/// Returns k(a, b).
double diffusion_kernel_accumulate_grad(std::span<const double> a, std::span<const double> b, double scale,
                                        std::span<double> grad_a);

/// Unbiased MMD^2 estimate with the diffusion kernel: within-set
/// off-diagonal means minus twice the cross mean. May be negative.
/// Throws InvalidArgument if either set has fewer than 2 samples,
/// DimensionError on mixed dimensions.
double mmd_unbiased(std::span<const SimplexVector> q_samples, std::span<const SimplexVector> p_samples);

struct MmdWithGrad {
  double value = 0.0;
  /// d value / d q_samples[i], one vector per q sample. Prior samples are constants.
  std::vector<std::vector<double>> grad_q;
};

MmdWithGrad mmd_unbiased_with_grad(std::span<const SimplexVector> q_samples, std::span<const SimplexVector> p_samples);

}  // namespace wlda::simplex
