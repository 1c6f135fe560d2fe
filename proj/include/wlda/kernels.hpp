#pragma once

// Hot loops of the MMD regularizer in two builds: a plain serial reference
// and an OpenMP row-parallel version. Both accumulate every per-row sum in
// the same index order, so their results are bit-identical; the tests hold
// them to that.

#include <cmath>
#include <span>
#include <vector>

#include "wlda/matrix.hpp"
#include "wlda/simplex_vector.hpp"

namespace wlda::kernels {

enum class Exec { serial, parallel };

struct MmdResult {
  double value = 0.0;
  std::vector<Vector> grad_q;  // empty unless requested
};

MmdResult mmd_serial(std::span<const SimplexVector> q, std::span<const SimplexVector> p, bool want_grad);
MmdResult mmd_parallel(std::span<const SimplexVector> q, std::span<const SimplexVector> p, bool want_grad);

inline MmdResult mmd(std::span<const SimplexVector> q, std::span<const SimplexVector> p, bool want_grad, Exec exec) {
  return exec == Exec::parallel ? mmd_parallel(q, p, want_grad) : mmd_serial(q, p, want_grad);
}

/// Diffusion-kernel Gram matrix of one sample set.
Matrix gram_serial(std::span<const SimplexVector> samples);
Matrix gram_parallel(std::span<const SimplexVector> samples);

namespace detail {

inline constexpr double kCoincidentInner = 1.0 - 1e-12;

inline double clamp_inner(double s) noexcept { return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s); }

/// Kernel value from the clamped inner product of square roots.
inline double kernel_from_inner(double s) noexcept {
  const double a = std::acos(s);
  return std::exp(-a * a);
}

/// dk/ds for k = exp(-arccos^2 s), given k. Capped at coincident points
/// where arccos(s)/sqrt(1-s^2) -> 1.
inline double kernel_dk_ds(double s, double k) noexcept {
  if (s >= kCoincidentInner) return 2.0 * k;
  return 2.0 * k * std::acos(s) / std::sqrt(1.0 - s * s);
}

/// Element-wise square roots of every sample.
std::vector<Vector> roots(std::span<const SimplexVector> samples);

void validate_mmd_inputs(std::span<const SimplexVector> q, std::span<const SimplexVector> p);

/// Row i over square-rooted samples: within-q kernel sum over j != i and
/// cross sum over all of p. When `grad` is non-null, adds
/// within_scale * d(within)/dq_i + cross_scale * d(cross)/dq_i into it.
void mmd_row(std::size_t i, const std::vector<Vector>& rq, const std::vector<Vector>& rp, double within_scale,
             double cross_scale, double& within_sum, double& cross_sum, Vector* grad);

/// Within-p kernel sum over j != i.
double prior_row(std::size_t i, const std::vector<Vector>& rp);

/// Sums per-row partials in index order and applies the estimator weights.
double combine_rows(const std::vector<double>& qq, const std::vector<double>& pp, const std::vector<double>& qp,
                    std::size_t n, std::size_t m);

}  // namespace detail
}  // namespace wlda::kernels
