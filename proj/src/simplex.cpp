#include "wlda/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wlda/errors.hpp"
#include "wlda/kernels.hpp"

namespace wlda {

SimplexVector::SimplexVector(std::vector<double> entries, double tolerance) : entries_(std::move(entries)) {
  if (!is_on_simplex(entries_, tolerance)) throw InvalidArgument("SimplexVector: entries are not a probability vector");
}

SimplexVector SimplexVector::uniform(std::size_t dim) {
  if (dim == 0) throw DimensionError("SimplexVector::uniform: dimension must be positive");
  return from_normalized(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

SimplexVector SimplexVector::vertex(std::size_t dim, std::size_t k) {
  if (k >= dim) throw DimensionError("SimplexVector::vertex: index out of range");
  std::vector<double> e(dim, 0.0);
  e[k] = 1.0;
  return from_normalized(std::move(e));
}

bool is_on_simplex(std::span<const double> v, double tolerance) noexcept {
  if (v.empty()) return false;
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

namespace simplex {

void DirichletParams::validate() const {
  if (alpha.empty()) throw InvalidArgument("Dirichlet: empty parameter vector");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("Dirichlet: every alpha must be positive and finite");
}

namespace {

// log of a Gamma(shape) draw. For shape < 1 the boost identity is applied in
// log space: log Gamma(a + 1) + log(U) / a.
double log_gamma_draw(double shape, Rng& rng) {
  if (shape >= 1.0) return std::log(rng.gamma(shape));
  return std::log(rng.gamma(shape + 1.0)) + std::log(rng.uniform_open()) / shape;
}

}  // namespace

SimplexVector sample_dirichlet(const DirichletParams& params, Rng& rng) {
  params.validate();
  std::vector<double> logs(params.dim());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < logs.size(); ++k) {
    logs[k] = log_gamma_draw(params.alpha[k], rng);
    mx = std::max(mx, logs[k]);
  }
  double sum = 0.0;
  for (double& x : logs) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : logs) x /= sum;
  return SimplexVector::from_normalized(std::move(logs));
}

std::vector<SimplexVector> sample_dirichlet_batch(const DirichletParams& params, std::size_t count, Rng& rng) {
  std::vector<SimplexVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_dirichlet(params, rng));
  return out;
}

double sqrt_inner(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DimensionError("simplex: dimension mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::sqrt(a[k] * b[k]);
  return kernels::detail::clamp_inner(s);
}

double geodesic_distance(const SimplexVector& a, const SimplexVector& b) {
  return 2.0 * std::acos(sqrt_inner(a.entries(), b.entries()));
}

double diffusion_kernel(std::span<const double> a, std::span<const double> b) {
  return kernels::detail::kernel_from_inner(sqrt_inner(a, b));
}

double diffusion_kernel(const SimplexVector& a, const SimplexVector& b) {
  return diffusion_kernel(a.entries(), b.entries());
}

double diffusion_kernel_accumulate_grad(std::span<const double> a, std::span<const double> b, double scale,
                                        std::span<double> grad_a) {
  if (grad_a.size() != a.size()) throw DimensionError("diffusion_kernel_accumulate_grad: gradient length mismatch");
  const double s = sqrt_inner(a, b);
  const double kv = kernels::detail::kernel_from_inner(s);
  const double g = scale * kernels::detail::kernel_dk_ds(s, kv);
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > 0.0) grad_a[k] += g * std::sqrt(b[k]) / (2.0 * std::sqrt(a[k]));
  return kv;
}

double mmd_unbiased(std::span<const SimplexVector> q_samples, std::span<const SimplexVector> p_samples) {
  return kernels::mmd_parallel(q_samples, p_samples, false).value;
}

MmdWithGrad mmd_unbiased_with_grad(std::span<const SimplexVector> q_samples, std::span<const SimplexVector> p_samples) {
  auto r = kernels::mmd_parallel(q_samples, p_samples, true);
  return {r.value, std::move(r.grad_q)};
}

}  // namespace simplex
}  // namespace wlda
