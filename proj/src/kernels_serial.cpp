#include <string>

#include "wlda/errors.hpp"
#include "wlda/kernels.hpp"

namespace wlda::kernels {
namespace detail {

std::vector<Vector> roots(std::span<const SimplexVector> samples) {
  std::vector<Vector> r;
  r.reserve(samples.size());
  for (const auto& s : samples) {
    Vector v(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) v[k] = std::sqrt(s[k]);
    r.push_back(std::move(v));
  }
  return r;
}

void validate_mmd_inputs(std::span<const SimplexVector> q, std::span<const SimplexVector> p) {
  if (q.size() < 2 || p.size() < 2)
    throw InvalidArgument("mmd_unbiased: need at least 2 samples per set (got " + std::to_string(q.size()) + " and " +
                          std::to_string(p.size()) + ")");
  const std::size_t dim = q.front().size();
  for (const auto& s : q)
    if (s.size() != dim) throw DimensionError("mmd_unbiased: q samples have mixed dimensions");
  for (const auto& s : p)
    if (s.size() != dim) throw DimensionError("mmd_unbiased: p sample dimension differs from q");
}

// Row i of the estimator: within-q sum over j != i, cross sum over all p,
// and optionally the gradient of row i's terms with respect to q_i.
void mmd_row(std::size_t i, const std::vector<Vector>& rq, const std::vector<Vector>& rp, double within_scale,
             double cross_scale, double& within_sum, double& cross_sum, Vector* grad) {
  const Vector& a = rq[i];
  const std::size_t dim = a.size();
  within_sum = 0.0;
  cross_sum = 0.0;
  auto accumulate = [&](const Vector& b, double scale) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += a[k] * b[k];
    s = clamp_inner(s);
    const double kv = kernel_from_inner(s);
    if (grad != nullptr) {
      const double g = scale * kernel_dk_ds(s, kv);
      for (std::size_t k = 0; k < dim; ++k)
        if (a[k] > 0.0) (*grad)[k] += g * b[k] / (2.0 * a[k]);
    }
    return kv;
  };
  for (std::size_t j = 0; j < rq.size(); ++j)
    if (j != i) within_sum += accumulate(rq[j], within_scale);
  for (std::size_t j = 0; j < rp.size(); ++j) cross_sum += accumulate(rp[j], cross_scale);
}

double prior_row(std::size_t i, const std::vector<Vector>& rp) {
  const Vector& a = rp[i];
  double sum = 0.0;
  for (std::size_t j = 0; j < rp.size(); ++j) {
    if (j == i) continue;
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * rp[j][k];
    sum += kernel_from_inner(clamp_inner(s));
  }
  return sum;
}

}  // namespace detail

namespace {

struct MmdScales {
  double within_q, within_p, cross;
};

MmdScales scales_for(std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  return {1.0 / (dn * (dn - 1.0)), 1.0 / (dm * (dm - 1.0)), 2.0 / (dn * dm)};
}

}  // namespace

double detail::combine_rows(const std::vector<double>& qq, const std::vector<double>& pp, const std::vector<double>& qp,
                    std::size_t n, std::size_t m) {
  const MmdScales sc = scales_for(n, m);
  double sqq = 0.0, spp = 0.0, sqp = 0.0;
  for (double x : qq) sqq += x;
  for (double x : pp) spp += x;
  for (double x : qp) sqp += x;
  return sc.within_q * sqq + sc.within_p * spp - sc.cross * sqp;
}

MmdResult mmd_serial(std::span<const SimplexVector> q, std::span<const SimplexVector> p, bool want_grad) {
  detail::validate_mmd_inputs(q, p);
  const std::size_t n = q.size(), m = p.size();
  const auto rq = detail::roots(q);
  const auto rp = detail::roots(p);
  const MmdScales sc = scales_for(n, m);

  MmdResult out;
  if (want_grad) out.grad_q.assign(n, Vector(q.front().size(), 0.0));
  std::vector<double> qq(n), qp(n), pp(m);
  for (std::size_t i = 0; i < n; ++i)
    detail::mmd_row(i, rq, rp, 2.0 * sc.within_q, -sc.cross, qq[i], qp[i], want_grad ? &out.grad_q[i] : nullptr);
  for (std::size_t i = 0; i < m; ++i) pp[i] = detail::prior_row(i, rp);
  out.value = detail::combine_rows(qq, pp, qp, n, m);
  return out;
}

Matrix gram_serial(std::span<const SimplexVector> samples) {
  const auto r = detail::roots(samples);
  Matrix g(samples.size(), samples.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j)
      g(i, j) = detail::kernel_from_inner(detail::clamp_inner(dot(r[i], r[j])));
  return g;
}

}  // namespace wlda::kernels
