#include <omp.h>

#include "wlda/kernels.hpp"

namespace wlda::kernels {

// Rows are independent; each thread writes only its own row slots and the
// final combination runs serially in index order.
MmdResult mmd_parallel(std::span<const SimplexVector> q, std::span<const SimplexVector> p, bool want_grad) {
  detail::validate_mmd_inputs(q, p);
  const std::size_t n = q.size(), m = p.size();
  const auto rq = detail::roots(q);
  const auto rp = detail::roots(p);
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  const double within_q = 1.0 / (dn * (dn - 1.0));
  const double cross = 2.0 / (dn * dm);

  MmdResult out;
  if (want_grad) out.grad_q.assign(n, Vector(q.front().size(), 0.0));
  std::vector<double> qq(n), qp(n), pp(m);
  const long ln = static_cast<long>(n), lm = static_cast<long>(m);
#pragma omp parallel
  {
#pragma omp for schedule(static) nowait
    for (long i = 0; i < ln; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      detail::mmd_row(ui, rq, rp, 2.0 * within_q, -cross, qq[ui], qp[ui], want_grad ? &out.grad_q[ui] : nullptr);
    }
#pragma omp for schedule(static)
    for (long i = 0; i < lm; ++i) pp[static_cast<std::size_t>(i)] = detail::prior_row(static_cast<std::size_t>(i), rp);
  }
  out.value = detail::combine_rows(qq, pp, qp, n, m);
  return out;
}

Matrix gram_parallel(std::span<const SimplexVector> samples) {
  const auto r = detail::roots(samples);
  const long n = static_cast<long>(samples.size());
  Matrix g(samples.size(), samples.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      g(ui, uj) = detail::kernel_from_inner(detail::clamp_inner(dot(r[ui], r[uj])));
    }
  return g;
}

}  // namespace wlda::kernels
