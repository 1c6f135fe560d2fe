#include <doctest.h>

#include <omp.h>

#include <vector>

#include "wlda/kernels.hpp"
#include "wlda/simplex.hpp"

using namespace wlda;

namespace {

struct ThreadCount {
  int saved = omp_get_max_threads();
  explicit ThreadCount(int n) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("parallel mmd is bit-identical to the serial reference") {
  Rng rng(1);
  for (std::size_t n : {2, 3, 17, 64}) {
    for (std::size_t m : {2, 9, 64}) {
      const auto q = simplex::sample_dirichlet_batch(simplex::DirichletParams::symmetric(5, 0.1), n, rng);
      const auto p = simplex::sample_dirichlet_batch(simplex::DirichletParams::symmetric(5, 0.1), m, rng);
      const auto ref = kernels::mmd_serial(q, p, true);
      for (int threads : {1, 2, 3, 8}) {
        ThreadCount tc(threads);
        const auto par = kernels::mmd_parallel(q, p, true);
        CHECK(par.value == ref.value);
        CHECK(par.grad_q == ref.grad_q);
        CHECK(kernels::mmd_parallel(q, p, false).value == ref.value);
      }
      CHECK(kernels::mmd_serial(q, p, false).grad_q.empty());
    }
  }
}

TEST_CASE("parallel gram matrix is bit-identical to the serial reference") {
  Rng rng(2);
  for (std::size_t n : {1, 2, 31, 100}) {
    const auto pts = simplex::sample_dirichlet_batch(simplex::DirichletParams::symmetric(8, 0.5), n, rng);
    const auto ref = kernels::gram_serial(pts);
    for (int threads : {1, 4}) {
      ThreadCount tc(threads);
      CHECK(kernels::gram_parallel(pts) == ref);
    }
  }
}

TEST_CASE("exec dispatch selects the implementation") {
  Rng rng(3);
  const auto q = simplex::sample_dirichlet_batch(simplex::DirichletParams::symmetric(3, 1.0), 10, rng);
  const auto p = simplex::sample_dirichlet_batch(simplex::DirichletParams::symmetric(3, 1.0), 10, rng);
  CHECK(kernels::mmd(q, p, false, kernels::Exec::serial).value == kernels::mmd(q, p, false, kernels::Exec::parallel).value);
}

TEST_CASE("kernel derivative helper matches a finite difference and caps at coincidence") {
  for (double s : {0.05, 0.3, 0.7, 0.99}) {
    const double h = 1e-7;
    const double fd = (kernels::detail::kernel_from_inner(s + h) - kernels::detail::kernel_from_inner(s - h)) / (2 * h);
    CHECK(kernels::detail::kernel_dk_ds(s, kernels::detail::kernel_from_inner(s)) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(kernels::detail::kernel_dk_ds(1.0, 1.0) == 2.0);
  CHECK(kernels::detail::clamp_inner(1.0000001) == 1.0);
  CHECK(kernels::detail::clamp_inner(-1e-17) == 0.0);
}
