#pragma once

#include <cstdint>
#include <vector>

namespace wlda {

struct GradcheckCase {
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckCase> cases;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return worst < tolerance; }
};

/// Compares the analytic gradient of the full minibatch objective (scaled
/// reconstruction + lambda * MMD) against central finite differences on
/// tiny random instances: V = 5, K = 2, four documents. Instances alternate
/// noise mixing and the MMD input so every branch is covered.
/// `inject_sign_flip` negates one analytic component to prove the check bites.
GradcheckReport run_objective_gradcheck(std::uint64_t seed, std::size_t instances = 10, double tolerance = 1e-4,
                                        bool inject_sign_flip = false);

}  // namespace wlda
