#include "wlda/selfcheck.hpp"

#include <algorithm>

#include "wlda/adam.hpp"
#include "wlda/gradcheck.hpp"
#include "wlda/model.hpp"
#include "wlda/simplex.hpp"

namespace wlda {

GradcheckReport run_objective_gradcheck(std::uint64_t seed, std::size_t instances, double tolerance,
                                        bool inject_sign_flip) {
  constexpr std::size_t V = 5, K = 2, m = 4;
  GradcheckReport report;
  report.tolerance = tolerance;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::uint64_t case_seed = seed * 1000003ull + n;
    Rng rng(case_seed);

    std::vector<corpus::BowDocument> docs;
    for (std::size_t d = 0; d < m; ++d) {
      std::vector<std::pair<corpus::WordId, std::uint32_t>> e;
      const auto tokens = 1 + rng.uniform_int(6);
      for (std::uint64_t t = 0; t < tokens; ++t) e.emplace_back(static_cast<corpus::WordId>(rng.uniform_int(V)), 1);
      docs.emplace_back(std::move(e));
    }

    TrainConfig cfg;
    cfg.num_topics = K;
    cfg.hidden = {4};
    cfg.lambda = 1.0;
    cfg.noise_alpha = (n % 2 == 1) ? 0.3 : 0.0;
    cfg.mmd_on = (n % 4 == 3) ? MmdOn::noised_theta : MmdOn::raw_theta;
    cfg.exec = kernels::Exec::serial;

    const std::size_t hidden[] = {4};
    WldaModel model = init_model(V, K, hidden, nn::Activation::softplus, rng);
    for (auto block : model.blocks())
      for (double& w : block) w += 0.5 * rng.normal();

    Batch batch;
    for (const auto& d : docs) batch.docs.push_back(&d);
    const auto prior = simplex::DirichletParams::symmetric(K, 0.5);
    batch.prior_draws = simplex::sample_dirichlet_batch(prior, m, rng);
    if (cfg.noise_alpha > 0.0) batch.noise_draws = simplex::sample_dirichlet_batch(prior, m, rng);

    auto analytic = batch_objective(model, batch, cfg).grads;
    if (inject_sign_flip) {
      double& g = analytic.topics(0, 0);
      g = g == 0.0 ? 1.0 : -g;
    }
    const auto numeric =
        nn::finite_diff_grad([&] { return batch_objective(model, batch, cfg).loss; }, model.blocks(), 1e-6);
    const double err = nn::max_relative_error(nn::as_const(analytic.blocks()), numeric);
    report.cases.push_back({case_seed, err});
    report.worst = std::max(report.worst, err);
  }
  return report;
}

}  // namespace wlda
