#include "wlda/prior_match.hpp"

#include <algorithm>
#include <cmath>

#include "wlda/adam.hpp"
#include "wlda/errors.hpp"
#include "wlda/simplex.hpp"

namespace wlda {

void PriorMatchConfig::validate() const {
  if (dim < 2) throw InvalidArgument("prior matching: dim must be >= 2");
  if (!(alpha > 0.0)) throw InvalidArgument("prior matching: alpha must be positive");
  if (batch_size < 2) throw InvalidArgument("prior matching: batch_size must be >= 2");
  if (num_inputs < batch_size) throw InvalidArgument("prior matching: need at least one full batch of inputs");
  if (eval_samples < 2) throw InvalidArgument("prior matching: eval_samples must be >= 2");
  if (!(learning_rate >= 0.0) || !(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidArgument("prior matching: bad optimizer settings");
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

std::vector<Vector> gaussian_inputs(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<Vector> xs(count, Vector(dim));
  for (auto& x : xs)
    for (double& v : x) v = rng.normal();
  return xs;
}

std::vector<SimplexVector> encode_all(const nn::MlpParams& enc, const std::vector<Vector>& xs, kernels::Exec exec) {
  std::vector<SimplexVector> out(xs.size());
  const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(static) if (exec == kernels::Exec::parallel)
  for (long i = 0; i < n; ++i) {
    auto logits = nn::mlp_forward(enc, xs[static_cast<std::size_t>(i)]).logits;
    nn::softmax_inplace(logits);
    out[static_cast<std::size_t>(i)] = SimplexVector::from_normalized(std::move(logits));
  }
  return out;
}

}  // namespace

PriorMatchResult run_prior_matching(const PriorMatchConfig& config, const PriorCheckpointCallback& on_checkpoint) {
  config.validate();
  Rng rng(config.seed);
  const auto prior = simplex::DirichletParams::symmetric(config.dim, config.alpha);
  const bool parallel = config.exec == kernels::Exec::parallel;

  std::vector<std::size_t> sizes(config.hidden_layers + 2, config.dim);
  PriorMatchResult result;
  nn::MlpParams& enc = result.encoder;
  enc = nn::init_mlp(sizes, config.activation, rng);

  const auto train_x = gaussian_inputs(config.num_inputs, config.dim, rng);
  const auto eval_x = gaussian_inputs(config.eval_samples, config.dim, rng);
  const auto eval_prior = simplex::sample_dirichlet_batch(prior, config.eval_samples, rng);

  if (config.null_resamples > 0) {
    for (std::size_t r = 0; r < config.null_resamples; ++r) {
      const auto a = simplex::sample_dirichlet_batch(prior, config.eval_samples, rng);
      const auto b = simplex::sample_dirichlet_batch(prior, config.eval_samples, rng);
      result.null_mmd.push_back(kernels::mmd(a, b, false, config.exec).value);
    }
    std::sort(result.null_mmd.begin(), result.null_mmd.end());
    result.null_p95 = sorted_quantile(result.null_mmd, 0.95);
  }

  auto checkpoint = [&](std::size_t epoch) {
    PriorCheckpoint cp;
    cp.epoch = epoch;
    cp.encoder_samples = encode_all(enc, eval_x, config.exec);
    cp.prior_samples = eval_prior;
    cp.mmd = kernels::mmd(cp.encoder_samples, cp.prior_samples, false, config.exec).value;
    if (on_checkpoint) on_checkpoint(cp);
    cp.encoder_samples.clear();
    cp.prior_samples.clear();
    result.checkpoints.push_back(std::move(cp));
  };
  checkpoint(0);

  nn::AdamState adam({config.learning_rate, config.beta1, 0.999, 1e-8}, enc.blocks());
  std::vector<std::size_t> order(train_x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t m = config.batch_size;
  std::vector<nn::MlpForward> fwd(m);
  std::vector<nn::MlpParams> grads(m);
  for (auto& g : grads) g = nn::zeros_like(enc);
  std::vector<SimplexVector> q(m);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t begin = 0; begin + m <= order.size(); begin += m) {
      const long lm = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (parallel)
      for (long i = 0; i < lm; ++i) {
        const auto u = static_cast<std::size_t>(i);
        fwd[u] = nn::mlp_forward(enc, train_x[order[begin + u]]);
        Vector p = fwd[u].logits;
        nn::softmax_inplace(p);
        q[u] = SimplexVector::from_normalized(std::move(p));
      }
      const auto draws = simplex::sample_dirichlet_batch(prior, m, rng);
      const auto mmd = kernels::mmd(q, draws, true, config.exec);

#pragma omp parallel for schedule(static) if (parallel)
      for (long i = 0; i < lm; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const auto& theta = q[u];
        const auto& g = mmd.grad_q[u];
        const double inner = dot(theta.entries(), g);
        Vector g_logits(theta.size());
        for (std::size_t k = 0; k < g_logits.size(); ++k) g_logits[k] = theta[k] * (g[k] - inner);
        grads[u].fill(0.0);
        nn::mlp_backward_accumulate(enc, fwd[u].cache, g_logits, grads[u]);
      }
      for (std::size_t i = 1; i < m; ++i) {
        auto total = grads[0].blocks();
        auto part = grads[i].blocks();
        for (std::size_t b = 0; b < total.size(); ++b) axpy(total[b], part[b]);
      }
      nn::adam_step(adam, enc.blocks(), nn::as_const(grads[0].blocks()));
    }
    if (epoch == config.epochs || (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0)) checkpoint(epoch);
  }
  return result;
}

}  // namespace wlda
