#include <chrono>
#include <numeric>

#include "wlda/adam.hpp"
#include "wlda/errors.hpp"
#include "wlda/model.hpp"
#include "wlda/simplex.hpp"

namespace wlda {

TrainResult train(const corpus::Corpus& corpus, const TrainConfig& config, Rng& rng, const EpochCallback& on_epoch) {
  config.validate();
  corpus.validate();
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < corpus.docs.size(); ++i)
    if (corpus.docs[i].total() > 0) usable.push_back(i);
  if (usable.size() < 2) throw InvalidArgument("train: corpus needs at least 2 non-empty documents");

  TrainResult result;
  result.model = init_model(corpus.vocab_size, config.num_topics, config.hidden, config.activation, rng);
  WldaModel& model = result.model;
  nn::AdamState adam({config.learning_rate, config.beta1, config.beta2, config.epsilon}, model.blocks());
  const auto prior = simplex::DirichletParams::symmetric(config.num_topics, config.dirichlet_alpha);
  const bool noisy = config.noise_alpha > 0.0;
  const std::size_t batch_size = std::min(config.batch_size, usable.size());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    rng.shuffle(usable);
    double recon_sum = 0.0, mmd_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t begin = 0; begin < usable.size(); begin += batch_size) {
      const std::size_t end = std::min(begin + batch_size, usable.size());
      if (end - begin < 2) break;  // the MMD estimator needs two samples
      Batch batch;
      for (std::size_t i = begin; i < end; ++i) batch.docs.push_back(&corpus.docs[usable[i]]);
      batch.prior_draws = simplex::sample_dirichlet_batch(prior, batch.docs.size(), rng);
      if (noisy) batch.noise_draws = simplex::sample_dirichlet_batch(prior, batch.docs.size(), rng);

      auto obj = batch_objective(model, batch, config);
      nn::adam_step(adam, model.blocks(), nn::as_const(obj.grads.blocks()));
      recon_sum += obj.recon;
      mmd_sum += obj.mmd;
      ++steps;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.recon = steps ? recon_sum / static_cast<double>(steps) : 0.0;
    rec.mmd = steps ? mmd_sum / static_cast<double>(steps) : 0.0;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.report.epochs.push_back(rec);
    if (!model.topics.all_finite()) throw NumericError("train: topic matrix diverged to non-finite values");
    if (on_epoch) on_epoch(rec, model);
  }
  return result;
}

}  // namespace wlda
