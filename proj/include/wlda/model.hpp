#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "wlda/corpus.hpp"
#include "wlda/kernels.hpp"
#include "wlda/matrix.hpp"
#include "wlda/mlp.hpp"
#include "wlda/rng.hpp"
#include "wlda/simplex_vector.hpp"

namespace wlda {

/// Encoder MLP (V -> hidden... -> K, softmax applied on top) plus the linear
/// decoder h = topics * theta + offset, w_hat = softmax(h).
struct WldaModel {
  nn::MlpParams encoder;
  Matrix topics;  // V x K; column k is the unnormalized topic-word vector of topic k
  Vector offset;  // V

  std::size_t vocab_size() const noexcept { return topics.rows(); }
  std::size_t num_topics() const noexcept { return topics.cols(); }

  /// Encoder blocks, then topics, then offset.
  nn::ParamBlocks blocks();
  void fill(double v);

  friend bool operator==(const WldaModel&, const WldaModel&) = default;
};

/// Glorot-uniform encoder and topic matrix, zero biases and offset.
WldaModel init_model(std::size_t vocab_size, std::size_t num_topics, std::span<const std::size_t> hidden,
                     nn::Activation activation, Rng& rng);
WldaModel zeros_like(const WldaModel& model);

/// Deterministic encoder: softmax of the encoder logits on dense counts.
/// Never mixes noise.
SimplexVector encode(const WldaModel& model, const corpus::BowDocument& doc);
SimplexVector encode_dense(const WldaModel& model, std::span<const double> counts);

/// softmax(topics * theta + offset).
SimplexVector decode(const WldaModel& model, const SimplexVector& theta);

/// -sum_i w_i log w_hat_i / (s log V), s = total count of the document.
/// Throws InvalidArgument on an empty document or V < 2.
double recon_loss(const corpus::BowDocument& doc, const SimplexVector& w_hat, std::size_t vocab_size);

/// (1 - alpha) theta + alpha noise.
SimplexVector mix_noise(const SimplexVector& theta, const SimplexVector& noise, double alpha);

enum class MmdOn { raw_theta, noised_theta };

struct TrainConfig {
  std::size_t num_topics = 5;
  std::vector<std::size_t> hidden = {100, 100};
  nn::Activation activation = nn::Activation::softplus;
  double dirichlet_alpha = 0.1;
  double noise_alpha = 0.0;
  double lambda = 1.0;
  double learning_rate = 0.002;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 50;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  MmdOn mmd_on = MmdOn::raw_theta;
  kernels::Exec exec = kernels::Exec::parallel;

  /// Throws InvalidArgument on K < 2, batch_size < 2, noise_alpha outside
  /// [0, 1], lambda < 0 or a non-positive learning rate.
  void validate() const;
};

struct ObjectiveValue {
  double loss = 0.0;   // recon + lambda * mmd
  double recon = 0.0;  // batch mean of the scaled reconstruction loss
  double mmd = 0.0;
  WldaModel grads;     // shaped like the model
};

/// Per-example inputs for one minibatch. `noise_draws` may be empty when
/// noise_alpha == 0; otherwise it holds one draw per document.
struct Batch {
  std::vector<const corpus::BowDocument*> docs;
  std::vector<SimplexVector> prior_draws;
  std::vector<SimplexVector> noise_draws;
};

/// Minibatch objective and its analytic gradient. The noise draws and prior
/// draws are constants. Per-example work may run in parallel; reductions are
/// in example order so results do not depend on the thread count.
ObjectiveValue batch_objective(const WldaModel& model, const Batch& batch, const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double recon = 0.0;     // mean over steps
  double mmd = 0.0;       // mean over steps
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t completed_epochs() const noexcept { return epochs.size(); }
};

struct TrainResult {
  WldaModel model;
  TrainReport report;
};

/// Called after every completed epoch with the current parameters.
using EpochCallback = std::function<void(const EpochRecord&, const WldaModel&)>;

/// Minibatch Adam on batch_objective. Documents are reshuffled every epoch
/// and prior/noise draws are fresh every step, all from `rng`. Empty
/// documents are skipped. Throws InvalidArgument on an empty corpus.
TrainResult train(const corpus::Corpus& corpus, const TrainConfig& config, Rng& rng, const EpochCallback& on_epoch = {});

/// For each topic, the L word ids with the largest topic-matrix entries,
/// descending, ties to the lower id. Throws InvalidArgument unless 1 <= L <= V.
std::vector<std::vector<corpus::WordId>> extract_topics(const WldaModel& model, std::size_t L);

/// Encodes every document (empty documents map to the encoding of a zero vector).
std::vector<SimplexVector> encode_corpus(const WldaModel& model, const corpus::Corpus& corpus);

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Binary layout (little-endian): 8-byte magic "WLDAMODL", u32 version,
/// u32 activation, u64 V, u64 K, u64 layer count + 1, u64 widths..., then
/// f64 encoder weights/biases per layer, topic matrix row-major, offset.
void save_model(const std::filesystem::path& path, const WldaModel& model);
WldaModel load_model(const std::filesystem::path& path);

}  // namespace wlda
