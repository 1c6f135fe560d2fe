#include "wlda/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wlda/errors.hpp"

namespace wlda {

nn::ParamBlocks WldaModel::blocks() {
  nn::ParamBlocks b = encoder.blocks();
  b.push_back(topics.data());
  b.push_back(offset);
  return b;
}

void WldaModel::fill(double v) {
  encoder.fill(v);
  topics.fill(v);
  std::fill(offset.begin(), offset.end(), v);
}

WldaModel init_model(std::size_t vocab_size, std::size_t num_topics, std::span<const std::size_t> hidden,
                     nn::Activation activation, Rng& rng) {
  if (vocab_size < 2) throw InvalidArgument("init_model: vocabulary must have at least 2 words");
  if (num_topics < 2) throw InvalidArgument("init_model: need at least 2 topics");
  std::vector<std::size_t> sizes{vocab_size};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(num_topics);
  WldaModel m;
  m.encoder = nn::init_mlp(sizes, activation, rng);
  m.topics = Matrix(vocab_size, num_topics);
  const double bound = std::sqrt(6.0 / static_cast<double>(vocab_size + num_topics));
  for (double& w : m.topics.data()) w = (2.0 * rng.uniform() - 1.0) * bound;
  m.offset.assign(vocab_size, 0.0);
  return m;
}

WldaModel zeros_like(const WldaModel& model) {
  return {nn::zeros_like(model.encoder), Matrix(model.topics.rows(), model.topics.cols()), Vector(model.offset.size(), 0.0)};
}

SimplexVector encode_dense(const WldaModel& model, std::span<const double> counts) {
  if (counts.size() != model.vocab_size()) throw DimensionError("encode: input length does not match vocabulary size");
  return nn::softmax(nn::mlp_forward(model.encoder, counts).logits);
}

SimplexVector encode(const WldaModel& model, const corpus::BowDocument& doc) {
  return encode_dense(model, doc.dense(model.vocab_size()));
}

namespace {

Vector decoder_logits(const WldaModel& model, std::span<const double> theta) {
  Vector h = matvec(model.topics, theta);
  axpy(h, model.offset);
  return h;
}

}  // namespace

SimplexVector decode(const WldaModel& model, const SimplexVector& theta) {
  if (theta.size() != model.num_topics())
    throw DimensionError("decode: theta has " + std::to_string(theta.size()) + " entries, model has " +
                         std::to_string(model.num_topics()) + " topics");
  return nn::softmax(decoder_logits(model, theta.entries()));
}

double recon_loss(const corpus::BowDocument& doc, const SimplexVector& w_hat, std::size_t vocab_size) {
  if (doc.total() == 0) throw InvalidArgument("recon_loss: empty document");
  if (vocab_size < 2) throw InvalidArgument("recon_loss: vocabulary must have at least 2 words");
  if (w_hat.size() != vocab_size) throw DimensionError("recon_loss: decoder output length differs from vocabulary size");
  double ce = 0.0;
  for (const auto& [id, c] : doc.entries()) {
    if (id >= vocab_size) throw DimensionError("recon_loss: word id outside vocabulary");
    ce -= static_cast<double>(c) * std::log(w_hat[id]);
  }
  return ce / (static_cast<double>(doc.total()) * std::log(static_cast<double>(vocab_size)));
}

SimplexVector mix_noise(const SimplexVector& theta, const SimplexVector& noise, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("mix_noise: alpha must lie in [0, 1]");
  if (theta.size() != noise.size()) throw DimensionError("mix_noise: dimension mismatch");
  if (alpha == 0.0) return theta;
  if (alpha == 1.0) return noise;
  std::vector<double> out(theta.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (1.0 - alpha) * theta[k] + alpha * noise[k];
  return SimplexVector::from_normalized(std::move(out));
}

void TrainConfig::validate() const {
  if (num_topics < 2) throw InvalidArgument("train config: num_topics must be >= 2");
  if (batch_size < 2) throw InvalidArgument("train config: batch_size must be >= 2");
  if (!(noise_alpha >= 0.0 && noise_alpha <= 1.0)) throw InvalidArgument("train config: noise_alpha must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw InvalidArgument("train config: lambda must be >= 0");
  if (!(learning_rate >= 0.0)) throw InvalidArgument("train config: learning rate must be >= 0");
  if (!(dirichlet_alpha > 0.0)) throw InvalidArgument("train config: dirichlet_alpha must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidArgument("train config: Adam betas must lie in [0, 1)");
  for (auto h : hidden)
    if (h == 0) throw InvalidArgument("train config: hidden widths must be positive");
}

namespace {

// Forward state of one example kept between the two backward phases.
struct ExampleState {
  nn::MlpCache cache;
  SimplexVector theta;
  SimplexVector theta_plus;
  Vector grad_h;      // d loss / d decoder logits, already divided by batch size
  Vector grad_theta;  // d loss / d theta (encoder softmax output)
  double recon = 0.0;
};

void forward_example(const WldaModel& model, const corpus::BowDocument& doc, const SimplexVector* noise, double alpha,
                     double inv_batch, ExampleState& ex) {
  const std::size_t V = model.vocab_size();
  const Vector x = doc.dense(V);
  auto fwd = nn::mlp_forward(model.encoder, x);
  ex.cache = std::move(fwd.cache);
  nn::softmax_inplace(fwd.logits);
  ex.theta = SimplexVector::from_normalized(std::move(fwd.logits));
  ex.theta_plus = noise ? mix_noise(ex.theta, *noise, alpha) : ex.theta;

  Vector h = decoder_logits(model, ex.theta_plus.entries());
  nn::softmax_inplace(h);
  const auto w_hat = SimplexVector::from_normalized(std::move(h));
  ex.recon = recon_loss(doc, w_hat, V);

  // d/dh of -sum w log softmax(h) / (s log V) = (w_hat - w / s) / log V
  const double s = static_cast<double>(doc.total());
  const double scale = inv_batch / std::log(static_cast<double>(V));
  ex.grad_h.resize(V);
  for (std::size_t i = 0; i < V; ++i) ex.grad_h[i] = w_hat[i] * scale;
  for (const auto& [id, c] : doc.entries()) ex.grad_h[id] -= static_cast<double>(c) / s * scale;

  ex.grad_theta = matvec_transposed(model.topics, ex.grad_h);
  const double keep = noise ? 1.0 - alpha : 1.0;
  for (double& g : ex.grad_theta) g *= keep;
}

// Softmax Jacobian-transpose: d/dlogits = theta * g - theta (theta . g).
Vector softmax_backward(const SimplexVector& theta, std::span<const double> g) {
  const double inner = dot(theta.entries(), g);
  Vector out(theta.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = theta[k] * (g[k] - inner);
  return out;
}

}  // namespace

ObjectiveValue batch_objective(const WldaModel& model, const Batch& batch, const TrainConfig& config) {
  const std::size_t m = batch.docs.size();
  if (m < 2) throw InvalidArgument("batch_objective: batch must hold at least 2 documents");
  if (batch.prior_draws.size() != m) throw DimensionError("batch_objective: need one prior draw per document");
  const bool noisy = config.noise_alpha > 0.0;
  if (noisy && batch.noise_draws.size() != m) throw DimensionError("batch_objective: need one noise draw per document");
  for (const auto* d : batch.docs) {
    if (d == nullptr || d->total() == 0) throw InvalidArgument("batch_objective: empty document in batch");
    if (d->min_vocab_size() > model.vocab_size()) throw DimensionError("batch_objective: word id outside vocabulary");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (batch.prior_draws[i].size() != model.num_topics() || (noisy && batch.noise_draws[i].size() != model.num_topics()))
      throw DimensionError("batch_objective: draw dimension differs from topic count");
  }

  const double inv_batch = 1.0 / static_cast<double>(m);
  const bool parallel = config.exec == kernels::Exec::parallel;
  std::vector<ExampleState> ex(m);
  const long lm = static_cast<long>(m);

#pragma omp parallel for schedule(static) if (parallel)
  for (long i = 0; i < lm; ++i) {
    const auto u = static_cast<std::size_t>(i);
    forward_example(model, *batch.docs[u], noisy ? &batch.noise_draws[u] : nullptr, config.noise_alpha, inv_batch, ex[u]);
  }

  ObjectiveValue out;
  out.grads = zeros_like(model);
  for (const auto& e : ex) out.recon += e.recon;
  out.recon *= inv_batch;

  const bool on_noised = config.mmd_on == MmdOn::noised_theta;
  std::vector<SimplexVector> q;
  q.reserve(m);
  for (const auto& e : ex) q.push_back(on_noised ? e.theta_plus : e.theta);
  auto mmd = kernels::mmd(q, batch.prior_draws, config.lambda > 0.0, config.exec);
  out.mmd = mmd.value;
  if (config.lambda > 0.0) {
    const double chain = config.lambda * (on_noised && noisy ? 1.0 - config.noise_alpha : 1.0);
    for (std::size_t i = 0; i < m; ++i) axpy(ex[i].grad_theta, mmd.grad_q[i], chain);
  }
  out.loss = out.recon + config.lambda * out.mmd;

  // Encoder gradients per example, reduced below in example order.
  std::vector<nn::MlpParams> enc_grads(m);
#pragma omp parallel for schedule(static) if (parallel)
  for (long i = 0; i < lm; ++i) {
    const auto u = static_cast<std::size_t>(i);
    enc_grads[u] = nn::zeros_like(model.encoder);
    const Vector g_logits = softmax_backward(ex[u].theta, ex[u].grad_theta);
    nn::mlp_backward_accumulate(model.encoder, ex[u].cache, g_logits, enc_grads[u]);
  }

  auto total = out.grads.encoder.blocks();
  for (std::size_t i = 0; i < m; ++i) {
    auto part = enc_grads[i].blocks();
    for (std::size_t b = 0; b < total.size(); ++b) axpy(total[b], part[b]);
    add_outer(out.grads.topics, ex[i].grad_h, ex[i].theta_plus.entries());
    axpy(out.grads.offset, ex[i].grad_h);
  }
  return out;
}

std::vector<std::vector<corpus::WordId>> extract_topics(const WldaModel& model, std::size_t L) {
  const std::size_t V = model.vocab_size(), K = model.num_topics();
  if (L < 1 || L > V) throw InvalidArgument("extract_topics: L must lie in [1, V]");
  std::vector<std::vector<corpus::WordId>> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<corpus::WordId> ids(V);
    std::iota(ids.begin(), ids.end(), corpus::WordId{0});
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(L), ids.end(), [&](auto a, auto b) {
      const double x = model.topics(a, k), y = model.topics(b, k);
      return x > y || (x == y && a < b);
    });
    ids.resize(L);
    out[k] = std::move(ids);
  }
  return out;
}

std::vector<SimplexVector> encode_corpus(const WldaModel& model, const corpus::Corpus& corpus) {
  for (const auto& d : corpus.docs)
    if (d.min_vocab_size() > model.vocab_size()) throw DimensionError("encode_corpus: word id outside model vocabulary");
  std::vector<SimplexVector> out(corpus.docs.size());
  const long n = static_cast<long>(corpus.docs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = encode(model, corpus.docs[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace wlda
