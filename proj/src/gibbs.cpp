#include "wlda/gibbs.hpp"

#include <string>

#include "wlda/errors.hpp"

namespace wlda::gibbs {

void GibbsState::remove_token(std::size_t d, std::size_t pos) {
  const std::uint32_t k = z.at(d).at(pos);
  const corpus::WordId w = words[d][pos];
  --n_dk[d * num_topics + k];
  --n_kw[k * vocab_size + w];
  --n_k[k];
}

void GibbsState::add_token(std::size_t d, std::size_t pos, std::uint32_t topic) {
  const corpus::WordId w = words.at(d).at(pos);
  z[d][pos] = topic;
  ++n_dk[d * num_topics + topic];
  ++n_kw[topic * vocab_size + w];
  ++n_k[topic];
}

bool GibbsState::counts_consistent() const {
  std::vector<std::uint32_t> dk(n_dk.size(), 0), kw(n_kw.size(), 0);
  std::vector<std::uint64_t> k_tot(num_topics, 0);
  for (std::size_t d = 0; d < words.size(); ++d)
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      const auto k = z[d][i];
      if (k >= num_topics) return false;
      ++dk[d * num_topics + k];
      ++kw[k * vocab_size + words[d][i]];
      ++k_tot[k];
    }
  return dk == n_dk && kw == n_kw && k_tot == n_k;
}

GibbsState init_random(const corpus::Corpus& corpus, std::size_t num_topics, double alpha, double eta, std::uint64_t seed) {
  if (num_topics < 2) throw InvalidArgument("gibbs: need at least 2 topics");
  if (!(alpha > 0.0) || !(eta > 0.0)) throw InvalidArgument("gibbs: alpha and eta must be positive");
  if (corpus.total_tokens() == 0) throw InvalidArgument("gibbs: corpus has no tokens");
  corpus.validate();

  GibbsState s;
  s.num_topics = num_topics;
  s.vocab_size = corpus.vocab_size;
  s.alpha = alpha;
  s.eta = eta;
  s.rng = Rng(seed);
  s.n_dk.assign(corpus.docs.size() * num_topics, 0);
  s.n_kw.assign(num_topics * corpus.vocab_size, 0);
  s.n_k.assign(num_topics, 0);
  s.words.resize(corpus.docs.size());
  s.z.resize(corpus.docs.size());
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    for (const auto& [id, c] : corpus.docs[d].entries()) s.words[d].insert(s.words[d].end(), c, id);
    s.z[d].resize(s.words[d].size());
    for (std::size_t i = 0; i < s.words[d].size(); ++i)
      s.add_token(d, i, static_cast<std::uint32_t>(s.rng.uniform_int(num_topics)));
  }
  return s;
}

std::vector<double> conditional(const GibbsState& state, std::size_t d, std::size_t pos) {
  if (d >= state.num_docs() || pos >= state.words[d].size())
    throw InvalidArgument("gibbs conditional: token (" + std::to_string(d) + ", " + std::to_string(pos) + ") out of range");
  const corpus::WordId w = state.words[d][pos];
  const double v_eta = static_cast<double>(state.vocab_size) * state.eta;
  std::vector<double> weights(state.num_topics);
  for (std::size_t k = 0; k < state.num_topics; ++k)
    weights[k] = (state.doc_topic(d, k) + state.alpha) * (state.topic_word(k, w) + state.eta) /
                 (static_cast<double>(state.n_k[k]) + v_eta);
  return weights;
}

void sweep(GibbsState& state) {
  const std::size_t K = state.num_topics, V = state.vocab_size;
  const double v_eta = static_cast<double>(V) * state.eta;
  std::vector<double> weights(K);
  for (std::size_t d = 0; d < state.num_docs(); ++d) {
    const auto& doc_words = state.words[d];
    std::uint32_t* dk = state.n_dk.data() + d * K;
    for (std::size_t i = 0; i < doc_words.size(); ++i) {
      const corpus::WordId w = doc_words[i];
      std::uint32_t k_old = state.z[d][i];
      --dk[k_old];
      --state.n_kw[k_old * V + w];
      --state.n_k[k_old];
      for (std::size_t k = 0; k < K; ++k)
        weights[k] = (dk[k] + state.alpha) * (state.n_kw[k * V + w] + state.eta) / (static_cast<double>(state.n_k[k]) + v_eta);
      const auto k_new = static_cast<std::uint32_t>(state.rng.categorical(weights));
      state.z[d][i] = k_new;
      ++dk[k_new];
      ++state.n_kw[k_new * V + w];
      ++state.n_k[k_new];
    }
  }
  ++state.sweeps_done;
}

std::vector<SimplexVector> topic_word_estimate(const GibbsState& state) {
  std::vector<SimplexVector> out;
  const double v_eta = static_cast<double>(state.vocab_size) * state.eta;
  for (std::size_t k = 0; k < state.num_topics; ++k) {
    std::vector<double> row(state.vocab_size);
    const double denom = static_cast<double>(state.n_k[k]) + v_eta;
    for (std::size_t w = 0; w < state.vocab_size; ++w) row[w] = (state.topic_word(k, w) + state.eta) / denom;
    out.push_back(SimplexVector::from_normalized(std::move(row)));
  }
  return out;
}

std::vector<std::vector<corpus::WordId>> estimate_topics(const GibbsState& state, std::size_t L) {
  if (L < 1 || L > state.vocab_size) throw InvalidArgument("estimate_topics: L must lie in [1, V]");
  return corpus::top_words(topic_word_estimate(state), L);
}

SimplexVector estimate_theta(const GibbsState& state, std::size_t d) {
  if (d >= state.num_docs()) throw InvalidArgument("estimate_theta: document index out of range");
  std::vector<double> t(state.num_topics);
  double sum = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) sum += t[k] = state.doc_topic(d, k) + state.alpha;
  for (double& x : t) x /= sum;
  return SimplexVector::from_normalized(std::move(t));
}

}  // namespace wlda::gibbs
