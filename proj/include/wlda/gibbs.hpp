#pragma once

#include <cstdint>
#include <vector>

#include "wlda/corpus.hpp"
#include "wlda/rng.hpp"
#include "wlda/simplex_vector.hpp"

namespace wlda::gibbs {

/// Collapsed Gibbs sampler state for LDA. Counts always agree with the
/// assignments except transiently inside remove_token/add_token pairs.
struct GibbsState {
  std::size_t num_topics = 0;
  std::size_t vocab_size = 0;
  double alpha = 0.1;  // document-topic
  double eta = 0.01;   // topic-word

  std::vector<std::vector<corpus::WordId>> words;  // tokens per document
  std::vector<std::vector<std::uint32_t>> z;       // topic per token
  std::vector<std::uint32_t> n_dk;                 // D x K row-major
  std::vector<std::uint32_t> n_kw;                 // K x V row-major
  std::vector<std::uint64_t> n_k;                  // K
  std::uint64_t sweeps_done = 0;
  Rng rng;

  std::size_t num_docs() const noexcept { return words.size(); }
  std::uint32_t doc_topic(std::size_t d, std::size_t k) const { return n_dk[d * num_topics + k]; }
  std::uint32_t topic_word(std::size_t k, std::size_t w) const { return n_kw[k * vocab_size + w]; }

  void remove_token(std::size_t d, std::size_t pos);
  void add_token(std::size_t d, std::size_t pos, std::uint32_t topic);

  /// Recounts from `z` and compares; false if any table disagrees.
  bool counts_consistent() const;
};

/// Uniform-random topic per token. Throws InvalidArgument on K < 2,
/// non-positive hyperparameters or a corpus with no tokens.
GibbsState init_random(const corpus::Corpus& corpus, std::size_t num_topics, double alpha, double eta, std::uint64_t seed);

/// Unnormalized full conditional of token (d, pos), which must already be
/// removed from the counts: (n_dk + alpha) (n_kw + eta) / (n_k + V eta).
std::vector<double> conditional(const GibbsState& state, std::size_t d, std::size_t pos);

/// Resamples every token once, in document then position order.
void sweep(GibbsState& state);

/// Point estimate (n_kw + eta) / (n_k + V eta) per topic.
std::vector<SimplexVector> topic_word_estimate(const GibbsState& state);

/// Top-L words per topic of the point estimate; ties to the lower id.
/// Works on any state, including a fresh random initialization.
/// Throws InvalidArgument if L is outside [1, V].
std::vector<std::vector<corpus::WordId>> estimate_topics(const GibbsState& state, std::size_t L);

/// (n_dk + alpha) normalized.
SimplexVector estimate_theta(const GibbsState& state, std::size_t d);

}  // namespace wlda::gibbs
