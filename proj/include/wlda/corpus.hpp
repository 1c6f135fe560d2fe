#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wlda/matrix.hpp"
#include "wlda/rng.hpp"
#include "wlda/simplex_vector.hpp"

namespace wlda::corpus {

using WordId = std::uint32_t;

class Vocabulary {
 public:
  /// Returns the id of `word`, assigning the next free id on first sight.
  WordId add(const std::string& word);
  std::optional<WordId> find(const std::string& word) const;
  const std::string& word(WordId id) const { return words_.at(id); }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::vector<std::string>& words() const noexcept { return words_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

/// Sparse bag of words: (id, count) pairs sorted by id, counts >= 1.
class BowDocument {
 public:
  BowDocument() = default;
  /// Accepts pairs in any order; merges duplicates and drops zero counts.
  explicit BowDocument(std::vector<std::pair<WordId, std::uint32_t>> entries);

  const std::vector<std::pair<WordId, std::uint32_t>>& entries() const noexcept { return entries_; }
  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint32_t count(WordId id) const noexcept;
  /// Largest id + 1, or 0 for an empty document.
  std::size_t min_vocab_size() const noexcept { return entries_.empty() ? 0 : entries_.back().first + 1; }

  /// Dense count vector of length `vocab_size`; throws DimensionError on an
  /// out-of-vocabulary id.
  Vector dense(std::size_t vocab_size) const;

  friend bool operator==(const BowDocument&, const BowDocument&) = default;

 private:
  std::vector<std::pair<WordId, std::uint32_t>> entries_;
  std::uint64_t total_ = 0;
};

struct Corpus {
  std::size_t vocab_size = 0;
  std::vector<BowDocument> docs;
  Vocabulary vocab;  // empty for synthetic corpora

  std::uint64_t total_tokens() const noexcept;
  /// Throws DimensionError if any document references an id >= vocab_size.
  void validate() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

enum class LengthLaw { poisson, fixed };

struct SyntheticSpec {
  std::size_t vocab_size = 100;
  std::size_t num_topics = 5;
  double dirichlet_alpha = 0.1;
  double topic_eta = 0.05;  // concentration of the ground-truth topic-word draws
  std::size_t num_docs = 10000;
  LengthLaw length_law = LengthLaw::poisson;
  double mean_length = 30.0;  // Poisson mean, or the exact length when fixed
  std::uint64_t seed = 0;
  /// Redraw the topic matrix until the mean pairwise overlap of the topics'
  /// top-`separation_top` sets is below `max_mean_overlap`. 0 disables.
  std::size_t separation_top = 10;
  double max_mean_overlap = 3.0;

  /// Throws InvalidArgument on V < K, K < 2, num_docs < 1 or mean length < 1.
  void validate() const;
};

struct SyntheticGroundTruth {
  std::vector<SimplexVector> topics;  // K rows over V
  std::vector<SimplexVector> theta;   // one per document

  friend bool operator==(const SyntheticGroundTruth&, const SyntheticGroundTruth&) = default;
};

struct SyntheticCorpus {
  Corpus corpus;
  SyntheticGroundTruth truth;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// Top-L word ids per row, descending, ties broken by lower id.
std::vector<std::vector<WordId>> top_words(const std::vector<SimplexVector>& rows, std::size_t L);

/// Mean over topic pairs of |top_L(a) ∩ top_L(b)|.
double mean_pairwise_overlap(const std::vector<std::vector<WordId>>& topics);

/// argmax_k theta_k per document (lowest index on ties).
std::vector<std::size_t> argmax_labels(const std::vector<SimplexVector>& theta);

struct TextOptions {
  std::optional<std::filesystem::path> stopwords;
  std::uint64_t min_count = 1;
};

/// One document per line, ASCII-lowercased, split on whitespace. Vocabulary
/// ids follow first occurrence among words that survive pruning. Documents
/// left empty by pruning stay in place so line numbers remain aligned.
Corpus load_text(const std::filesystem::path& path, const TextOptions& options = {});

struct LoadedCorpus {
  Corpus corpus;
  std::optional<SyntheticGroundTruth> truth;
};

inline constexpr int kCorpusFormatVersion = 1;

void save_corpus(const std::filesystem::path& path, const Corpus& corpus, const SyntheticGroundTruth* truth = nullptr);
LoadedCorpus load_corpus(const std::filesystem::path& path);

std::vector<std::size_t> load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const std::vector<std::size_t>& labels);

}  // namespace wlda::corpus
