#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wlda/corpus.hpp"
#include "wlda/matrix.hpp"

namespace wlda::metrics {

using corpus::WordId;

/// K ordered word lists of a common length L, ids distinct within a list.
class TopicSet {
 public:
  TopicSet() = default;
  /// Throws InvalidArgument on an empty set, mixed lengths, L == 0 or a
  /// repeated id within one topic.
  explicit TopicSet(std::vector<std::vector<WordId>> topics);

  std::size_t num_topics() const noexcept { return topics_.size(); }
  std::size_t top_n() const noexcept { return topics_.empty() ? 0 : topics_.front().size(); }
  const std::vector<WordId>& operator[](std::size_t k) const { return topics_[k]; }
  const std::vector<std::vector<WordId>>& topics() const noexcept { return topics_; }

  friend bool operator==(const TopicSet&, const TopicSet&) = default;

 private:
  std::vector<std::vector<WordId>> topics_;
};

struct PerTopicScore {
  std::vector<double> per_topic;
  double mean = 0.0;
};

/// TU(k) = (1/L) sum_l 1 / cnt(l, k), cnt = number of topics whose list
/// contains the word.
PerTopicScore topic_uniqueness(const TopicSet& topics);

/// Document-level co-occurrence counts restricted to a word set.
class CooccurrenceIndex {
 public:
  std::uint64_t num_docs() const noexcept { return num_docs_; }
  /// True when the word occurs in at least one indexed document.
  bool contains(WordId w) const { return df(w) > 0; }
  /// 0 for words outside the index.
  std::uint64_t df(WordId w) const;
  /// Symmetric; 0 if either word is outside the index.
  std::uint64_t joint(WordId a, WordId b) const;

  friend CooccurrenceIndex build_cooccurrence_index(const corpus::Corpus& corpus, const std::vector<WordId>& words);

 private:
  std::uint64_t num_docs_ = 0;
  std::map<WordId, std::uint64_t> df_;
  std::map<std::pair<WordId, WordId>, std::uint64_t> joint_;  // key (min, max)
};

CooccurrenceIndex build_cooccurrence_index(const corpus::Corpus& corpus, const std::vector<WordId>& words);

/// All distinct ids appearing in the topic set, ascending.
std::vector<WordId> topic_vocabulary(const TopicSet& topics);

/// ln(P(a,b) / (P(a) P(b))) / -ln P(a,b) with document-frequency
/// probabilities. Zero joint count scores -1; a pair present in every
/// document scores 1. Throws InvalidArgument when the index has no documents.
double npmi_pair(const CooccurrenceIndex& index, WordId a, WordId b);

struct NpmiScore : PerTopicScore {
  std::vector<WordId> missing_words;  // topic words absent from the index
};

/// Mean NPMI over the C(L, 2) pairs of each topic, then over topics.
NpmiScore npmi(const TopicSet& topics, const CooccurrenceIndex& index);

/// Permutation-aligned precision: max over topic matchings of the mean of
/// |pred_k ∩ truth_sigma(k)| / L. Exhaustive for K <= 8, Hungarian above.
/// Throws DimensionError unless K and L agree.
double recovery_precision(const TopicSet& predicted, const TopicSet& truth);
double recovery_precision_exhaustive(const TopicSet& predicted, const TopicSet& truth);
double recovery_precision_assignment(const TopicSet& predicted, const TopicSet& truth);

/// Minimum-cost perfect matching on a square cost matrix: result[row] = col.
std::vector<std::size_t> hungarian_min_cost(const Matrix& cost);

struct ProbeConfig {
  double learning_rate = 0.01;
  std::size_t iterations = 100;
};

/// Linear softmax classifier (C x dim weights + bias) trained by full-batch
/// Adam on cross-entropy from zero initialization; returns test accuracy.
/// Throws InvalidArgument on empty splits or mismatched feature/label counts.
double classification_probe(const std::vector<Vector>& train_x, const std::vector<std::size_t>& train_y,
                            const std::vector<Vector>& test_x, const std::vector<std::size_t>& test_y,
                            const ProbeConfig& config = {});

struct MetricsReport {
  PerTopicScore tu;
  NpmiScore npmi;
  std::optional<double> precision;
  std::optional<double> accuracy;

  std::string to_json() const;
  std::string to_text() const;
  /// Fixed columns: mean_tu,mean_npmi,precision,accuracy (blank when absent).
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// One topic per line, word ids separated by single spaces.
void save_topics(const std::filesystem::path& path, const TopicSet& topics);
TopicSet load_topics(const std::filesystem::path& path);

/// TU and NPMI on `corpus`; precision when `truth` is given.
MetricsReport evaluate_topics(const TopicSet& topics, const corpus::Corpus& corpus, const TopicSet* truth = nullptr);

}  // namespace wlda::metrics
