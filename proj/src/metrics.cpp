#include "wlda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "wlda/adam.hpp"
#include "wlda/errors.hpp"
#include "wlda/textio.hpp"

namespace wlda::metrics {

TopicSet::TopicSet(std::vector<std::vector<WordId>> topics) : topics_(std::move(topics)) {
  if (topics_.empty()) throw InvalidArgument("TopicSet: no topics");
  const std::size_t L = topics_.front().size();
  if (L == 0) throw InvalidArgument("TopicSet: topics must list at least one word");
  for (const auto& t : topics_) {
    if (t.size() != L) throw InvalidArgument("TopicSet: every topic must list the same number of words");
    std::unordered_set<WordId> seen(t.begin(), t.end());
    if (seen.size() != t.size()) throw InvalidArgument("TopicSet: repeated word within a topic");
  }
}

PerTopicScore topic_uniqueness(const TopicSet& topics) {
  std::unordered_map<WordId, std::size_t> cnt;
  for (const auto& t : topics.topics())
    for (WordId w : t) ++cnt[w];
  PerTopicScore out;
  const double L = static_cast<double>(topics.top_n());
  for (const auto& t : topics.topics()) {
    double s = 0.0;
    for (WordId w : t) s += 1.0 / static_cast<double>(cnt[w]);
    out.per_topic.push_back(s / L);
  }
  out.mean = std::accumulate(out.per_topic.begin(), out.per_topic.end(), 0.0) / static_cast<double>(out.per_topic.size());
  return out;
}

std::uint64_t CooccurrenceIndex::df(WordId w) const {
  auto it = df_.find(w);
  return it == df_.end() ? 0 : it->second;
}

std::uint64_t CooccurrenceIndex::joint(WordId a, WordId b) const {
  if (a == b) return df(a);
  auto it = joint_.find({std::min(a, b), std::max(a, b)});
  return it == joint_.end() ? 0 : it->second;
}

CooccurrenceIndex build_cooccurrence_index(const corpus::Corpus& corpus, const std::vector<WordId>& words) {
  CooccurrenceIndex idx;
  idx.num_docs_ = corpus.docs.size();
  std::set<WordId> wanted(words.begin(), words.end());
  for (WordId w : wanted) idx.df_[w] = 0;
  std::vector<WordId> present;
  for (const auto& doc : corpus.docs) {
    present.clear();
    for (const auto& [id, c] : doc.entries())
      if (wanted.count(id)) present.push_back(id);  // entries are sorted, so present is too
    for (std::size_t i = 0; i < present.size(); ++i) {
      ++idx.df_[present[i]];
      for (std::size_t j = i + 1; j < present.size(); ++j) ++idx.joint_[{present[i], present[j]}];
    }
  }
  return idx;
}

std::vector<WordId> topic_vocabulary(const TopicSet& topics) {
  std::set<WordId> s;
  for (const auto& t : topics.topics()) s.insert(t.begin(), t.end());
  return {s.begin(), s.end()};
}

double npmi_pair(const CooccurrenceIndex& index, WordId a, WordId b) {
  if (index.num_docs() == 0) throw InvalidArgument("npmi: co-occurrence index covers no documents");
  const std::uint64_t j = index.joint(a, b);
  if (j == 0) return -1.0;
  const double D = static_cast<double>(index.num_docs());
  if (static_cast<double>(j) == D) return 1.0;
  const double p_ab = static_cast<double>(j) / D;
  const double p_a = static_cast<double>(index.df(a)) / D;
  const double p_b = static_cast<double>(index.df(b)) / D;
  return std::log(p_ab / (p_a * p_b)) / -std::log(p_ab);
}

NpmiScore npmi(const TopicSet& topics, const CooccurrenceIndex& index) {
  if (index.num_docs() == 0) throw InvalidArgument("npmi: co-occurrence index covers no documents");
  NpmiScore out;
  std::set<WordId> missing;
  for (const auto& t : topics.topics()) {
    for (WordId w : t)
      if (!index.contains(w)) missing.insert(w);
    double s = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j) {
        s += npmi_pair(index, t[i], t[j]);
        ++pairs;
      }
    out.per_topic.push_back(pairs ? s / static_cast<double>(pairs) : 0.0);
  }
  out.mean = std::accumulate(out.per_topic.begin(), out.per_topic.end(), 0.0) / static_cast<double>(out.per_topic.size());
  out.missing_words.assign(missing.begin(), missing.end());
  if (!missing.empty())
    std::cerr << "warning: " << missing.size() << " topic word(s) absent from the co-occurrence index; their pairs score -1\n";
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> overlap_matrix(const TopicSet& predicted, const TopicSet& truth) {
  if (predicted.num_topics() != truth.num_topics() || predicted.top_n() != truth.top_n())
    throw DimensionError("recovery_precision: predicted is " + std::to_string(predicted.num_topics()) + "x" +
                         std::to_string(predicted.top_n()) + ", truth is " + std::to_string(truth.num_topics()) + "x" +
                         std::to_string(truth.top_n()));
  const std::size_t K = truth.num_topics();
  std::vector<std::vector<std::size_t>> ov(K, std::vector<std::size_t>(K, 0));
  for (std::size_t a = 0; a < K; ++a) {
    std::unordered_set<WordId> s(predicted[a].begin(), predicted[a].end());
    for (std::size_t b = 0; b < K; ++b)
      for (WordId w : truth[b]) ov[a][b] += s.count(w);
  }
  return ov;
}

double normalize(std::size_t total, const TopicSet& t) {
  return static_cast<double>(total) / static_cast<double>(t.num_topics() * t.top_n());
}

}  // namespace

double recovery_precision_exhaustive(const TopicSet& predicted, const TopicSet& truth) {
  const auto ov = overlap_matrix(predicted, truth);
  std::vector<std::size_t> perm(ov.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t best = 0;
  do {
    std::size_t s = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) s += ov[k][perm[k]];
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return normalize(best, truth);
}

double recovery_precision_assignment(const TopicSet& predicted, const TopicSet& truth) {
  const auto ov = overlap_matrix(predicted, truth);
  const std::size_t K = ov.size();
  Matrix cost(K, K);
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < K; ++b) cost(a, b) = -static_cast<double>(ov[a][b]);
  const auto match = hungarian_min_cost(cost);
  std::size_t s = 0;
  for (std::size_t k = 0; k < K; ++k) s += ov[k][match[k]];
  return normalize(s, truth);
}

double recovery_precision(const TopicSet& predicted, const TopicSet& truth) {
  return truth.num_topics() <= 8 ? recovery_precision_exhaustive(predicted, truth)
                                 : recovery_precision_assignment(predicted, truth);
}

// Shortest augmenting path with potentials, O(n^3).
std::vector<std::size_t> hungarian_min_cost(const Matrix& cost) {
  const std::size_t n = cost.rows();
  if (cost.cols() != n) throw DimensionError("hungarian_min_cost: cost matrix must be square");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double classification_probe(const std::vector<Vector>& train_x, const std::vector<std::size_t>& train_y,
                            const std::vector<Vector>& test_x, const std::vector<std::size_t>& test_y,
                            const ProbeConfig& config) {
  if (train_x.empty() || test_x.empty()) throw InvalidArgument("classification_probe: empty split");
  if (train_x.size() != train_y.size() || test_x.size() != test_y.size())
    throw InvalidArgument("classification_probe: features and labels are not aligned");
  const std::size_t dim = train_x.front().size();
  for (const auto* xs : {&train_x, &test_x})
    for (const auto& x : *xs)
      if (x.size() != dim) throw DimensionError("classification_probe: mixed feature dimensions");
  std::size_t C = 0;
  for (const auto* ys : {&train_y, &test_y})
    for (auto y : *ys) C = std::max(C, y + 1);

  Matrix W(C, dim);
  Vector b(C, 0.0);
  nn::ParamBlocks params{W.data(), b};
  nn::AdamState adam({config.learning_rate, 0.9, 0.999, 1e-8}, params);
  Matrix gW(C, dim);
  Vector gb(C, 0.0);
  const double inv_n = 1.0 / static_cast<double>(train_x.size());
  for (std::size_t it = 0; it < config.iterations; ++it) {
    gW.fill(0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < train_x.size(); ++i) {
      Vector logits = matvec(W, train_x[i]);
      axpy(logits, b);
      nn::softmax_inplace(logits);
      logits[train_y[i]] -= 1.0;  // softmax-CE gradient p - y
      add_outer(gW, logits, train_x[i], inv_n);
      axpy(gb, logits, inv_n);
    }
    nn::adam_step(adam, params, {gW.data(), std::span<const double>(gb)});
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < test_x.size(); ++i) {
    Vector logits = matvec(W, test_x[i]);
    axpy(logits, b);
    const auto pred = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    correct += pred == test_y[i];
  }
  return static_cast<double>(correct) / static_cast<double>(test_x.size());
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["tu"] = {{"mean", tu.mean}, {"per_topic", tu.per_topic}};
  j["npmi"] = {{"mean", npmi.mean}, {"per_topic", npmi.per_topic}, {"missing_words", npmi.missing_words}};
  j["precision"] = precision ? nlohmann::ordered_json(*precision) : nlohmann::ordered_json(nullptr);
  j["accuracy"] = accuracy ? nlohmann::ordered_json(*accuracy) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << "mean TU:   " << textio::decimal(tu.mean) << '\n';
  out << "mean NPMI: " << textio::decimal(npmi.mean) << '\n';
  if (precision) out << "precision: " << textio::decimal(*precision) << '\n';
  if (accuracy) out << "accuracy:  " << textio::decimal(*accuracy) << '\n';
  for (std::size_t k = 0; k < tu.per_topic.size(); ++k)
    out << "topic " << k << ": TU " << textio::decimal(tu.per_topic[k]) << "  NPMI " << textio::decimal(npmi.per_topic[k])
        << '\n';
  return out.str();
}

std::string MetricsReport::csv_header() { return "mean_tu,mean_npmi,precision,accuracy"; }

std::string MetricsReport::to_csv_row() const {
  std::string row = textio::decimal(tu.mean) + "," + textio::decimal(npmi.mean) + ",";
  if (precision) row += textio::decimal(*precision);
  row += ",";
  if (accuracy) row += textio::decimal(*accuracy);
  return row;
}

void save_topics(const std::filesystem::path& path, const TopicSet& topics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open for writing");
  for (const auto& t : topics.topics()) {
    for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << t[i];
    out << '\n';
  }
}

TopicSet load_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open topics file");
  std::vector<std::vector<WordId>> topics;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream ss(line);
    std::string tok;
    std::vector<WordId> t;
    while (ss >> tok) {
      const auto id = textio::parse_u64(tok, path.string(), n);
      if (id > std::numeric_limits<WordId>::max()) throw ParseError(path.string(), n, "word id out of range");
      t.push_back(static_cast<WordId>(id));
    }
    if (!t.empty()) topics.push_back(std::move(t));
  }
  try {
    return TopicSet(std::move(topics));
  } catch (const InvalidArgument& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

MetricsReport evaluate_topics(const TopicSet& topics, const corpus::Corpus& corpus, const TopicSet* truth) {
  MetricsReport r;
  r.tu = topic_uniqueness(topics);
  r.npmi = npmi(topics, build_cooccurrence_index(corpus, topic_vocabulary(topics)));
  if (truth) r.precision = recovery_precision(topics, *truth);
  return r;
}

}  // namespace wlda::metrics
