#include "wlda/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "wlda/errors.hpp"
#include "wlda/simplex.hpp"

namespace wlda::corpus {

WordId Vocabulary::add(const std::string& word) {
  auto [it, inserted] = index_.try_emplace(word, static_cast<WordId>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

std::optional<WordId> Vocabulary::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BowDocument::BowDocument(std::vector<std::pair<WordId, std::uint32_t>> entries) {
  std::sort(entries.begin(), entries.end());
  for (const auto& [id, c] : entries) {
    if (c == 0) continue;
    if (!entries_.empty() && entries_.back().first == id)
      entries_.back().second += c;
    else
      entries_.emplace_back(id, c);
    total_ += c;
  }
}

std::uint32_t BowDocument::count(WordId id) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const auto& e, WordId v) { return e.first < v; });
  return it != entries_.end() && it->first == id ? it->second : 0;
}

Vector BowDocument::dense(std::size_t vocab_size) const {
  if (min_vocab_size() > vocab_size)
    throw DimensionError("BowDocument: word id " + std::to_string(entries_.back().first) +
                         " outside vocabulary of size " + std::to_string(vocab_size));
  Vector v(vocab_size, 0.0);
  for (const auto& [id, c] : entries_) v[id] = static_cast<double>(c);
  return v;
}

std::uint64_t Corpus::total_tokens() const noexcept {
  std::uint64_t t = 0;
  for (const auto& d : docs) t += d.total();
  return t;
}

void Corpus::validate() const {
  for (std::size_t i = 0; i < docs.size(); ++i)
    if (docs[i].min_vocab_size() > vocab_size)
      throw DimensionError("corpus: document " + std::to_string(i) + " has a word id outside vocabulary of size " +
                           std::to_string(vocab_size));
  if (!vocab.empty() && vocab.size() != vocab_size) throw DimensionError("corpus: vocabulary size disagrees with header");
}

void SyntheticSpec::validate() const {
  if (num_topics < 2) throw InvalidArgument("synthetic: need at least 2 topics");
  if (vocab_size < num_topics) throw InvalidArgument("synthetic: vocabulary must be at least as large as topic count");
  if (num_docs < 1) throw InvalidArgument("synthetic: need at least one document");
  if (!(mean_length >= 1.0)) throw InvalidArgument("synthetic: mean document length must be >= 1");
  if (!(dirichlet_alpha > 0.0) || !(topic_eta > 0.0)) throw InvalidArgument("synthetic: Dirichlet parameters must be positive");
}

std::vector<std::vector<WordId>> top_words(const std::vector<SimplexVector>& rows, std::size_t L) {
  std::vector<std::vector<WordId>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (L < 1 || L > r.size()) throw InvalidArgument("top_words: L out of range");
    std::vector<WordId> ids(r.size());
    std::iota(ids.begin(), ids.end(), WordId{0});
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(L), ids.end(),
                      [&](WordId a, WordId b) { return r[a] > r[b] || (r[a] == r[b] && a < b); });
    ids.resize(L);
    out.push_back(std::move(ids));
  }
  return out;
}

double mean_pairwise_overlap(const std::vector<std::vector<WordId>>& topics) {
  if (topics.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < topics.size(); ++a)
    for (std::size_t b = a + 1; b < topics.size(); ++b) {
      std::unordered_set<WordId> sa(topics[a].begin(), topics[a].end());
      std::size_t common = 0;
      for (WordId w : topics[b]) common += sa.count(w);
      total += static_cast<double>(common);
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

std::vector<std::size_t> argmax_labels(const std::vector<SimplexVector>& theta) {
  std::vector<std::size_t> labels;
  labels.reserve(theta.size());
  for (const auto& t : theta) {
    auto e = t.entries();
    labels.push_back(static_cast<std::size_t>(std::max_element(e.begin(), e.end()) - e.begin()));
  }
  return labels;
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto topic_prior = simplex::DirichletParams::symmetric(spec.vocab_size, spec.topic_eta);
  const auto doc_prior = simplex::DirichletParams::symmetric(spec.num_topics, spec.dirichlet_alpha);

  SyntheticCorpus out;
  const bool check_separation = spec.separation_top > 0 && spec.separation_top <= spec.vocab_size;
  constexpr int kMaxTopicDraws = 1000;
  for (int attempt = 0;; ++attempt) {
    out.truth.topics = simplex::sample_dirichlet_batch(topic_prior, spec.num_topics, rng);
    if (!check_separation) break;
    if (mean_pairwise_overlap(top_words(out.truth.topics, spec.separation_top)) < spec.max_mean_overlap) break;
    if (attempt + 1 == kMaxTopicDraws)
      throw InvalidArgument("synthetic: could not draw well-separated topics; raise vocab_size or lower topic_eta");
  }

  out.corpus.vocab_size = spec.vocab_size;
  out.corpus.docs.reserve(spec.num_docs);
  out.truth.theta.reserve(spec.num_docs);
  std::vector<std::uint32_t> counts(spec.vocab_size);
  for (std::size_t d = 0; d < spec.num_docs; ++d) {
    SimplexVector theta = simplex::sample_dirichlet(doc_prior, rng);
    std::uint64_t length = spec.length_law == LengthLaw::fixed ? static_cast<std::uint64_t>(spec.mean_length)
                                                              : rng.poisson(spec.mean_length);
    length = std::max<std::uint64_t>(length, 1);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t n = 0; n < length; ++n) {
      const std::size_t z = rng.categorical(theta.entries());
      const std::size_t w = rng.categorical(out.truth.topics[z].entries());
      ++counts[w];
    }
    std::vector<std::pair<WordId, std::uint32_t>> entries;
    for (std::size_t w = 0; w < counts.size(); ++w)
      if (counts[w] > 0) entries.emplace_back(static_cast<WordId>(w), counts[w]);
    out.corpus.docs.emplace_back(std::move(entries));
    out.truth.theta.push_back(std::move(theta));
  }
  return out;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

}  // namespace

Corpus load_text(const std::filesystem::path& path, const TextOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open text corpus");

  std::unordered_set<std::string> stop;
  if (options.stopwords) {
    std::ifstream sw(*options.stopwords);
    if (!sw) throw ParseError(options.stopwords->string(), 0, "cannot open stopword file");
    std::string line;
    while (std::getline(sw, line))
      for (auto& t : tokenize(line)) stop.insert(std::move(t));
  }

  std::vector<std::vector<std::string>> lines;
  std::unordered_map<std::string, std::uint64_t> freq;
  std::vector<std::string> first_seen;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize(line);
    std::erase_if(tokens, [&](const std::string& t) { return stop.count(t) > 0; });
    for (const auto& t : tokens)
      if (freq[t]++ == 0) first_seen.push_back(t);
    lines.push_back(std::move(tokens));
  }

  Corpus c;
  for (const auto& w : first_seen)
    if (freq[w] >= options.min_count) c.vocab.add(w);
  c.vocab_size = c.vocab.size();
  c.docs.reserve(lines.size());
  for (const auto& tokens : lines) {
    std::vector<std::pair<WordId, std::uint32_t>> entries;
    for (const auto& t : tokens)
      if (auto id = c.vocab.find(t)) entries.emplace_back(*id, 1);
    c.docs.emplace_back(std::move(entries));
  }
  if (c.vocab_size == 0 || c.total_tokens() == 0) throw InvalidArgument(path.string() + ": corpus is empty after pruning");
  return c;
}

}  // namespace wlda::corpus
