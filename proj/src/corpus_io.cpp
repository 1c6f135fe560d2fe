#include <fstream>
#include <sstream>

#include "wlda/corpus.hpp"
#include "wlda/errors.hpp"
#include "wlda/textio.hpp"

namespace wlda::corpus {

namespace {

constexpr const char* kMagic = "wlda-corpus";

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path.string()), in_(path) {
    if (!in_) throw ParseError(path_, 0, "cannot open corpus file");
  }

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(path_, line_no_ + 1, "unexpected end of file");
    ++line_no_;
    return line;
  }

  /// Reads "<key> <value>" and returns value.
  std::string keyed(const std::string& key) {
    std::string line = next();
    std::istringstream ss(line);
    std::string k, v, extra;
    ss >> k >> v;
    if (k != key || v.empty() || (ss >> extra)) fail("expected '" + key + " <value>', got '" + line + "'");
    return v;
  }

  std::uint64_t keyed_u64(const std::string& key) { return textio::parse_u64(keyed(key), path_, line_no_); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, line_no_, what); }
  const std::string& path() const { return path_; }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

void write_row(std::ostream& out, const SimplexVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << textio::hex_double(v[i]);
  }
  out << '\n';
}

SimplexVector read_row(LineReader& r, std::size_t dim) {
  std::istringstream ss(r.next());
  std::vector<double> v;
  std::string tok;
  while (ss >> tok) v.push_back(textio::parse_double(tok, r.path(), r.line_no()));
  if (v.size() != dim) r.fail("expected " + std::to_string(dim) + " values, got " + std::to_string(v.size()));
  if (!is_on_simplex(v, 1e-9)) r.fail("row is not a probability vector");
  return SimplexVector::from_normalized(std::move(v));
}

}  // namespace

void save_corpus(const std::filesystem::path& path, const Corpus& corpus, const SyntheticGroundTruth* truth) {
  corpus.validate();
  if (truth && truth->theta.size() != corpus.docs.size())
    throw DimensionError("save_corpus: ground truth covers " + std::to_string(truth->theta.size()) + " docs, corpus has " +
                         std::to_string(corpus.docs.size()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open for writing");
  out << kMagic << ' ' << kCorpusFormatVersion << '\n';
  out << "vocab_size " << corpus.vocab_size << '\n';
  out << "num_docs " << corpus.docs.size() << '\n';
  out << "truth_topics " << (truth ? truth->topics.size() : 0) << '\n';
  out << "vocab " << (corpus.vocab.empty() ? 0 : 1) << '\n';
  for (const auto& w : corpus.vocab.words()) out << w << '\n';
  out << "docs\n";
  for (const auto& d : corpus.docs) {
    bool first = true;
    for (const auto& [id, c] : d.entries()) {
      if (!first) out << ' ';
      out << id << ':' << c;
      first = false;
    }
    out << '\n';
  }
  if (truth) {
    out << "truth\n";
    for (const auto& t : truth->topics) write_row(out, t);
    for (const auto& t : truth->theta) write_row(out, t);
  }
  out << "end\n";
  if (!out) throw ParseError(path.string(), 0, "write failed");
}

LoadedCorpus load_corpus(const std::filesystem::path& path) {
  LineReader r(path);
  {
    std::istringstream ss(r.next());
    std::string magic, version;
    ss >> magic >> version;
    if (magic != kMagic) r.fail("not a corpus file (missing '" + std::string(kMagic) + "' header)");
    if (version != std::to_string(kCorpusFormatVersion))
      r.fail("unsupported corpus format version '" + version + "' (expected " + std::to_string(kCorpusFormatVersion) + ")");
  }
  LoadedCorpus lc;
  Corpus& c = lc.corpus;
  c.vocab_size = r.keyed_u64("vocab_size");
  const std::uint64_t num_docs = r.keyed_u64("num_docs");
  const std::uint64_t num_topics = r.keyed_u64("truth_topics");
  const std::uint64_t has_vocab = r.keyed_u64("vocab");
  if (has_vocab > 1) r.fail("vocab flag must be 0 or 1");
  if (has_vocab) {
    for (std::size_t i = 0; i < c.vocab_size; ++i) {
      std::string w = r.next();
      if (w.empty() || w.find_first_of(" \t") != std::string::npos) r.fail("malformed vocabulary word");
      if (c.vocab.add(w) != i) r.fail("duplicate vocabulary word '" + w + "'");
    }
  }
  if (r.next() != "docs") r.fail("expected 'docs'");
  c.docs.reserve(num_docs);
  for (std::uint64_t d = 0; d < num_docs; ++d) {
    std::istringstream ss(r.next());
    std::string tok;
    std::vector<std::pair<WordId, std::uint32_t>> entries;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) r.fail("expected id:count, got '" + tok + "'");
      const auto id = textio::parse_u64(std::string_view(tok).substr(0, colon), r.path(), r.line_no());
      const auto cnt = textio::parse_u64(std::string_view(tok).substr(colon + 1), r.path(), r.line_no());
      if (id >= c.vocab_size) r.fail("word id " + std::to_string(id) + " outside vocabulary");
      if (cnt == 0 || cnt > UINT32_MAX) r.fail("count out of range");
      entries.emplace_back(static_cast<WordId>(id), static_cast<std::uint32_t>(cnt));
    }
    c.docs.emplace_back(std::move(entries));
  }
  std::string tail = r.next();
  if (num_topics > 0) {
    if (tail != "truth") r.fail("expected 'truth'");
    SyntheticGroundTruth t;
    for (std::uint64_t k = 0; k < num_topics; ++k) t.topics.push_back(read_row(r, c.vocab_size));
    for (std::uint64_t d = 0; d < num_docs; ++d) t.theta.push_back(read_row(r, num_topics));
    lc.truth = std::move(t);
    tail = r.next();
  }
  if (tail != "end") r.fail("expected 'end'");
  return lc;
}

std::vector<std::size_t> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open labels file");
  std::vector<std::size_t> labels;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    labels.push_back(textio::parse_u64(line, path.string(), n));
  }
  return labels;
}

void save_labels(const std::filesystem::path& path, const std::vector<std::size_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open for writing");
  for (auto l : labels) out << l << '\n';
}

}  // namespace wlda::corpus
