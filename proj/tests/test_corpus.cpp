#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wlda/corpus.hpp"
#include "wlda/errors.hpp"

using namespace wlda;
using namespace wlda::corpus;

namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("wlda_corpus_" + name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("vocabulary assigns ids by first sight") {
  Vocabulary v;
  CHECK(v.add("b") == 0);
  CHECK(v.add("a") == 1);
  CHECK(v.add("b") == 0);
  CHECK(v.size() == 2);
  CHECK(*v.find("a") == 1);
  CHECK_FALSE(v.find("c").has_value());
  CHECK(v.word(1) == "a");
}

TEST_CASE("bow document merges duplicates and sorts") {
  const BowDocument d({{5, 1}, {2, 3}, {5, 2}, {7, 0}});
  CHECK(d.entries() == std::vector<std::pair<WordId, std::uint32_t>>{{2, 3}, {5, 3}});
  CHECK(d.total() == 6);
  CHECK(d.count(5) == 3);
  CHECK(d.count(4) == 0);
  CHECK(d.min_vocab_size() == 6);
  CHECK(d.dense(7) == Vector{0, 0, 3, 0, 0, 3, 0});
  CHECK_THROWS_AS(d.dense(5), DimensionError);
}

TEST_CASE("one document of one token under a degenerate length law") {
  SyntheticSpec spec;
  spec.num_docs = 1;
  spec.length_law = LengthLaw::fixed;
  spec.mean_length = 1;
  const auto sc = generate_synthetic(spec);
  REQUIRE(sc.corpus.docs.size() == 1);
  CHECK(sc.corpus.docs[0].total() == 1);
  CHECK(sc.truth.theta.size() == 1);
  CHECK(sc.truth.topics.size() == 5);
}

TEST_CASE("synthetic corpus follows the mixture marginal") {
  SyntheticSpec spec;
  spec.seed = 12;
  const auto sc = generate_synthetic(spec);
  CHECK(sc.corpus.docs.size() == 10000);
  CHECK(sc.corpus.vocab_size == 100);
  std::vector<double> freq(100, 0.0), mix(100, 0.0);
  const double total = static_cast<double>(sc.corpus.total_tokens());
  for (const auto& d : sc.corpus.docs)
    for (const auto& [w, c] : d.entries()) freq[w] += c / total;
  for (const auto& t : sc.truth.topics)
    for (std::size_t w = 0; w < 100; ++w) mix[w] += t[w] / 5.0;
  double l1 = 0.0;
  for (std::size_t w = 0; w < 100; ++w) l1 += std::abs(freq[w] - mix[w]);
  CHECK(l1 <= 0.05);
  CHECK(std::abs(total / 10000.0 - 30.0) < 0.5);
  for (const auto& d : sc.corpus.docs) CHECK(d.total() >= 1);
}

TEST_CASE("synthetic topics are separated and generation is seeded") {
  SyntheticSpec spec;
  spec.num_docs = 50;
  spec.seed = 3;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  CHECK(a.corpus == b.corpus);
  CHECK(a.truth == b.truth);
  CHECK(mean_pairwise_overlap(top_words(a.truth.topics, 10)) < 3.0);
  spec.seed = 4;
  CHECK_FALSE(generate_synthetic(spec).corpus == a.corpus);
}

TEST_CASE("synthetic generator settings are validated") {
  SyntheticSpec spec;
  spec.num_docs = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = {};
  spec.vocab_size = 3;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = {};
  spec.mean_length = 0.5;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("top words and overlap helpers") {
  const std::vector<SimplexVector> rows{SimplexVector({0.1, 0.4, 0.4, 0.1}), SimplexVector({0.7, 0.1, 0.1, 0.1})};
  const auto t = top_words(rows, 2);
  CHECK(t[0] == std::vector<WordId>{1, 2});
  CHECK(t[1] == std::vector<WordId>{0, 1});
  CHECK(mean_pairwise_overlap(t) == 1.0);
  CHECK(argmax_labels(rows) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("plain text loading") {
  const auto p = write_file("a.txt", "a b a\n");
  const auto c = load_text(p);
  CHECK(c.vocab_size == 2);
  REQUIRE(c.docs.size() == 1);
  CHECK(c.docs[0].count(*c.vocab.find("a")) == 2);
  CHECK(c.docs[0].count(*c.vocab.find("b")) == 1);

  const auto stop = write_file("stop.txt", "a\n");
  const auto s = load_text(p, {.stopwords = stop});
  CHECK(s.vocab_size == 1);
  CHECK(s.docs[0].entries() == std::vector<std::pair<WordId, std::uint32_t>>{{0, 1}});
  CHECK(s.vocab.word(0) == "b");
}

TEST_CASE("text loading lowercases, prunes and keeps empty lines aligned") {
  const auto p = write_file("b.txt", "The cat\nthe DOG the\n\nrare\n");
  const auto c = load_text(p, {.min_count = 2});
  CHECK(c.vocab_size == 1);
  CHECK(c.docs.size() == 4);
  CHECK(c.docs[0].total() == 1);
  CHECK(c.docs[1].total() == 2);
  CHECK(c.docs[2].empty());
  CHECK(c.docs[3].empty());
  CHECK_THROWS_AS(load_text(p, {.min_count = 100}), InvalidArgument);
  CHECK_THROWS_AS(load_text(fs::temp_directory_path() / "wlda_no_such_file.txt"), ParseError);
}

TEST_CASE("corpus file round trip with and without ground truth") {
  SyntheticSpec spec;
  spec.num_docs = 200;
  spec.seed = 9;
  const auto sc = generate_synthetic(spec);
  const auto p = fs::temp_directory_path() / "wlda_corpus_rt.txt";
  save_corpus(p, sc.corpus, &sc.truth);
  const auto back = load_corpus(p);
  CHECK(back.corpus == sc.corpus);
  REQUIRE(back.truth.has_value());
  CHECK(*back.truth == sc.truth);

  const auto text = load_text(write_file("c.txt", "x y\ny z z\n"));
  save_corpus(p, text);
  const auto back2 = load_corpus(p);
  CHECK(back2.corpus == text);
  CHECK_FALSE(back2.truth.has_value());
  fs::remove(p);
}

TEST_CASE("corpus file errors are structured") {
  const auto bad_version = write_file("v.txt", "wlda-corpus 2\nvocab_size 1\n");
  try {
    load_corpus(bad_version);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
  const auto truncated = write_file("t.txt", "wlda-corpus 1\nvocab_size 3\nnum_docs 2\ntruth_topics 0\nvocab 0\ndocs\n0:1\n");
  CHECK_THROWS_AS(load_corpus(truncated), ParseError);
  const auto oov = write_file("o.txt", "wlda-corpus 1\nvocab_size 3\nnum_docs 1\ntruth_topics 0\nvocab 0\ndocs\n5:1\nend\n");
  CHECK_THROWS(load_corpus(oov));
  const auto garbage = write_file("g.txt", "wlda-corpus 1\nvocab_size x\n");
  CHECK_THROWS_AS(load_corpus(garbage), ParseError);
}

TEST_CASE("labels round trip") {
  const auto p = fs::temp_directory_path() / "wlda_labels.txt";
  save_labels(p, {0, 3, 1});
  CHECK(load_labels(p) == std::vector<std::size_t>{0, 3, 1});
  CHECK_THROWS_AS(load_labels(write_file("l.txt", "1\nx\n")), ParseError);
  fs::remove(p);
}
