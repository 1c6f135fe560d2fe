#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "oracles.hpp"
#include "wlda/errors.hpp"
#include "wlda/metrics.hpp"
#include "wlda/simplex.hpp"

using namespace wlda;
using namespace wlda::metrics;
using corpus::BowDocument;

namespace {

corpus::Corpus toy_corpus() {
  // words: 0 a, 1 b, 2 c, 3 d
  corpus::Corpus c;
  c.vocab_size = 4;
  c.docs = {BowDocument({{0, 1}, {1, 2}}), BowDocument({{0, 1}, {1, 1}, {2, 1}}), BowDocument({{2, 3}}),
            BowDocument({{0, 1}, {3, 1}})};
  return c;
}

}  // namespace

TEST_CASE("topic set validation") {
  CHECK_THROWS_AS(TopicSet(std::vector<std::vector<corpus::WordId>>{}), InvalidArgument);
  CHECK_THROWS_AS(TopicSet({{1, 2}, {3}}), InvalidArgument);
  CHECK_THROWS_AS(TopicSet({{1, 1}}), InvalidArgument);
  CHECK_THROWS_AS(TopicSet(std::vector<std::vector<corpus::WordId>>{{}}), InvalidArgument);
}

TEST_CASE("TU hand cases") {
  CHECK(topic_uniqueness(TopicSet({{0, 1}, {2, 3}})).mean == 1.0);
  const auto same = topic_uniqueness(TopicSet({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}));
  for (double v : same.per_topic) CHECK(v == doctest::Approx(1.0 / 3));
  const auto toy = topic_uniqueness(TopicSet({{0, 1}, {1, 2}}));
  CHECK(toy.per_topic == std::vector<double>{0.75, 0.75});
  CHECK(toy.mean == 0.75);
}

TEST_CASE("TU matches brute force on random instances") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t K = 1 + rng.uniform_int(6), L = 1 + rng.uniform_int(5), V = L + rng.uniform_int(8);
    const auto topics = oracle::random_topics(rng, K, L, V);
    const auto got = topic_uniqueness(TopicSet(topics));
    const auto want = oracle::tu(topics);
    CHECK(got.per_topic == want);
    CHECK(got.mean == oracle::mean(want));
  }
}

TEST_CASE("co-occurrence counts on a single document") {
  corpus::Corpus c;
  c.vocab_size = 3;
  c.docs = {BowDocument({{0, 2}, {2, 1}})};
  const auto idx = build_cooccurrence_index(c, {0, 2});
  CHECK(idx.num_docs() == 1);
  CHECK(idx.df(0) == 1);
  CHECK(idx.joint(0, 2) == 1);
  CHECK(idx.joint(2, 0) == 1);
  CHECK(idx.df(1) == 0);
}

TEST_CASE("co-occurrence index matches a quadratic scan") {
  Rng rng(2);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t V = 2 + rng.uniform_int(10);
    const auto c = oracle::random_corpus(rng, 1 + rng.uniform_int(20), V, 8);
    std::vector<corpus::WordId> words;
    for (corpus::WordId w = 0; w < V; ++w)
      if (rng.uniform() < 0.7) words.push_back(w);
    const auto idx = build_cooccurrence_index(c, words);
    CHECK(idx.num_docs() == c.docs.size());
    for (auto a : words) {
      CHECK(idx.df(a) == oracle::df(c, a));
      for (auto b : words)
        if (a != b) CHECK(idx.joint(a, b) == oracle::joint(c, a, b));
    }
  }
}

TEST_CASE("NPMI conventions") {
  const auto c = toy_corpus();
  const auto idx = build_cooccurrence_index(c, {0, 1, 2, 3});
  CHECK(npmi_pair(idx, 1, 3) == -1.0);
  corpus::Corpus p;
  p.vocab_size = 3;
  p.docs = {BowDocument({{0, 1}, {1, 1}}), BowDocument({{2, 1}}), BowDocument({{0, 2}, {1, 1}})};
  CHECK(npmi_pair(build_cooccurrence_index(p, {0, 1}), 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  corpus::Corpus empty;
  CHECK_THROWS_AS(npmi_pair(build_cooccurrence_index(empty, {0}), 0, 0), InvalidArgument);
}

TEST_CASE("NPMI on a hand-counted 4-doc toy") {
  const auto c = toy_corpus();
  const auto idx = build_cooccurrence_index(c, {0, 1, 2});
  // df: a 3, b 2, c 2; joint(a,b) = 2, joint(a,c) = 1, joint(b,c) = 1; D = 4.
  CHECK(idx.df(0) == 3);
  CHECK(idx.joint(0, 1) == 2);
  const double ab = std::log(0.5 / (0.75 * 0.5)) / -std::log(0.5);
  const double ac = std::log(0.25 / (0.75 * 0.5)) / -std::log(0.25);
  const double bc = std::log(0.25 / (0.5 * 0.5)) / -std::log(0.25);
  CHECK(npmi_pair(idx, 0, 1) == doctest::Approx(ab).epsilon(1e-14));
  const auto s = npmi(TopicSet({{0, 1, 2}}), idx);
  CHECK(s.mean == doctest::Approx((ab + ac + bc) / 3).epsilon(1e-14));
  CHECK(s.missing_words.empty());
}

TEST_CASE("NPMI matches brute force on random instances") {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t V = 4 + rng.uniform_int(10);
    const auto c = oracle::random_corpus(rng, 1 + rng.uniform_int(25), V, 10);
    const std::size_t K = 1 + rng.uniform_int(4), L = 2 + rng.uniform_int(3);
    const auto topics = oracle::random_topics(rng, K, L, V);
    const TopicSet ts(topics);
    const auto got = npmi(ts, build_cooccurrence_index(c, topic_vocabulary(ts)));
    const auto want = oracle::npmi(topics, c);
    for (std::size_t k = 0; k < K; ++k) CHECK(std::abs(got.per_topic[k] - want[k]) <= 1e-12);
    CHECK(std::abs(got.mean - oracle::mean(want)) <= 1e-12);
  }
}

TEST_CASE("NPMI reports words missing from the reference corpus") {
  const auto c = toy_corpus();
  const TopicSet ts({{0, 9}});
  const auto s = npmi(ts, build_cooccurrence_index(c, topic_vocabulary(ts)));
  CHECK(s.missing_words == std::vector<corpus::WordId>{9});
  CHECK(s.mean == -1.0);
}

TEST_CASE("recovery precision hand cases") {
  const TopicSet truth({{0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
  CHECK(recovery_precision(truth, truth) == 1.0);
  CHECK(recovery_precision(TopicSet({{6, 7, 8}, {0, 1, 2}, {3, 4, 5}}), truth) == 1.0);

  std::vector<std::vector<corpus::WordId>> t(5), p(5);
  for (corpus::WordId k = 0; k < 5; ++k)
    for (corpus::WordId l = 0; l < 10; ++l) t[k].push_back(k * 10 + l);
  p = t;
  p[0][9] = 90;
  p[2][4] = 91;
  p[4][0] = 92;
  std::swap(p[1], p[3]);
  CHECK(recovery_precision(TopicSet(p), TopicSet(t)) == doctest::Approx(1.0 - 3.0 / 50).epsilon(1e-15));
  CHECK(recovery_precision(TopicSet(p), TopicSet(t)) == doctest::Approx(0.94));
  CHECK_THROWS_AS(recovery_precision(TopicSet({{0, 1}}), truth), DimensionError);
}

TEST_CASE("recovery precision matches brute force on random instances") {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t K = 1 + rng.uniform_int(6), L = 1 + rng.uniform_int(5), V = L + rng.uniform_int(10);
    const auto a = oracle::random_topics(rng, K, L, V);
    const auto b = oracle::random_topics(rng, K, L, V);
    const double want = oracle::precision(a, b);
    CHECK(recovery_precision(TopicSet(a), TopicSet(b)) == want);
    CHECK(recovery_precision_assignment(TopicSet(a), TopicSet(b)) == want);
  }
}

TEST_CASE("assignment path agrees with exhaustive search above K = 8") {
  Rng rng(5);
  for (int t = 0; t < 3; ++t) {
    const auto a = oracle::random_topics(rng, 9, 4, 14);
    const auto b = oracle::random_topics(rng, 9, 4, 14);
    CHECK(recovery_precision(TopicSet(a), TopicSet(b)) == recovery_precision_exhaustive(TopicSet(a), TopicSet(b)));
  }
}

TEST_CASE("hungarian solves small assignment problems optimally") {
  Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.uniform_int(6);
    Matrix cost(n, n);
    for (double& v : cost.data()) v = static_cast<double>(rng.uniform_int(20));
    const auto assign = hungarian_min_cost(cost);
    double got = 0;
    for (std::size_t r = 0; r < n; ++r) got += cost(r, assign[r]);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      double s = 0;
      for (std::size_t r = 0; r < n; ++r) s += cost(r, perm[r]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == best);
  }
}

TEST_CASE("probe separates one-hot features") {
  std::vector<Vector> x;
  std::vector<std::size_t> y;
  for (std::size_t i = 0; i < 60; ++i) {
    Vector v(3, 0.0);
    v[i % 3] = 1.0;
    x.push_back(v);
    y.push_back(i % 3);
  }
  CHECK(classification_probe(x, y, x, y) == 1.0);
}

TEST_CASE("probe is at chance on shuffled labels") {
  Rng rng(7);
  auto draw = [&](std::size_t n, std::vector<Vector>& x, std::vector<std::size_t>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(simplex::sample_dirichlet(simplex::DirichletParams::symmetric(5, 0.5), rng).vec());
      y.push_back(i % 2);
    }
    rng.shuffle(y);
  };
  std::vector<Vector> xtr, xte;
  std::vector<std::size_t> ytr, yte;
  draw(1000, xtr, ytr);
  draw(1000, xte, yte);
  CHECK(std::abs(classification_probe(xtr, ytr, xte, yte) - 0.5) <= 0.05);
}

TEST_CASE("probe on true thetas with argmax labels") {
  corpus::SyntheticSpec spec;
  spec.num_docs = 3000;
  spec.seed = 5;
  const auto sc = corpus::generate_synthetic(spec);
  const auto labels = corpus::argmax_labels(sc.truth.theta);
  std::vector<Vector> xtr, xte;
  std::vector<std::size_t> ytr, yte;
  std::size_t nearest_ok = 0;
  for (std::size_t i = 0; i < sc.truth.theta.size(); ++i) {
    (i < 2000 ? xtr : xte).push_back(sc.truth.theta[i].vec());
    (i < 2000 ? ytr : yte).push_back(labels[i]);
    if (i >= 2000) {
      double best = INFINITY;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < 5; ++k) {
        const double dist = simplex::geodesic_distance(sc.truth.theta[i], SimplexVector::vertex(5, k));
        if (dist < best) {
          best = dist;
          arg = k;
        }
      }
      nearest_ok += arg == labels[i];
    }
  }
  CHECK(nearest_ok == 1000);
  CHECK(classification_probe(xtr, ytr, xte, yte) > 0.9);
}

TEST_CASE("probe handles a single class and rejects bad input") {
  const std::vector<Vector> x{{0.2, 0.8}, {0.9, 0.1}};
  const std::vector<std::size_t> y{0, 0};
  CHECK(classification_probe(x, y, x, y) == 1.0);
  CHECK_THROWS_AS(classification_probe({}, {}, x, y), InvalidArgument);
  CHECK_THROWS_AS(classification_probe(x, {0}, x, y), InvalidArgument);
}

TEST_CASE("report formats") {
  const auto c = toy_corpus();
  const TopicSet ts({{0, 1}, {1, 2}});
  const auto r = evaluate_topics(ts, c, &ts);
  CHECK(r.tu.mean == 0.75);
  CHECK(*r.precision == 1.0);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["tu"]["mean"] == 0.75);
  CHECK(j["precision"] == 1.0);
  CHECK(j["accuracy"].is_null());
  CHECK(MetricsReport::csv_header() == "mean_tu,mean_npmi,precision,accuracy");
  const auto row = r.to_csv_row();
  CHECK(row.rfind("0.75,", 0) == 0);
  CHECK(row.back() == ',');
  CHECK(r.to_text().find("TU") != std::string::npos);
  const auto no_truth = evaluate_topics(ts, c);
  CHECK_FALSE(no_truth.precision.has_value());
}

TEST_CASE("topics file round trip") {
  const auto p = std::filesystem::temp_directory_path() / "wlda_topics.txt";
  const TopicSet ts({{3, 1, 2}, {0, 5, 4}});
  save_topics(p, ts);
  CHECK(load_topics(p) == ts);
  std::filesystem::remove(p);
}
