#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wlda/cli.hpp"
#include "wlda/corpus.hpp"
#include "wlda/metrics.hpp"
#include "wlda/model.hpp"

namespace fs = std::filesystem;
using namespace wlda;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Workdir {
  fs::path dir;
  explicit Workdir(const std::string& name) : dir(fs::temp_directory_path() / ("wlda_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

double csv_last_field(const std::string& text, std::size_t column) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  std::istringstream row(last);
  std::string field;
  for (std::size_t i = 0; i <= column; ++i) std::getline(row, field, ',');
  return std::stod(field);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  Workdir w("usage");
  CHECK(run({"generate", "--num-docs", "0", "--output", w / "c.txt"}).code == cli::kUsage);
  CHECK_FALSE(fs::exists(w / "c.txt"));
  CHECK(run({"generate", "--num-docs", "abc", "--output", w / "c.txt"}).code == cli::kUsage);
  CHECK(run({"eval", "--corpus", w / "c.txt", "--topics", "t", "--format", "xml"}).code == cli::kUsage);
  CHECK(run({"train-wlda", "--corpus", w / "c.txt"}).code == cli::kUsage);
}

TEST_CASE("help exits 0") {
  const auto r = run({"--help"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("train-wlda") != std::string::npos);
}

TEST_CASE("missing or malformed inputs exit 2") {
  Workdir w("data");
  CHECK(run({"eval", "--corpus", w / "nope.txt", "--topics", w / "t.txt"}).code == cli::kDataError);
  std::ofstream(w / "bad.txt") << "wlda-corpus 1\nvocab_size x\n";
  const auto r = run({"train-gibbs", "--corpus", w / "bad.txt", "--out-dir", w / "o"});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("bad.txt") != std::string::npos);
}

TEST_CASE("generate is reproducible and writes labels and config") {
  Workdir w("gen");
  const std::vector<std::string> base{"generate", "--num-docs", "300", "--seed", "5", "--labels-out"};
  auto a = base, b = base;
  a.insert(a.end(), {w / "la.txt", "--output", w / "a.txt"});
  b.insert(b.end(), {w / "lb.txt", "--output", w / "b.txt"});
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  CHECK(slurp(w / "a.txt") == slurp(w / "b.txt"));
  CHECK(slurp(w / "la.txt") == slurp(w / "lb.txt"));
  const auto lc = corpus::load_corpus(w / "a.txt");
  CHECK(lc.corpus.docs.size() == 300);
  CHECK(corpus::load_labels(w / "la.txt") == corpus::argmax_labels(lc.truth->theta));
  CHECK(slurp(w / "a.txt.config").find("seed=5") != std::string::npos);
}

TEST_CASE("config files feed subcommand options and flags override them") {
  Workdir w("cfg");
  std::ofstream(w / "gen.cfg") << "num-docs=40\nseed=3\noutput=\"" << (w / "x.txt") << "\"\n";
  REQUIRE(run({"generate", "--config", w / "gen.cfg"}).code == 0);
  CHECK(corpus::load_corpus(w / "x.txt").corpus.docs.size() == 40);
  REQUIRE(run({"generate", "--config", w / "gen.cfg", "--num-docs", "12"}).code == 0);
  CHECK(corpus::load_corpus(w / "x.txt").corpus.docs.size() == 12);
  std::ofstream(w / "bad.cfg") << "no-such-option=1\n";
  CHECK(run({"generate", "--config", w / "bad.cfg", "--output", w / "y.txt"}).code == cli::kUsage);
  REQUIRE(run({"generate", "--config", w / "x.txt.config", "--output", w / "z.txt"}).code == 0);
  CHECK(slurp(w / "z.txt") == slurp(w / "x.txt"));
}

TEST_CASE("train-wlda with zero epochs writes the initialized model and a header-only csv") {
  Workdir w("tw0");
  REQUIRE(run({"generate", "--num-docs", "50", "--output", w / "c.txt"}).code == 0);
  const auto r = run({"train-wlda", "--corpus", w / "c.txt", "--out-dir", w / "o", "--epochs", "0", "--hidden", "4"});
  REQUIRE(r.code == 0);
  const auto m = load_model(w / "o/model.bin");
  CHECK(m.vocab_size() == 100);
  CHECK(m.num_topics() == 5);
  CHECK(slurp(w / "o/metrics.csv") == "noise_alpha,epoch,recon,mmd,mean_tu,mean_npmi,precision,mean_max_theta\n");
  CHECK(fs::exists(w / "o/train-wlda.config"));
}

TEST_CASE("train-wlda noise sweep writes one model per value") {
  Workdir w("sweep");
  REQUIRE(run({"generate", "--num-docs", "200", "--output", w / "c.txt"}).code == 0);
  const auto r = run({"train-wlda", "--corpus", w / "c.txt", "--out-dir", w / "o", "--epochs", "2", "--hidden", "5",
                      "--noise-alpha", "0,0.5", "--checkpoint-every", "1", "--batch-size", "64"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(w / "o/model_a0.bin"));
  CHECK(fs::exists(w / "o/model_a0.5.bin"));
  CHECK(fs::exists(w / "o/topics_a0.5_e2.txt"));
  std::istringstream csv(slurp(w / "o/metrics.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("plain text corpora train and sweep noise") {
  Workdir w("text");
  std::ofstream text(w / "docs.txt");
  for (int d = 0; d < 40; ++d) text << (d % 2 ? "apple banana apple cherry\n" : "river stone river cloud stone\n");
  text.close();
  REQUIRE(run({"train-wlda", "--corpus", w / "docs.txt", "--out-dir", w / "o", "--epochs", "2", "--hidden", "4",
               "--num-topics", "2", "--noise-alpha", "0,0.5", "--checkpoint-every", "1", "--batch-size", "8", "--top-n", "3"})
              .code == 0);
  std::istringstream csv(slurp(w / "o/metrics.csv"));
  std::string line;
  std::vector<std::string> keys;
  std::getline(csv, line);
  while (std::getline(csv, line)) keys.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
  CHECK(keys == std::vector<std::string>{"0,1", "0,2", "0.5,1", "0.5,2"});
  REQUIRE(run({"train-gibbs", "--corpus", w / "docs.txt", "--out-dir", w / "g", "--sweeps", "5", "--num-topics", "2", "--top-n", "3"}).code == 0);
}

TEST_CASE("train-gibbs with zero sweeps scores far below a sampled run") {
  Workdir w("g0");
  REQUIRE(run({"generate", "--num-docs", "1000", "--seed", "2", "--output", w / "c.txt"}).code == 0);
  REQUIRE(run({"train-gibbs", "--corpus", w / "c.txt", "--out-dir", w / "o", "--sweeps", "0"}).code == 0);
  const double precision = csv_last_field(slurp(w / "o/metrics.csv"), 3);
  CHECK(precision < 0.5);
  CHECK(csv_last_field(slurp(w / "o/metrics.csv"), 1) < 0.5);
  REQUIRE(run({"train-gibbs", "--corpus", w / "c.txt", "--out-dir", w / "o2", "--sweeps", "100"}).code == 0);
  CHECK(csv_last_field(slurp(w / "o2/metrics.csv"), 3) >= 0.8);
  CHECK(metrics::load_topics(w / "o2/topics.txt").num_topics() == 5);
}

TEST_CASE("eval: topics equal to the ground truth score precision 1") {
  Workdir w("eval");
  REQUIRE(run({"generate", "--num-docs", "300", "--output", w / "c.txt"}).code == 0);
  const auto lc = corpus::load_corpus(w / "c.txt");
  metrics::save_topics(w / "truth.txt", metrics::TopicSet(corpus::top_words(lc.truth->topics, 10)));
  auto r = run({"eval", "--topics", w / "truth.txt", "--corpus", w / "c.txt", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(csv_last_field(r.out, 2) == 1.0);
  r = run({"eval", "--topics", w / "truth.txt", "--corpus", w / "c.txt", "--truth", w / "truth.txt", "--format", "json",
           "--output", w / "report.json"});
  REQUIRE(r.code == 0);
  CHECK(slurp(w / "report.json") == r.out);
}

TEST_CASE("eval reproduces the TU toy end to end") {
  Workdir w("tu");
  corpus::Corpus c;
  c.vocab_size = 3;
  c.docs = {corpus::BowDocument({{0, 1}, {1, 1}}), corpus::BowDocument({{1, 1}, {2, 1}})};
  corpus::save_corpus(w / "c.txt", c);
  std::ofstream(w / "t.txt") << "0 1\n1 2\n";
  const auto r = run({"eval", "--topics", w / "t.txt", "--corpus", w / "c.txt", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\n0.75,") != std::string::npos);
}

TEST_CASE("classify handles untrained models, single classes and misalignment") {
  Workdir w("cls");
  REQUIRE(run({"generate", "--num-docs", "200", "--output", w / "c.txt", "--labels-out", w / "l.txt"}).code == 0);
  REQUIRE(run({"train-wlda", "--corpus", w / "c.txt", "--out-dir", w / "o", "--epochs", "0", "--hidden", "4"}).code == 0);
  auto r = run({"classify", "--model", w / "o/model.bin", "--corpus", w / "c.txt", "--labels", w / "l.txt"});
  CHECK(r.code == 0);
  CHECK(r.out.find("accuracy") != std::string::npos);
  corpus::save_labels(w / "one.txt", std::vector<std::size_t>(200, 0));
  r = run({"classify", "--model", w / "o/model.bin", "--corpus", w / "c.txt", "--labels", w / "one.txt"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("accuracy 1 ", 0) == 0);
  corpus::save_labels(w / "short.txt", {0, 1});
  r = run({"classify", "--model", w / "o/model.bin", "--corpus", w / "c.txt", "--labels", w / "short.txt"});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("misalignment") != std::string::npos);
}

TEST_CASE("classify on trained features beats 0.7") {
  Workdir w("cls2");
  REQUIRE(run({"generate", "--num-docs", "3000", "--seed", "1", "--output", w / "c.txt", "--labels-out", w / "l.txt"}).code == 0);
  REQUIRE(run({"train-wlda", "--corpus", w / "c.txt", "--out-dir", w / "o", "--epochs", "30", "--hidden", "10,10",
               "--checkpoint-every", "30", "--seed", "1"})
              .code == 0);
  const auto r = run({"classify", "--model", w / "o/model.bin", "--corpus", w / "c.txt", "--labels", w / "l.txt"});
  REQUIRE(r.code == 0);
  MESSAGE(r.out);
  CHECK(std::stod(r.out.substr(9)) > 0.7);
}

TEST_CASE("gradcheck exit codes") {
  auto r = run({"gradcheck"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("PASS") != std::string::npos);
  r = run({"gradcheck", "--inject-sign-flip"});
  CHECK(r.code == cli::kCheckFailed);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("match-prior writes sample dumps and the mmd trace") {
  Workdir w("mp");
  const auto r = run({"match-prior", "--num-inputs", "1000", "--epochs", "2", "--null-resamples", "10", "--eval-samples", "64",
                      "--out-dir", w / "o"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(w / "o/samples_e0.csv"));
  CHECK(fs::exists(w / "o/samples_e2.csv"));
  CHECK(slurp(w / "o/mmd.csv").rfind("epoch,mmd,null_p95\n0,", 0) == 0);
}
