#include "wlda/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "wlda/corpus.hpp"
#include "wlda/errors.hpp"
#include "wlda/gibbs.hpp"
#include "wlda/metrics.hpp"
#include "wlda/model.hpp"
#include "wlda/prior_match.hpp"
#include "wlda/selfcheck.hpp"
#include "wlda/textio.hpp"

namespace fs = std::filesystem;

namespace wlda::cli {

namespace {

using textio::decimal;

// Input missing or unreadable before any work starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("--") + what + " is required");
  if (!fs::is_regular_file(path)) throw ParseError(path, 0, std::string(what) + " file does not exist");
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("--out-dir is required");
  fs::create_directories(dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open for writing");
  return out;
}

void write_config(const CLI::App& sub, const fs::path& path) {
  auto out = open_out(path);
  out << sub.config_to_str(true, false);
}

double mean_max_theta(const std::vector<SimplexVector>& thetas) {
  if (thetas.empty()) return 0.0;
  double s = 0.0;
  for (const auto& t : thetas) s += *std::max_element(t.vec().begin(), t.vec().end());
  return s / static_cast<double>(thetas.size());
}

std::optional<metrics::TopicSet> truth_topics(const corpus::LoadedCorpus& lc, std::size_t top_n) {
  if (!lc.truth) return std::nullopt;
  return metrics::TopicSet(corpus::top_words(lc.truth->topics, top_n));
}

// wlda-corpus files by header, anything else as plain text (one document per line).
corpus::LoadedCorpus read_corpus(const std::string& path) {
  std::ifstream in(path);
  std::string head;
  in >> head;
  if (head == "wlda-corpus") return corpus::load_corpus(path);
  return {corpus::load_text(path), std::nullopt};
}

const std::map<std::string, nn::Activation> kActivations{{"softplus", nn::Activation::softplus},
                                                         {"leaky-relu", nn::Activation::leaky_relu}};
const std::map<std::string, MmdOn> kMmdOn{{"raw-theta", MmdOn::raw_theta}, {"noised-theta", MmdOn::noised_theta}};

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  corpus::SyntheticSpec spec;
  bool fixed_length = false;
  std::string output;
  std::string labels_out;
};

void add_generate(CLI::App& app, GenerateOpts& o) {
  app.add_option("--vocab-size", o.spec.vocab_size, "Vocabulary size V")->capture_default_str();
  app.add_option("--num-topics", o.spec.num_topics, "Number of topics K")->capture_default_str();
  app.add_option("--alpha", o.spec.dirichlet_alpha, "Symmetric document-topic Dirichlet parameter")->capture_default_str();
  app.add_option("--topic-eta", o.spec.topic_eta, "Symmetric Dirichlet parameter of the true topics")->capture_default_str();
  app.add_option("--num-docs", o.spec.num_docs, "Number of documents")->capture_default_str();
  app.add_option("--mean-length", o.spec.mean_length, "Poisson mean document length (clipped below at 1)")
      ->capture_default_str();
  app.add_flag("--fixed-length", o.fixed_length, "Every document has exactly --mean-length tokens");
  app.add_option("--separation-top", o.spec.separation_top, "Top-N used for the topic separation check (0 disables)")
      ->capture_default_str();
  app.add_option("--seed", o.spec.seed, "Random seed")->capture_default_str();
  app.add_option("--output", o.output, "Corpus file to write")->required();
  app.add_option("--labels-out", o.labels_out, "Also write argmax-theta labels, one per line");
}

int do_generate(const CLI::App& sub, GenerateOpts& o, std::ostream& out) {
  if (o.spec.num_docs == 0) throw UsageError("--num-docs must be at least 1");
  o.spec.length_law = o.fixed_length ? corpus::LengthLaw::fixed : corpus::LengthLaw::poisson;
  try {
    o.spec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto sc = corpus::generate_synthetic(o.spec);
  if (fs::path(o.output).has_parent_path()) fs::create_directories(fs::path(o.output).parent_path());
  corpus::save_corpus(o.output, sc.corpus, &sc.truth);
  if (!o.labels_out.empty()) corpus::save_labels(o.labels_out, corpus::argmax_labels(sc.truth.theta));
  write_config(sub, o.output + ".config");
  out << "wrote " << sc.corpus.docs.size() << " documents (" << sc.corpus.total_tokens() << " tokens, V=" << o.spec.vocab_size
      << ", K=" << o.spec.num_topics << ") to " << o.output << '\n';
  return kOk;
}

// -------------------------------------------------------------- train-wlda

struct TrainWldaOpts {
  std::string corpus_path;
  std::string out_dir;
  std::string model_out;
  TrainConfig cfg;
  std::vector<double> noise_alphas{0.0};
  std::size_t checkpoint_every = 10;
  std::size_t top_n = 10;
};

void add_train_wlda(CLI::App& app, TrainWldaOpts& o) {
  app.add_option("--corpus", o.corpus_path, "Corpus file")->required();
  app.add_option("--out-dir", o.out_dir, "Directory for model, topics and metrics")->required();
  app.add_option("--model-out", o.model_out, "Model file (default: <out-dir>/model.bin)");
  app.add_option("--num-topics", o.cfg.num_topics, "Number of topics K")->capture_default_str();
  app.add_option("--hidden", o.cfg.hidden, "Encoder hidden widths, comma separated")->delimiter(',')->capture_default_str();
  app.add_option("--activation", o.cfg.activation, "Hidden activation")
      ->transform(CLI::CheckedTransformer(kActivations, CLI::ignore_case))
      ->capture_default_str();
  app.add_option("--dirichlet-alpha", o.cfg.dirichlet_alpha, "Symmetric Dirichlet prior parameter")->capture_default_str();
  app.add_option("--noise-alpha", o.noise_alphas, "Noise mixing proportion(s); several values train one model each")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--lambda", o.cfg.lambda, "Weight of the MMD term")->capture_default_str();
  app.add_option("--lr", o.cfg.learning_rate, "Adam learning rate")->capture_default_str();
  app.add_option("--beta1", o.cfg.beta1, "Adam first-moment decay")->capture_default_str();
  app.add_option("--epochs", o.cfg.epochs, "Training epochs")->capture_default_str();
  app.add_option("--batch-size", o.cfg.batch_size, "Minibatch size (>= 2)")->capture_default_str();
  app.add_option("--mmd-on", o.cfg.mmd_on, "MMD input: raw encoder output or the noised mixture")
      ->transform(CLI::CheckedTransformer(kMmdOn, CLI::ignore_case))
      ->capture_default_str();
  app.add_option("--seed", o.cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--checkpoint-every", o.checkpoint_every, "Evaluate topics every N epochs")->capture_default_str();
  app.add_option("--top-n", o.top_n, "Words per topic for evaluation")->capture_default_str();
}

int do_train_wlda(const CLI::App& sub, TrainWldaOpts& o, std::ostream& out) {
  require_file(o.corpus_path, "corpus");
  ensure_dir(o.out_dir);
  for (double a : o.noise_alphas) {
    o.cfg.noise_alpha = a;
    try {
      o.cfg.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (o.checkpoint_every == 0) throw UsageError("--checkpoint-every must be positive");
  const auto lc = read_corpus(o.corpus_path);
  if (o.top_n < 1 || o.top_n > lc.corpus.vocab_size) throw UsageError("--top-n must lie in [1, V]");
  const auto truth = truth_topics(lc, o.top_n);
  const fs::path dir(o.out_dir);
  write_config(sub, dir / "train-wlda.config");

  auto csv = open_out(dir / "metrics.csv");
  csv << "noise_alpha,epoch,recon,mmd,mean_tu,mean_npmi,precision,mean_max_theta\n";
  const bool sweep = o.noise_alphas.size() > 1;
  for (double a : o.noise_alphas) {
    TrainConfig cfg = o.cfg;
    cfg.noise_alpha = a;
    const std::string tag = "a" + decimal(a);
    std::optional<double> best;
    std::size_t best_epoch = 0;
    Rng rng(cfg.seed);
    auto on_epoch = [&](const EpochRecord& rec, const WldaModel& model) {
      if (rec.epoch % o.checkpoint_every != 0 && rec.epoch != cfg.epochs) return;
      const metrics::TopicSet topics(extract_topics(model, o.top_n));
      metrics::save_topics(dir / ("topics_" + tag + "_e" + std::to_string(rec.epoch) + ".txt"), topics);
      const auto report = metrics::evaluate_topics(topics, lc.corpus, truth ? &*truth : nullptr);
      csv << decimal(a) << ',' << rec.epoch << ',' << decimal(rec.recon) << ',' << decimal(rec.mmd) << ','
          << decimal(report.tu.mean) << ',' << decimal(report.npmi.mean) << ','
          << (report.precision ? decimal(*report.precision) : "") << ','
          << decimal(mean_max_theta(encode_corpus(model, lc.corpus))) << '\n';
      csv.flush();
      out << "noise_alpha " << decimal(a) << " epoch " << rec.epoch << ": recon " << decimal(rec.recon) << " mmd "
          << decimal(rec.mmd) << " TU " << decimal(report.tu.mean) << " NPMI " << decimal(report.npmi.mean);
      if (report.precision) {
        out << " precision " << decimal(*report.precision);
        if (!best || *report.precision > *best) {
          best = report.precision;
          best_epoch = rec.epoch;
        }
      }
      out << " (" << decimal(rec.seconds) << " s)\n";
    };
    auto result = train(lc.corpus, cfg, rng, on_epoch);
    const fs::path model_path =
        sweep ? dir / ("model_" + tag + ".bin") : (o.model_out.empty() ? dir / "model.bin" : fs::path(o.model_out));
    save_model(model_path, result.model);
    if (best) out << "best checkpoint for noise_alpha " << decimal(a) << ": epoch " << best_epoch << " precision " << decimal(*best) << '\n';
    out << "model written to " << model_path.string() << '\n';
  }
  return kOk;
}

// ------------------------------------------------------------- train-gibbs

struct TrainGibbsOpts {
  std::string corpus_path;
  std::string out_dir;
  std::size_t num_topics = 5;
  double alpha = 0.1;
  double eta = 0.01;
  std::size_t sweeps = 2000;
  std::size_t checkpoint_every = 0;
  std::size_t top_n = 10;
  std::uint64_t seed = 0;
};

void add_train_gibbs(CLI::App& app, TrainGibbsOpts& o) {
  app.add_option("--corpus", o.corpus_path, "Corpus file")->required();
  app.add_option("--out-dir", o.out_dir, "Directory for topics and metrics")->required();
  app.add_option("--num-topics", o.num_topics, "Number of topics K")->capture_default_str();
  app.add_option("--alpha", o.alpha, "Document-topic hyperparameter")->capture_default_str();
  app.add_option("--eta", o.eta, "Topic-word hyperparameter")->capture_default_str();
  app.add_option("--sweeps", o.sweeps, "Full Gibbs sweeps")->capture_default_str();
  app.add_option("--checkpoint-every", o.checkpoint_every, "Also evaluate every N sweeps (0: final only)")->capture_default_str();
  app.add_option("--top-n", o.top_n, "Words per topic")->capture_default_str();
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

int do_train_gibbs(const CLI::App& sub, TrainGibbsOpts& o, std::ostream& out) {
  require_file(o.corpus_path, "corpus");
  ensure_dir(o.out_dir);
  const auto lc = read_corpus(o.corpus_path);
  if (o.top_n < 1 || o.top_n > lc.corpus.vocab_size) throw UsageError("--top-n must lie in [1, V]");
  const auto truth = truth_topics(lc, o.top_n);
  const fs::path dir(o.out_dir);
  write_config(sub, dir / "train-gibbs.config");

  auto state = gibbs::init_random(lc.corpus, o.num_topics, o.alpha, o.eta, o.seed);
  auto csv = open_out(dir / "metrics.csv");
  csv << "sweep,mean_tu,mean_npmi,precision\n";
  auto evaluate = [&](bool final) {
    const metrics::TopicSet topics(gibbs::estimate_topics(state, o.top_n));
    const auto report = metrics::evaluate_topics(topics, lc.corpus, truth ? &*truth : nullptr);
    csv << state.sweeps_done << ',' << decimal(report.tu.mean) << ',' << decimal(report.npmi.mean) << ','
        << (report.precision ? decimal(*report.precision) : "") << '\n';
    out << "sweep " << state.sweeps_done << ": TU " << decimal(report.tu.mean) << " NPMI " << decimal(report.npmi.mean);
    if (report.precision) out << " precision " << decimal(*report.precision);
    out << '\n';
    if (final) metrics::save_topics(dir / "topics.txt", topics);
  };
  for (std::size_t s = 1; s <= o.sweeps; ++s) {
    gibbs::sweep(state);
    if (o.checkpoint_every > 0 && s % o.checkpoint_every == 0 && s != o.sweeps) evaluate(false);
  }
  evaluate(true);
  return kOk;
}

// ------------------------------------------------------------- match-prior

struct MatchPriorOpts {
  PriorMatchConfig cfg;
  double lambda = 1.0;  // accepted for interface symmetry; the objective is MMD alone
  std::string out_dir;
  bool dump_samples = true;
};

void add_match_prior(CLI::App& app, MatchPriorOpts& o) {
  app.add_option("--dim", o.cfg.dim, "Input, hidden and output width")->capture_default_str();
  app.add_option("--alpha", o.cfg.alpha, "Symmetric Dirichlet prior parameter")->capture_default_str();
  app.add_option("--num-inputs", o.cfg.num_inputs, "Number of Gaussian training inputs")->capture_default_str();
  app.add_option("--hidden-layers", o.cfg.hidden_layers, "Number of hidden layers")->capture_default_str();
  app.add_option("--activation", o.cfg.activation, "Hidden activation")
      ->transform(CLI::CheckedTransformer(kActivations, CLI::ignore_case))
      ->capture_default_str();
  app.add_option("--epochs", o.cfg.epochs, "Training epochs")->capture_default_str();
  app.add_option("--batch-size", o.cfg.batch_size, "Minibatch size")->capture_default_str();
  app.add_option("--lr", o.cfg.learning_rate, "Adam learning rate")->capture_default_str();
  app.add_option("--beta1", o.cfg.beta1, "Adam first-moment decay")->capture_default_str();
  app.add_option("--checkpoint-every", o.cfg.checkpoint_every, "Evaluate every N epochs")->capture_default_str();
  app.add_option("--eval-samples", o.cfg.eval_samples, "Samples per side in checkpoint MMD estimates")->capture_default_str();
  app.add_option("--null-resamples", o.cfg.null_resamples, "Prior-vs-prior resamples for the null distribution")
      ->capture_default_str();
  app.add_option("--lambda", o.lambda, "Ignored (the objective is MMD alone)")->capture_default_str();
  app.add_option("--seed", o.cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", o.out_dir, "Directory for sample dumps and MMD trace")->required();
  app.add_flag("!--no-samples", o.dump_samples, "Skip per-checkpoint sample CSVs");
}

void dump_samples(const fs::path& path, const PriorCheckpoint& cp) {
  auto out = open_out(path);
  const std::size_t dim = cp.prior_samples.empty() ? 0 : cp.prior_samples.front().size();
  out << "source,index";
  for (std::size_t k = 0; k < dim; ++k) out << ",c" << k;
  out << '\n';
  auto rows = [&](const char* source, const std::vector<SimplexVector>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out << source << ',' << i;
      for (double v : xs[i].vec()) out << ',' << decimal(v);
      out << '\n';
    }
  };
  rows("encoder", cp.encoder_samples);
  rows("prior", cp.prior_samples);
}

int do_match_prior(const CLI::App& sub, MatchPriorOpts& o, std::ostream& out) {
  try {
    o.cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  ensure_dir(o.out_dir);
  const fs::path dir(o.out_dir);
  write_config(sub, dir / "match-prior.config");
  auto result = run_prior_matching(o.cfg, [&](const PriorCheckpoint& cp) {
    if (o.dump_samples) dump_samples(dir / ("samples_e" + std::to_string(cp.epoch) + ".csv"), cp);
    out << "epoch " << cp.epoch << ": mmd " << decimal(cp.mmd) << '\n';
  });
  auto csv = open_out(dir / "mmd.csv");
  csv << "epoch,mmd,null_p95\n";
  for (const auto& cp : result.checkpoints)
    csv << cp.epoch << ',' << decimal(cp.mmd) << ',' << decimal(result.null_p95) << '\n';
  if (!result.null_mmd.empty()) {
    auto null_csv = open_out(dir / "null.csv");
    null_csv << "mmd\n";
    for (double v : result.null_mmd) null_csv << decimal(v) << '\n';
    const double final_mmd = result.checkpoints.back().mmd;
    out << "null 95th percentile " << decimal(result.null_p95) << "; final mmd " << decimal(final_mmd)
        << (final_mmd < result.null_p95 ? " (matches prior)" : " (above null)") << '\n';
  }
  return kOk;
}

// -------------------------------------------------------------------- eval

struct EvalOpts {
  std::string topics_path;
  std::string model_path;
  std::string corpus_path;
  std::string truth_path;
  std::size_t top_n = 10;
  std::string format = "text";
  std::string output;
};

void add_eval(CLI::App& app, EvalOpts& o) {
  auto* t = app.add_option("--topics", o.topics_path, "Topics file (one topic per line)");
  auto* m = app.add_option("--model", o.model_path, "Model file; topics are extracted from it");
  t->excludes(m);
  app.add_option("--corpus", o.corpus_path, "Reference corpus for NPMI (and ground truth, if stored)")->required();
  app.add_option("--truth", o.truth_path, "Ground-truth topics file (overrides corpus ground truth)");
  app.add_option("--top-n", o.top_n, "Words per topic when extracting from a model or corpus truth")->capture_default_str();
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "csv", "json"}))->capture_default_str();
  app.add_option("--output", o.output, "Also write the report here");
}

int do_eval(const CLI::App&, EvalOpts& o, std::ostream& out) {
  if (o.topics_path.empty() && o.model_path.empty()) throw UsageError("one of --topics or --model is required");
  require_file(o.corpus_path, "corpus");
  if (!o.topics_path.empty()) require_file(o.topics_path, "topics");
  if (!o.model_path.empty()) require_file(o.model_path, "model");
  if (!o.truth_path.empty()) require_file(o.truth_path, "truth");

  const auto lc = read_corpus(o.corpus_path);
  metrics::TopicSet topics;
  if (!o.topics_path.empty()) {
    topics = metrics::load_topics(o.topics_path);
  } else {
    const auto model = load_model(o.model_path);
    if (model.vocab_size() != lc.corpus.vocab_size)
      throw DimensionError("model vocabulary (" + std::to_string(model.vocab_size()) + ") differs from corpus vocabulary (" +
                           std::to_string(lc.corpus.vocab_size) + ")");
    topics = metrics::TopicSet(extract_topics(model, o.top_n));
  }
  std::optional<metrics::TopicSet> truth;
  if (!o.truth_path.empty())
    truth = metrics::load_topics(o.truth_path);
  else if (lc.truth)
    truth = truth_topics(lc, topics.top_n());

  const auto report = metrics::evaluate_topics(topics, lc.corpus, truth ? &*truth : nullptr);
  std::string text;
  if (o.format == "json")
    text = report.to_json();
  else if (o.format == "csv")
    text = metrics::MetricsReport::csv_header() + "\n" + report.to_csv_row() + "\n";
  else
    text = report.to_text();
  out << text;
  if (!o.output.empty()) open_out(o.output) << text;
  return kOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyOpts {
  std::string model_path;
  std::string corpus_path;
  std::string labels_path;
  std::string test_corpus_path;
  std::string test_labels_path;
  double test_fraction = 0.2;
  metrics::ProbeConfig probe;
  std::uint64_t seed = 0;
};

void add_classify(CLI::App& app, ClassifyOpts& o) {
  app.add_option("--model", o.model_path, "Trained model file")->required();
  app.add_option("--corpus", o.corpus_path, "Training corpus")->required();
  app.add_option("--labels", o.labels_path, "Labels for --corpus, one per line")->required();
  app.add_option("--test-corpus", o.test_corpus_path, "Held-out corpus (default: split --corpus)");
  app.add_option("--test-labels", o.test_labels_path, "Labels for --test-corpus");
  app.add_option("--test-fraction", o.test_fraction, "Held-out share when splitting --corpus")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--lr", o.probe.learning_rate, "Probe Adam learning rate")->capture_default_str();
  app.add_option("--iters", o.probe.iterations, "Probe full-batch iterations")->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for the train/test split")->capture_default_str();
}

std::vector<Vector> features(const WldaModel& model, const corpus::Corpus& c) {
  std::vector<Vector> x;
  for (auto& t : encode_corpus(model, c)) x.push_back(t.vec());
  return x;
}

int do_classify(const CLI::App&, ClassifyOpts& o, std::ostream& out) {
  require_file(o.model_path, "model");
  require_file(o.corpus_path, "corpus");
  require_file(o.labels_path, "labels");
  if (o.test_corpus_path.empty() != o.test_labels_path.empty())
    throw UsageError("--test-corpus and --test-labels must be given together");
  const auto model = load_model(o.model_path);
  const auto lc = read_corpus(o.corpus_path);
  const auto labels = corpus::load_labels(o.labels_path);
  if (labels.size() != lc.corpus.docs.size())
    throw InvalidArgument("label misalignment: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(lc.corpus.docs.size()) + " documents");
  if (model.vocab_size() != lc.corpus.vocab_size) throw DimensionError("model vocabulary differs from corpus vocabulary");

  std::vector<Vector> train_x, test_x;
  std::vector<std::size_t> train_y, test_y;
  const auto all_x = features(model, lc.corpus);
  if (!o.test_corpus_path.empty()) {
    require_file(o.test_corpus_path, "test-corpus");
    require_file(o.test_labels_path, "test-labels");
    const auto tc = read_corpus(o.test_corpus_path);
    test_y = corpus::load_labels(o.test_labels_path);
    if (test_y.size() != tc.corpus.docs.size()) throw InvalidArgument("label misalignment in the test split");
    if (tc.corpus.vocab_size != model.vocab_size()) throw DimensionError("test corpus vocabulary differs from model");
    train_x = all_x;
    train_y = labels;
    test_x = features(model, tc.corpus);
  } else {
    std::vector<std::size_t> order(all_x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(o.seed);
    rng.shuffle(order);
    auto n_test = static_cast<std::size_t>(o.test_fraction * static_cast<double>(order.size()));
    n_test = std::clamp<std::size_t>(n_test, 1, order.size() - 1);
    for (std::size_t r = 0; r < order.size(); ++r) {
      auto& xs = r < n_test ? test_x : train_x;
      auto& ys = r < n_test ? test_y : train_y;
      xs.push_back(all_x[order[r]]);
      ys.push_back(labels[order[r]]);
    }
  }
  const double acc = metrics::classification_probe(train_x, train_y, test_x, test_y, o.probe);
  out << "accuracy " << decimal(acc) << " (" << train_x.size() << " train, " << test_x.size() << " test)\n";
  return kOk;
}

// --------------------------------------------------------------- gradcheck

struct GradcheckOpts {
  std::uint64_t seed = 1;
  std::size_t instances = 10;
  double tolerance = 1e-4;
  bool inject_sign_flip = false;
};

void add_gradcheck(CLI::App& app, GradcheckOpts& o) {
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--instances", o.instances, "Number of random tiny instances")->capture_default_str();
  app.add_option("--tolerance", o.tolerance, "Maximum allowed relative error")->capture_default_str();
  app.add_flag("--inject-sign-flip", o.inject_sign_flip, "Negate one analytic gradient entry (oracle sensitivity test)");
}

int do_gradcheck(const CLI::App&, GradcheckOpts& o, std::ostream& out) {
  const auto report = run_objective_gradcheck(o.seed, o.instances, o.tolerance, o.inject_sign_flip);
  for (const auto& c : report.cases) out << "instance seed " << c.seed << ": max rel. err " << decimal(c.max_rel_error) << '\n';
  out << "max relative error " << decimal(report.worst) << " (tolerance " << decimal(report.tolerance) << "): "
      << (report.passed() ? "PASS" : "FAIL") << '\n';
  return report.passed() ? kOk : kCheckFailed;
}

class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(std::string sub) : sub_(std::move(sub)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    if (sub_.empty()) return items;
    for (auto& item : items)
      if (item.parents.empty() || item.parents.front() != sub_) item.parents.insert(item.parents.begin(), sub_);
    return items;
  }

 private:
  std::string sub_;
};

struct Reordered {
  std::vector<std::string> args;
  std::string subcommand;
};

// Moves `--config FILE` / `--config=FILE` in front of the subcommand name.
Reordered hoist_config(const std::vector<std::string>& args) {
  Reordered r;
  std::vector<std::string> head, rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      head.push_back(a);
      head.push_back(args[++i]);
    } else if (a.rfind("--config=", 0) == 0) {
      head.push_back(a);
    } else {
      if (r.subcommand.empty() && !a.empty() && a.front() != '-') r.subcommand = a;
      rest.push_back(a);
    }
  }
  r.args = std::move(head);
  r.args.insert(r.args.end(), rest.begin(), rest.end());
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"W-LDA topic modeling: synthetic corpora, training, evaluation and self-checks", "wlda"};
  app.require_subcommand(1);

  GenerateOpts gen;
  TrainWldaOpts tw;
  TrainGibbsOpts tg;
  MatchPriorOpts mp;
  EvalOpts ev;
  ClassifyOpts cl;
  GradcheckOpts gc;

  // CLI11 reads config files only at the top level, so the file is attached
  // there and its unsectioned keys are routed to the chosen subcommand.
  const auto reordered = hoist_config(args);
  app.set_config("--config", "", "Flat key=value file for the subcommand; flags override it");
  app.config_formatter(std::make_shared<SubcommandConfig>(reordered.subcommand));
  app.allow_config_extras(CLI::config_extras_mode::error);
  auto with_config = [](CLI::App* sub) { return sub; };
  auto* s_gen = with_config(app.add_subcommand("generate", "Generate a synthetic LDA corpus with ground truth"));
  add_generate(*s_gen, gen);
  auto* s_tw = with_config(app.add_subcommand("train-wlda", "Train W-LDA and evaluate checkpoints"));
  add_train_wlda(*s_tw, tw);
  auto* s_tg = with_config(app.add_subcommand("train-gibbs", "Collapsed Gibbs LDA baseline"));
  add_train_gibbs(*s_tg, tg);
  auto* s_mp = with_config(app.add_subcommand("match-prior", "Train an encoder to match a Dirichlet prior by MMD"));
  add_match_prior(*s_mp, mp);
  auto* s_ev = with_config(app.add_subcommand("eval", "TU, NPMI and recovery precision of a topic set"));
  add_eval(*s_ev, ev);
  auto* s_cl = with_config(app.add_subcommand("classify", "Linear probe on encoder features"));
  add_classify(*s_cl, cl);
  auto* s_gc = with_config(app.add_subcommand("gradcheck", "Finite-difference check of the training objective"));
  add_gradcheck(*s_gc, gc);

  std::vector<std::string> reversed(reordered.args.rbegin(), reordered.args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (s_gen->parsed()) return do_generate(*s_gen, gen, out);
    if (s_tw->parsed()) return do_train_wlda(*s_tw, tw, out);
    if (s_tg->parsed()) return do_train_gibbs(*s_tg, tg, out);
    if (s_mp->parsed()) return do_match_prior(*s_mp, mp, out);
    if (s_ev->parsed()) return do_eval(*s_ev, ev, out);
    if (s_cl->parsed()) return do_classify(*s_cl, cl, out);
    if (s_gc->parsed()) return do_gradcheck(*s_gc, gc, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace wlda::cli
