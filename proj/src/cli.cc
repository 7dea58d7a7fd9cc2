// src/cli.cc

// Copyright 2026  SVRBench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "svrbench/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "svrbench/io.h"
#include "svrbench/plda.h"
#include "svrbench/scoring.h"
#include "svrbench/simulate.h"
#include "svrbench/svr.h"

namespace svrbench {

namespace {

namespace fs = std::filesystem;

// Seeds for the pipeline stages are derived from the master --seed so that
// one flag pins the entire experiment: world = seed, channel = seed + 1,
// split = seed + 2, training = seed + 3.
constexpr uint64_t kChannelSeedOffset = 1;
constexpr uint64_t kSplitSeedOffset = 2;
constexpr uint64_t kTrainSeedOffset = 3;

std::string PathJoin(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

std::vector<int> ParseHiddenDims(const std::string &spec) {
  std::vector<int> dims;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char *end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size() || tok.empty() || v < 1)
      throw FormatError("bad hidden layer width '" + tok + "'");
    dims.push_back(static_cast<int>(v));
  }
  if (dims.empty()) throw FormatError("empty hidden layer list");
  return dims;
}

std::string PercentString(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * rate);
  return buf;
}

std::string DcfString(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string ShortFloat(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

// ---------------------------------------------------------------------------
// Flag groups shared between subcommands.

struct WorldArgs {
  int dim = 32;
  int n_speakers = 400;
  int utts_per_speaker = 10;
  double sigma_between = 1.0;
  double sigma_within = 0.7;
};

struct ChannelArgs {
  std::string kind = "affine";
  double noise_sigma = 1.0;
  int rank = 16;
  double rank_noise = 0.0;
  double scale_spread = 0.7;
  double bias_sigma = 1.0;
  double channel_noise = 0.35;
};

struct SplitArgs {
  double train_fraction = 0.75;
  int enroll_utts = 3;
  int n_target = 2000;
  int n_nontarget = 2000;
};

struct TrainArgs {
  std::string hidden = "512,512";
  std::string activation = "relu";
  int steps = 1000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  double same_speaker_fraction = 0.5;
  double w_recon = 1.0;
  double w_cos = 1.0;
};

void AddWorldOptions(CLI::App *cmd, WorldArgs *a) {
  cmd->add_option("--dim", a->dim, "Embedding dimension")
      ->capture_default_str();
  cmd->add_option("--n-speakers", a->n_speakers, "Number of world speakers")
      ->capture_default_str();
  cmd->add_option("--utts-per-speaker", a->utts_per_speaker,
                  "Utterances per speaker")
      ->capture_default_str();
  cmd->add_option("--sigma-between", a->sigma_between,
                  "Speaker-mean spread")
      ->capture_default_str();
  cmd->add_option("--sigma-within", a->sigma_within, "Utterance spread")
      ->capture_default_str();
}

void AddChannelOptions(CLI::App *cmd, ChannelArgs *a) {
  cmd->add_option("--channel", a->kind,
                  "Degradation channel: affine, noise, or rankproj")
      ->capture_default_str();
  cmd->add_option("--noise-sigma", a->noise_sigma,
                  "Additive-noise channel: noise stddev")
      ->capture_default_str();
  cmd->add_option("--rank", a->rank, "Rank-projection channel: basis rank")
      ->capture_default_str();
  cmd->add_option("--rank-noise", a->rank_noise,
                  "Rank-projection channel: noise stddev")
      ->capture_default_str();
  cmd->add_option("--scale-spread", a->scale_spread,
                  "Affine channel: per-axis scale spread")
      ->capture_default_str();
  cmd->add_option("--bias-sigma", a->bias_sigma,
                  "Affine channel: bias stddev")
      ->capture_default_str();
  cmd->add_option("--channel-noise", a->channel_noise,
                  "Affine channel: per-utterance noise stddev")
      ->capture_default_str();
}

void AddSplitOptions(CLI::App *cmd, SplitArgs *a) {
  cmd->add_option("--train-fraction", a->train_fraction,
                  "Fraction of speakers in the training split")
      ->capture_default_str();
  cmd->add_option("--enroll-utts", a->enroll_utts,
                  "Enrollment utterances per evaluation speaker")
      ->capture_default_str();
  cmd->add_option("--n-target", a->n_target, "Target trials to sample")
      ->capture_default_str();
  cmd->add_option("--n-nontarget", a->n_nontarget,
                  "Nontarget trials to sample")
      ->capture_default_str();
}

void AddTrainOptions(CLI::App *cmd, TrainArgs *a) {
  cmd->add_option("--hidden", a->hidden,
                  "Comma-separated hidden layer widths")
      ->capture_default_str();
  cmd->add_option("--activation", a->activation, "relu or tanh")
      ->capture_default_str();
  cmd->add_option("--steps", a->steps, "Optimizer steps")
      ->capture_default_str();
  cmd->add_option("--batch-size", a->batch_size, "Pairs per batch")
      ->capture_default_str();
  cmd->add_option("--learning-rate", a->learning_rate, "Step size")
      ->capture_default_str();
  cmd->add_option("--optimizer", a->optimizer, "adam or sgd")
      ->capture_default_str();
  cmd->add_option("--same-speaker-fraction", a->same_speaker_fraction,
                  "Fraction of same-speaker pairs per batch")
      ->capture_default_str();
  cmd->add_option("--w-recon", a->w_recon, "Reconstruction loss weight")
      ->capture_default_str();
  cmd->add_option("--w-cos", a->w_cos, "Cosine loss weight")
      ->capture_default_str();
}

WorldConfig MakeWorldConfig(const WorldArgs &a, uint64_t seed) {
  WorldConfig cfg;
  cfg.dim = a.dim;
  cfg.n_speakers = a.n_speakers;
  cfg.utts_per_speaker = a.utts_per_speaker;
  cfg.sigma_between = a.sigma_between;
  cfg.sigma_within = a.sigma_within;
  cfg.seed = seed;
  return cfg;
}

DegradationChannel MakeChannel(const ChannelArgs &a, uint64_t seed) {
  DegradationChannel ch;
  ch.seed = seed;
  if (a.kind == "noise") {
    ch.kind = AdditiveNoiseChannel{a.noise_sigma};
  } else if (a.kind == "rankproj") {
    ch.kind = RankProjectionChannel{a.rank, a.rank_noise};
  } else if (a.kind == "affine") {
    ch.kind = AffineChannel{a.scale_spread, a.bias_sigma, a.channel_noise};
  } else {
    throw FormatError("unknown channel '" + a.kind +
                      "' (expected affine, noise, or rankproj)");
  }
  return ch;
}

ProtocolConfig MakeProtocolConfig(const SplitArgs &a, uint64_t seed) {
  ProtocolConfig cfg;
  cfg.train_speaker_fraction = a.train_fraction;
  cfg.n_enroll_utts_per_speaker = a.enroll_utts;
  cfg.n_trials_target = a.n_target;
  cfg.n_trials_nontarget = a.n_nontarget;
  cfg.seed = seed;
  return cfg;
}

TrainConfig MakeTrainConfig(const TrainArgs &a, uint64_t seed) {
  TrainConfig cfg;
  cfg.hidden_dims = ParseHiddenDims(a.hidden);
  cfg.activation = ParseActivation(a.activation);
  cfg.steps = a.steps;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = a.learning_rate;
  cfg.optimizer = ParseOptimizer(a.optimizer);
  cfg.same_speaker_fraction = a.same_speaker_fraction;
  cfg.seed = seed;
  cfg.loss_weights = {a.w_recon, a.w_cos};
  return cfg;
}

// Expands `--config FILE` into ordinary flags.  The file holds one
// `key=value` per line ('#' starts a comment); a key is skipped when the
// same option was also given explicitly, which is what makes command-line
// flags override the file.  Boolean keys use true/false values.
std::vector<std::string> ExpandConfigFile(
    const std::vector<std::string> &args) {
  if (args.empty() || args.front().rfind("-", 0) == 0) return args;

  std::string config_path;
  std::vector<std::string> rest;
  for (size_t i = 1; i < args.size(); i++) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw FormatError("--config expects a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return args;

  std::set<std::string> explicit_flags;
  for (const std::string &arg : rest)
    if (arg.rfind("--", 0) == 0)
      explicit_flags.insert(arg.substr(0, arg.find('=')));

  std::ifstream in(config_path);
  if (!in)
    throw FormatError("cannot open config file '" + config_path + "'");
  std::vector<std::string> expanded{args.front()};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      throw FormatError(config_path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t");
      size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(start, eq - start));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw FormatError(config_path + ":" + std::to_string(line_no) +
                        ": empty key");
    if (key == "config")
      throw FormatError(config_path + ": config files cannot nest");
    if (explicit_flags.count("--" + key) > 0) continue;
    if (value == "true") {
      expanded.push_back("--" + key);
    } else if (value == "false") {
      // an unset flag
    } else {
      expanded.push_back("--" + key);
      expanded.push_back(value);
    }
  }
  expanded.insert(expanded.end(), rest.begin(), rest.end());
  return expanded;
}

EmbeddingSet LoadAndMerge(const std::vector<std::string> &paths) {
  std::vector<EmbeddingSet> loaded;
  loaded.reserve(paths.size());
  for (const std::string &p : paths) loaded.push_back(LoadEmbeddingsFile(p));
  std::vector<const EmbeddingSet *> ptrs;
  for (const EmbeddingSet &s : loaded) ptrs.push_back(&s);
  return MergeEmbeddingSets(ptrs);
}

// ---------------------------------------------------------------------------
// Simulation artifacts shared by `simulate` and `full-exp`.

struct SimData {
  Protocol protocol;
  EmbeddingSet train_low, enroll_low, test_low;
};

SimData BuildSimulation(const WorldArgs &world, const ChannelArgs &channel,
                        const SplitArgs &split, uint64_t seed) {
  EmbeddingSet clean = GenerateWorld(MakeWorldConfig(world, seed));
  DegradationChannel ch = MakeChannel(channel, seed + kChannelSeedOffset);
  Protocol protocol =
      MakeProtocol(clean, MakeProtocolConfig(split, seed + kSplitSeedOffset));
  EmbeddingSet train_low = Degrade(protocol.train, ch);
  EmbeddingSet enroll_low = Degrade(protocol.enroll, ch);
  EmbeddingSet test_low = Degrade(protocol.test, ch);
  return {std::move(protocol), std::move(train_low), std::move(enroll_low),
          std::move(test_low)};
}

void WriteSimulationFiles(const SimData &sim, const std::string &dir) {
  fs::create_directories(dir);
  SaveEmbeddingsFile(sim.protocol.train, PathJoin(dir, "train_clean.evec"));
  SaveEmbeddingsFile(sim.train_low, PathJoin(dir, "train_degraded.evec"));
  SaveEmbeddingsFile(sim.protocol.enroll,
                     PathJoin(dir, "enroll_clean.evec"));
  SaveEmbeddingsFile(sim.enroll_low, PathJoin(dir, "enroll_degraded.evec"));
  SaveEmbeddingsFile(sim.protocol.test, PathJoin(dir, "test_clean.evec"));
  SaveEmbeddingsFile(sim.test_low, PathJoin(dir, "test_degraded.evec"));
  SaveTrialsFile(sim.protocol.trials, PathJoin(dir, "trials.txt"));
}

// One embedding per training speaker, in corpus order: a deterministic
// imposter cohort for score normalization.
EmbeddingSet CohortSubset(const EmbeddingSet &train) {
  std::set<std::string> seen;
  std::vector<Embedding> items;
  for (const Embedding &e : train.Items()) {
    if (!e.speaker_id.has_value()) continue;
    if (seen.insert(*e.speaker_id).second) items.push_back(e);
  }
  if (items.empty()) throw InsufficientData("no labeled cohort utterances");
  return EmbeddingSet(train.Dim(), std::move(items));
}

// ---------------------------------------------------------------------------
// Subcommand argument bundles.

struct SimulateCmd {
  WorldArgs world;
  ChannelArgs channel;
  SplitArgs split;
  std::string out_dir;
  uint64_t seed = 42;
};

struct TrainCmd {
  std::string train_low, train_high, out_model, loss_csv;
  TrainArgs train;
  uint64_t seed = 42;
};

struct ReconstructCmd {
  std::string model, in, out;
};

struct ScoreCmd {
  std::string backend = "cosine";
  std::string plda_model;
  std::vector<std::string> embeddings;
  std::string trials, out;
  bool reconstruct_enroll = false;
  bool reconstruct_test = false;
  std::string svr_model;
  std::string snorm_cohort;
  int snorm_top_k = 200;
  bool length_norm = false;
};

struct EvaluateCmd {
  std::string scores, trials, out, det_csv;
};

struct SweepAlphaCmd {
  std::string plda_model, adaptation;
  std::vector<std::string> embeddings;
  std::string trials, out;
  double alpha_start = 0.0;
  double alpha_stop = 1.0;
  double alpha_step = 0.1;
};

struct FullExpCmd {
  WorldArgs world;
  ChannelArgs channel;
  SplitArgs split;
  TrainArgs train;
  std::string methods = "baseline,sn,pa,svr,svr_sn";
  std::string enrollment = "both";
  std::string backend = "cosine";
  int plda_iters = 15;
  int snorm_top_k = 200;
  double alpha_step = 0.1;
  std::string out_dir;
  uint64_t seed = 42;

  FullExpCmd() {
    // Desk-scale training defaults; the standalone `train` command keeps
    // the larger network.
    train.hidden = "64,64";
    train.steps = 2000;
    train.batch_size = 32;
  }
};

// ---------------------------------------------------------------------------
// Subcommand implementations.

int RunSimulate(const SimulateCmd &a, std::ostream &out) {
  SimData sim = BuildSimulation(a.world, a.channel, a.split, a.seed);
  WriteSimulationFiles(sim, a.out_dir);
  out << "simulate: wrote " << sim.protocol.train.Size() << " train, "
      << sim.protocol.enroll.Size() << " enroll, "
      << sim.protocol.test.Size() << " test embeddings and "
      << sim.protocol.trials.size() << " trials to " << a.out_dir << "\n";
  return 0;
}

int RunTrain(const TrainCmd &a, std::ostream &out) {
  EmbeddingSet low = LoadEmbeddingsFile(a.train_low);
  EmbeddingSet high = LoadEmbeddingsFile(a.train_high);
  PairedData data(low, high);
  TrainConfig cfg = MakeTrainConfig(a.train, a.seed);
  TrainResult result = Train(data, cfg);
  SaveMlpFile(result.params, a.out_model);
  if (!a.loss_csv.empty())
    SaveLossCurveCsvFile(result.loss_curve, a.loss_csv);
  out << "train: " << cfg.steps << " steps, first-batch loss "
      << FormatFloat17(result.loss_curve.front()) << ", final "
      << FormatFloat17(result.loss_curve.back()) << ", model written to "
      << a.out_model << "\n";
  return 0;
}

int RunReconstruct(const ReconstructCmd &a, std::ostream &out) {
  MlpParameters params = LoadMlpFile(a.model);
  EmbeddingSet set = LoadEmbeddingsFile(a.in);
  SaveEmbeddingsFile(Reconstruct(params, set), a.out);
  out << "reconstruct: wrote " << set.Size() << " embeddings to " << a.out
      << "\n";
  return 0;
}

int RunScore(const ScoreCmd &a, std::ostream &out, std::ostream &err) {
  if (a.backend != "cosine" && a.backend != "plda") {
    err << "svrbench: unknown backend '" << a.backend << "'\n";
    return 1;
  }
  if (a.backend == "plda" && a.plda_model.empty()) {
    err << "svrbench: --backend plda requires --plda-model\n";
    return 1;
  }
  if ((a.reconstruct_enroll || a.reconstruct_test) && a.svr_model.empty()) {
    err << "svrbench: --reconstruct-enroll/--reconstruct-test require "
           "--svr-model\n";
    return 1;
  }

  EmbeddingSet embeddings = LoadAndMerge(a.embeddings);
  std::vector<Trial> trials = LoadTrialsFile(a.trials);

  ScoringBackend backend = CosineBackend{};
  if (a.backend == "plda") backend = PldaBackend{LoadPldaFile(a.plda_model)};

  std::optional<MlpParameters> svr;
  if (!a.svr_model.empty()) svr = LoadMlpFile(a.svr_model);
  std::optional<Cohort> cohort;
  if (!a.snorm_cohort.empty())
    cohort = Cohort{LoadEmbeddingsFile(a.snorm_cohort), a.snorm_top_k};

  ScoringOptions options;
  options.reconstruct_enroll = a.reconstruct_enroll;
  options.reconstruct_test = a.reconstruct_test;
  options.svr = svr.has_value() ? &*svr : nullptr;
  options.snorm = cohort.has_value() ? &*cohort : nullptr;
  options.length_normalize = a.length_norm;

  ScoreSet scores = ScoreTrials(backend, embeddings, trials, options);
  SaveScoresFile(scores, a.out);
  out << "score: wrote " << scores.Size() << " scores to " << a.out << "\n";
  return 0;
}

int RunEvaluate(const EvaluateCmd &a, std::ostream &out) {
  ScoreSet scores = LoadScoresFile(a.scores);
  std::vector<Trial> trials = LoadTrialsFile(a.trials);
  ScoreSet labeled = JoinLabels(scores, trials);
  for (const ScoreEntry &e : labeled.Entries())
    if (!e.label.has_value())
      throw MissingLabels("scores file '" + a.scores +
                          "': no label for trial (" + e.enroll_utt + ", " +
                          e.test_utt + ") in '" + a.trials + "'");
  MetricsReport report = Evaluate(labeled);
  SaveReportFile(report, a.out);
  if (!a.det_csv.empty()) SaveDetCsvFile(report, a.det_csv);
  out << "evaluate: eer=" << FormatFloat17(report.eer)
      << " min_dcf_avg=" << FormatFloat17(report.min_dcf_avg) << " ("
      << report.n_target << " target / " << report.n_nontarget
      << " nontarget)\n";
  return 0;
}

int RunSweepAlpha(const SweepAlphaCmd &a, std::ostream &out) {
  if (!(a.alpha_step > 0.0))
    throw FormatError("--alpha-step must be positive");
  PldaModel base = LoadPldaFile(a.plda_model);
  EmbeddingSet adaptation = LoadEmbeddingsFile(a.adaptation);
  EmbeddingSet embeddings = LoadAndMerge(a.embeddings);
  std::vector<Trial> trials = LoadTrialsFile(a.trials);

  std::ostringstream csv;
  csv << "alpha,eer,min_dcf_avg\n";
  int rows = 0;
  for (int k = 0;; k++) {
    double alpha = a.alpha_start + static_cast<double>(k) * a.alpha_step;
    if (alpha > a.alpha_stop + 1e-12) break;
    if (alpha > 1.0) alpha = 1.0;
    PldaModel adapted = PldaAdapt(base, adaptation, alpha);
    ScoreSet scores =
        ScoreTrials(PldaBackend{std::move(adapted)}, embeddings, trials);
    MetricsReport report = Evaluate(scores);
    csv << ShortFloat(alpha) << ',' << FormatFloat17(report.eer) << ','
        << FormatFloat17(report.min_dcf_avg) << '\n';
    rows++;
  }
  AtomicWriteFile(a.out, [&](std::ostream &o) { o << csv.str(); });
  out << "sweep-alpha: wrote " << rows << " rows to " << a.out << "\n";
  return 0;
}

int RunFullExp(const FullExpCmd &a, std::ostream &out, std::ostream &err) {
  // Parse and validate the method list, preserving request order.
  std::vector<std::string> methods;
  {
    std::stringstream ss(a.methods);
    std::string tok;
    std::set<std::string> seen;
    while (std::getline(ss, tok, ',')) {
      if (tok != "baseline" && tok != "sn" && tok != "pa" && tok != "svr" &&
          tok != "svr_sn") {
        err << "svrbench: unknown method '" << tok << "'\n";
        return 1;
      }
      if (seen.insert(tok).second) methods.push_back(tok);
    }
    if (methods.empty()) {
      err << "svrbench: --methods must name at least one method\n";
      return 1;
    }
  }
  std::vector<std::string> modes;
  if (a.enrollment == "both")
    modes = {"original", "degraded"};
  else if (a.enrollment == "original" || a.enrollment == "degraded")
    modes = {a.enrollment};
  else {
    err << "svrbench: --enrollment must be original, degraded, or both\n";
    return 1;
  }
  if (a.backend != "cosine" && a.backend != "plda") {
    err << "svrbench: unknown backend '" << a.backend << "'\n";
    return 1;
  }

  auto has_method = [&](const std::string &m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
  };

  SimData sim = BuildSimulation(a.world, a.channel, a.split, a.seed);
  WriteSimulationFiles(sim, a.out_dir);

  // SVR reconstruction network, trained on the degraded/clean pairs of the
  // training split (evaluation speakers are never seen).
  std::optional<MlpParameters> svr;
  if (has_method("svr") || has_method("svr_sn")) {
    PairedData pairs(sim.train_low, sim.protocol.train);
    TrainResult result =
        Train(pairs, MakeTrainConfig(a.train, a.seed + kTrainSeedOffset));
    SaveMlpFile(result.params, PathJoin(a.out_dir, "svr_model.txt"));
    SaveLossCurveCsvFile(result.loss_curve,
                         PathJoin(a.out_dir, "svr_loss.csv"));
    svr = std::move(result.params);
  }

  // PLDA trained on the clean training split.
  std::optional<PldaModel> plda;
  if (a.backend == "plda" || has_method("pa")) {
    PldaTrainResult result = PldaTrainEm(sim.protocol.train, a.plda_iters);
    SavePldaFile(result.model, PathJoin(a.out_dir, "plda_model.txt"));
    plda = std::move(result.model);
  }

  // Imposter cohorts from the training domain: degraded embeddings for the
  // raw methods, their reconstructions for SVR+SN.
  std::optional<Cohort> cohort_raw, cohort_recon;
  if (has_method("sn"))
    cohort_raw = Cohort{CohortSubset(sim.train_low), a.snorm_top_k};
  if (has_method("svr_sn"))
    cohort_recon =
        Cohort{Reconstruct(*svr, CohortSubset(sim.train_low)),
               a.snorm_top_k};

  ScoringBackend backend = CosineBackend{};
  if (a.backend == "plda") backend = PldaBackend{*plda};

  std::map<std::pair<std::string, std::string>, MetricsReport> cells;
  std::map<std::string, double> pa_alpha;

  for (const std::string &mode : modes) {
    const EmbeddingSet &enroll_set =
        mode == "original" ? sim.protocol.enroll : sim.enroll_low;
    EmbeddingSet embeddings =
        MergeEmbeddingSets({&enroll_set, &sim.test_low});

    for (const std::string &method : methods) {
      ScoreSet scores{std::vector<ScoreEntry>{}};
      MetricsReport report;

      if (method == "pa") {
        // Best adaptation weight by an internal grid over the EER, reported
        // alongside the results.
        bool first = true;
        double best_alpha = 0.0;
        for (int k = 0;; k++) {
          double alpha = static_cast<double>(k) * a.alpha_step;
          if (alpha > 1.0 + 1e-12) break;
          if (alpha > 1.0) alpha = 1.0;
          PldaModel adapted = PldaAdapt(*plda, sim.train_low, alpha);
          ScoreSet candidate = ScoreTrials(PldaBackend{std::move(adapted)},
                                           embeddings, sim.protocol.trials);
          MetricsReport r = Evaluate(candidate);
          if (first || r.eer < report.eer) {
            scores = std::move(candidate);
            report = std::move(r);
            best_alpha = alpha;
            first = false;
          }
        }
        pa_alpha[mode] = best_alpha;
      } else {
        ScoringOptions options;
        if (method == "svr" || method == "svr_sn") {
          options.svr = &*svr;
          options.reconstruct_test = true;
          options.reconstruct_enroll = (mode == "degraded");
        }
        if (method == "sn") options.snorm = &*cohort_raw;
        if (method == "svr_sn") options.snorm = &*cohort_recon;
        scores =
            ScoreTrials(backend, embeddings, sim.protocol.trials, options);
        report = Evaluate(scores);
      }

      SaveScoresFile(scores, PathJoin(a.out_dir, "scores_" + method + "_" +
                                                     mode + ".txt"));
      SaveReportFile(report, PathJoin(a.out_dir, "report_" + method + "_" +
                                                     mode + ".txt"));
      cells[{method, mode}] = std::move(report);
    }
  }

  std::string table = FormatSummaryTable(methods, modes, cells);
  std::ostringstream summary;
  summary << table;
  for (const auto &[mode, alpha] : pa_alpha)
    summary << "pa_alpha_" << mode << "=" << ShortFloat(alpha) << "\n";
  AtomicWriteFile(PathJoin(a.out_dir, "summary.txt"),
                  [&](std::ostream &o) { o << summary.str(); });
  out << summary.str();
  return 0;
}

}  // namespace

std::string FormatSummaryTable(
    const std::vector<std::string> &methods,
    const std::vector<std::string> &modes,
    const std::map<std::pair<std::string, std::string>, MetricsReport>
        &cells) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"method"};
  for (const std::string &mode : modes) {
    header.push_back(mode + "_eer_pct");
    header.push_back(mode + "_min_dcf");
  }
  rows.push_back(std::move(header));
  for (const std::string &method : methods) {
    std::vector<std::string> row{method};
    for (const std::string &mode : modes) {
      auto it = cells.find({method, mode});
      if (it == cells.end())
        throw MissingCell("no result for method '" + method + "', mode '" +
                          mode + "'");
      row.push_back(PercentString(it->second.eer));
      row.push_back(DcfString(it->second.min_dcf_avg));
    }
    rows.push_back(std::move(row));
  }

  std::vector<size_t> widths(rows.front().size(), 0);
  for (const auto &row : rows)
    for (size_t c = 0; c < row.size(); c++)
      widths[c] = std::max(widths[c], row[c].size());
  std::ostringstream table;
  for (const auto &row : rows) {
    for (size_t c = 0; c < row.size(); c++) {
      table << row[c];
      if (c + 1 < row.size())
        table << std::string(widths[c] - row[c].size() + 2, ' ');
    }
    table << "\n";
  }
  return table.str();
}

int RunCommand(const std::vector<std::string> &args, std::ostream &out,
               std::ostream &err) {
  CLI::App app{"Embedding-space speaker verification bench: synthetic "
               "mismatch simulation, Siamese reconstruction training, "
               "trial scoring, and detection metrics"};
  app.name("svrbench");
  app.require_subcommand(1);
  static const char *kConfigHelp = "Read key=value defaults from a file; "
                                   "explicit flags win";
  std::string config_file;

  SimulateCmd sim_args;
  CLI::App *sim = app.add_subcommand(
      "simulate", "Generate a synthetic world, degrade it, and write the "
                  "protocol files (EVEC sets and a TRIALS list)");
  AddWorldOptions(sim, &sim_args.world);
  AddChannelOptions(sim, &sim_args.channel);
  AddSplitOptions(sim, &sim_args.split);
  sim->add_option("--out-dir", sim_args.out_dir, "Output directory")
      ->required();
  sim->add_option("--seed", sim_args.seed, "Master seed")
      ->capture_default_str();
  sim->add_option("--config", config_file, kConfigHelp);

  TrainCmd train_args;
  CLI::App *train = app.add_subcommand(
      "train", "Train the reconstruction network on paired low/high-quality "
               "embeddings");
  train->add_option("--train-low", train_args.train_low,
                    "Low-quality EVEC file")
      ->required();
  train->add_option("--train-high", train_args.train_high,
                    "High-quality EVEC file")
      ->required();
  train->add_option("--out-model", train_args.out_model, "Model output path")
      ->required();
  train->add_option("--loss-csv", train_args.loss_csv,
                    "Optional loss-curve CSV output");
  AddTrainOptions(train, &train_args.train);
  train->add_option("--seed", train_args.seed, "Training seed")
      ->capture_default_str();
  train->add_option("--config", config_file, kConfigHelp);

  ReconstructCmd rec_args;
  CLI::App *rec = app.add_subcommand(
      "reconstruct", "Map an EVEC file through a trained network");
  rec->add_option("--model", rec_args.model, "Model path")->required();
  rec->add_option("--in", rec_args.in, "Input EVEC file")->required();
  rec->add_option("--out", rec_args.out, "Output EVEC file")->required();
  rec->add_option("--config", config_file, kConfigHelp);

  ScoreCmd score_args;
  CLI::App *score = app.add_subcommand(
      "score", "Score a trial list with the cosine or PLDA backend");
  score->add_option("--backend", score_args.backend, "cosine or plda")
      ->capture_default_str();
  score->add_option("--plda-model", score_args.plda_model,
                    "PLDA model (required for --backend plda)");
  score->add_option("--embeddings", score_args.embeddings,
                    "EVEC file; repeat to merge several")
      ->required();
  score->add_option("--trials", score_args.trials, "TRIALS file")->required();
  score->add_option("--out", score_args.out, "SCORES output path")
      ->required();
  score->add_flag("--reconstruct-enroll", score_args.reconstruct_enroll,
                  "Reconstruct the enrollment side");
  score->add_flag("--reconstruct-test", score_args.reconstruct_test,
                  "Reconstruct the test side");
  score->add_option("--svr-model", score_args.svr_model,
                    "Reconstruction network model file");
  score->add_option("--snorm-cohort", score_args.snorm_cohort,
                    "EVEC cohort; enables adaptive s-norm");
  score->add_option("--snorm-top-k", score_args.snorm_top_k,
                    "Cohort scores kept per side (0 = all)")
      ->capture_default_str();
  score->add_flag("--length-norm", score_args.length_norm,
                  "Length-normalize embeddings before scoring");
  score->add_option("--config", config_file, kConfigHelp);

  EvaluateCmd eval_args;
  CLI::App *eval = app.add_subcommand(
      "evaluate", "Compute EER and minDCF for a SCORES file, with labels "
                  "taken from a TRIALS file");
  eval->add_option("--scores", eval_args.scores, "SCORES file")->required();
  eval->add_option("--trials", eval_args.trials, "Labeled TRIALS file")
      ->required();
  eval->add_option("--out", eval_args.out, "Report output path")->required();
  eval->add_option("--det-csv", eval_args.det_csv,
                   "Optional DET-point CSV output");
  eval->add_option("--config", config_file, kConfigHelp);

  SweepAlphaCmd sweep_args;
  CLI::App *sweep = app.add_subcommand(
      "sweep-alpha", "Evaluate PLDA adaptation over a grid of interpolation "
                     "weights");
  sweep->add_option("--plda-model", sweep_args.plda_model, "PLDA model")
      ->required();
  sweep->add_option("--adaptation", sweep_args.adaptation,
                    "Unlabeled adaptation EVEC file")
      ->required();
  sweep->add_option("--embeddings", sweep_args.embeddings,
                    "EVEC file; repeat to merge several")
      ->required();
  sweep->add_option("--trials", sweep_args.trials, "Labeled TRIALS file")
      ->required();
  sweep->add_option("--out", sweep_args.out, "CSV output path")->required();
  sweep->add_option("--alpha-start", sweep_args.alpha_start, "Grid start")
      ->capture_default_str();
  sweep->add_option("--alpha-stop", sweep_args.alpha_stop, "Grid stop")
      ->capture_default_str();
  sweep->add_option("--alpha-step", sweep_args.alpha_step, "Grid step")
      ->capture_default_str();
  sweep->add_option("--config", config_file, kConfigHelp);

  FullExpCmd full_args;
  CLI::App *full = app.add_subcommand(
      "full-exp", "Run the full method matrix (simulate, train, score, "
                  "evaluate) and write one report per cell plus a summary "
                  "table");
  AddWorldOptions(full, &full_args.world);
  AddChannelOptions(full, &full_args.channel);
  AddSplitOptions(full, &full_args.split);
  AddTrainOptions(full, &full_args.train);
  full->add_option("--methods", full_args.methods,
                   "Comma-separated subset of baseline,sn,pa,svr,svr_sn")
      ->capture_default_str();
  full->add_option("--enrollment", full_args.enrollment,
                   "original, degraded, or both")
      ->capture_default_str();
  full->add_option("--backend", full_args.backend, "cosine or plda")
      ->capture_default_str();
  full->add_option("--plda-iters", full_args.plda_iters, "PLDA EM iterations")
      ->capture_default_str();
  full->add_option("--snorm-top-k", full_args.snorm_top_k,
                   "Cohort scores kept per side (0 = all)")
      ->capture_default_str();
  full->add_option("--alpha-step", full_args.alpha_step,
                   "Adaptation grid step for the pa method")
      ->capture_default_str();
  full->add_option("--out-dir", full_args.out_dir, "Output directory")
      ->required();
  full->add_option("--seed", full_args.seed, "Master seed")
      ->capture_default_str();
  full->add_option("--config", config_file, kConfigHelp);

  std::vector<std::string> expanded;
  try {
    expanded = ExpandConfigFile(args);
  } catch (const DataError &e) {
    err << "svrbench: " << e.what() << "\n";
    return 2;
  }
  std::vector<const char *> argv;
  argv.push_back("svrbench");
  for (const std::string &arg : expanded) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return RunSimulate(sim_args, out);
    if (train->parsed()) return RunTrain(train_args, out);
    if (rec->parsed()) return RunReconstruct(rec_args, out);
    if (score->parsed()) return RunScore(score_args, out, err);
    if (eval->parsed()) return RunEvaluate(eval_args, out);
    if (sweep->parsed()) return RunSweepAlpha(sweep_args, out);
    if (full->parsed()) return RunFullExp(full_args, out, err);
  } catch (const DataError &e) {
    err << "svrbench: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError &e) {
    err << "svrbench: " << e.what() << "\n";
    return 3;
  } catch (const Error &e) {
    err << "svrbench: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "svrbench: internal error: " << e.what() << "\n";
    return 3;
  }
  err << "svrbench: no subcommand given\n";
  return 1;
}

}  // namespace svrbench
