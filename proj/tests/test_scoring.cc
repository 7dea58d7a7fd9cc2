// tests/test_scoring.cc

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

#include <algorithm>
#include <random>
#include <sstream>

#include <doctest.h>

#include "oracles.h"
#include "svrbench/plda.h"
#include "svrbench/scoring.h"
#include "svrbench/vector-ops.h"

using namespace svrbench;

namespace {

Eigen::VectorXd Vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

PldaModel ScalarModel(double mu, double between, double within) {
  return PldaModel(Eigen::VectorXd::Constant(1, mu),
                   Eigen::MatrixXd::Constant(1, 1, between),
                   Eigen::MatrixXd::Constant(1, 1, within));
}

// Random valid model: B = G G^T / d (PSD), W = H H^T / d + I/2 (PD).
PldaModel RandomModel(int dim, Rng *rng) {
  Eigen::MatrixXd g = rng->GaussianMatrix(dim, dim);
  Eigen::MatrixXd h = rng->GaussianMatrix(dim, dim);
  Eigen::MatrixXd between = g * g.transpose() / static_cast<double>(dim);
  Eigen::MatrixXd within = h * h.transpose() / static_cast<double>(dim) +
                           0.5 * Eigen::MatrixXd::Identity(dim, dim);
  return PldaModel(rng->GaussianVector(dim), between, within);
}

// Labeled utterances from the two-covariance generative model itself.
EmbeddingSet SampleFromModel(const Eigen::VectorXd &mu, double sigma_between,
                             double sigma_within, int n_speakers,
                             int utts_per_speaker, Rng *rng) {
  int dim = static_cast<int>(mu.size());
  std::vector<Embedding> items;
  for (int s = 0; s < n_speakers; s++) {
    Eigen::VectorXd speaker =
        mu + sigma_between * rng->GaussianVector(dim);
    for (int j = 0; j < utts_per_speaker; j++) {
      Embedding e;
      e.utterance_id = "s" + std::to_string(s) + "/u" + std::to_string(j);
      e.speaker_id = "s" + std::to_string(s);
      e.vector = speaker + sigma_within * rng->GaussianVector(dim);
      items.push_back(std::move(e));
    }
  }
  return EmbeddingSet(dim, std::move(items));
}

}  // namespace

TEST_CASE("plda model validation") {
  CHECK_THROWS_AS(ScalarModel(0.0, 1.0, 0.0), SingularCovariance);
  CHECK_THROWS_AS(ScalarModel(0.0, -0.5, 1.0), SingularCovariance);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(PldaModel(Eigen::VectorXd::Zero(2), asym,
                            Eigen::MatrixXd::Identity(2, 2)),
                  NumericalDivergence);
}

TEST_CASE("plda scoring closed-form scalar case") {
  PldaModel model = ScalarModel(0.0, 1.0, 1.0);
  // log N(0 | same) - log N(0 | diff) = 1/2 ln(4/3).
  double expected = 0.5 * std::log(4.0 / 3.0);
  CHECK(PldaScore(model, Vec({0}), Vec({0})) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(PldaScore(model, Vec({5}), Vec({-5})) < 0.0);
}

TEST_CASE("plda scoring is exactly symmetric in the trial sides") {
  Rng rng(21);
  for (int i = 0; i < 10; i++) {
    PldaModel model = RandomModel(3, &rng);
    PldaScorer scorer(model);
    Eigen::VectorXd e = rng.GaussianVector(3), t = rng.GaussianVector(3);
    CHECK(scorer.Score(e, t) == scorer.Score(t, e));
  }
}

TEST_CASE("plda scoring agrees with the direct joint-Gaussian evaluation") {
  Rng rng(77);
  for (int round = 0; round < 40; round++) {
    int dim = 1 + static_cast<int>(rng.UniformInt(4));
    PldaModel model = RandomModel(dim, &rng);
    PldaScorer scorer(model);
    for (int i = 0; i < 5; i++) {
      Eigen::VectorXd e = model.Mu() + rng.GaussianVector(dim);
      Eigen::VectorXd t = model.Mu() + rng.GaussianVector(dim);
      double fast = scorer.Score(e, t);
      double direct = testing::DirectPldaLlr(model, e, t);
      CHECK(std::abs(fast - direct) < 1e-9);
    }
  }
}

TEST_CASE("plda EM requires enough structure") {
  Rng rng(4);
  EmbeddingSet single =
      SampleFromModel(Eigen::VectorXd::Zero(3), 1.0, 0.3, 1, 6, &rng);
  CHECK_THROWS_AS(PldaTrainEm(single, 5), InsufficientData);

  EmbeddingSet singletons =
      SampleFromModel(Eigen::VectorXd::Zero(3), 1.0, 0.3, 5, 1, &rng);
  CHECK_THROWS_AS(PldaTrainEm(singletons, 5), InsufficientData);
}

TEST_CASE("plda EM drives W down on nearly-noiseless speakers") {
  Rng rng(12);
  EmbeddingSet data =
      SampleFromModel(Eigen::VectorXd::Zero(4), 1.0, 1e-6, 40, 5, &rng);
  PldaTrainResult result = PldaTrainEm(data, 10);
  double trace_w = result.model.Within().trace();
  double trace_b = result.model.Between().trace();
  CHECK(trace_w / trace_b < 0.05);
}

TEST_CASE("plda EM objective is non-decreasing") {
  Rng rng(9);
  EmbeddingSet data =
      SampleFromModel(Eigen::VectorXd::Ones(4), 1.2, 0.6, 50, 5, &rng);
  PldaTrainResult result = PldaTrainEm(data, 25);
  REQUIRE(result.objective.size() == 25);
  for (size_t i = 0; i + 1 < result.objective.size(); i++)
    CHECK(result.objective[i + 1] >= result.objective[i] - 1e-8);
}

TEST_CASE("plda adaptation endpoints and linearity") {
  Rng rng(30);
  PldaModel model = RandomModel(3, &rng);
  EmbeddingSet adaptation =
      SampleFromModel(2.0 * Eigen::VectorXd::Ones(3), 0.8, 0.5, 10, 3, &rng);

  PldaModel at0 = PldaAdapt(model, adaptation, 0.0);
  CHECK(at0.Mu() == model.Mu());
  CHECK(at0.Between() == model.Between());
  CHECK(at0.Within() == model.Within());

  // alpha = 1 must reproduce the adaptation statistics exactly: mean and
  // the 1/n covariance split by r = tr(B) / tr(B+W).
  PldaModel at1 = PldaAdapt(model, adaptation, 1.0);
  int dim = model.Dim();
  double n = static_cast<double>(adaptation.Size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const Embedding &e : adaptation.Items()) mean += e.vector;
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const Embedding &e : adaptation.Items()) {
    Eigen::VectorXd r = e.vector - mean;
    cov += r * r.transpose();
  }
  cov /= n;
  double ratio = model.Between().trace() /
                 (model.Between().trace() + model.Within().trace());
  CHECK(at1.Mu() == mean);
  CHECK((at1.Between() - ratio * cov).cwiseAbs().maxCoeff() == 0.0);
  CHECK((at1.Within() - (1.0 - ratio) * cov).cwiseAbs().maxCoeff() == 0.0);

  PldaModel mid = PldaAdapt(model, adaptation, 0.5);
  CHECK((mid.Mu() - 0.5 * (at0.Mu() + at1.Mu())).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK((mid.Between() - 0.5 * (at0.Between() + at1.Between()))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK((mid.Within() - 0.5 * (at0.Within() + at1.Within()))
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  CHECK_THROWS_AS(PldaAdapt(model, adaptation, 1.5), FormatError);
  EmbeddingSet tiny(3, {adaptation.Items()[0]});
  CHECK_THROWS_AS(PldaAdapt(model, tiny, 0.5), InsufficientData);
}

TEST_CASE("plda serialization round-trips bit-exactly") {
  Rng rng(31);
  PldaModel model = RandomModel(4, &rng);
  std::ostringstream buffer;
  SavePlda(model, buffer);
  std::istringstream in(buffer.str());
  PldaModel loaded = LoadPlda(in);
  CHECK(loaded.Mu() == model.Mu());
  CHECK(loaded.Between() == model.Between());
  CHECK(loaded.Within() == model.Within());
}

TEST_CASE("snorm identity construction") {
  // Cohort scores per side are {+1, -1}: mean 0, stddev 1, so the
  // normalized score equals the raw score.
  std::vector<Embedding> items = {{"e", std::nullopt, Vec({1, 0})},
                                  {"t", std::nullopt, Vec({0, 1})}};
  EmbeddingSet embeddings(2, items);
  std::vector<Embedding> cohort_items = {
      {"c1", std::nullopt, Vec({1, 1})},
      {"c2", std::nullopt, Vec({-1, -1})}};
  Cohort cohort{EmbeddingSet(2, cohort_items), 0};
  ScoreFn dot = [](const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    return a.dot(b);
  };
  ScoreSet raw({{"e", "t", 0.37, TrialLabel::kTarget}});
  ScoreSet normalized = Snorm(raw, dot, embeddings, cohort);
  CHECK(normalized.Entries()[0].score == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(normalized.Entries()[0].label == TrialLabel::kTarget);
}

TEST_CASE("snorm degenerate and missing cases") {
  std::vector<Embedding> items = {{"e", std::nullopt, Vec({1, 0})},
                                  {"t", std::nullopt, Vec({0, 1})}};
  EmbeddingSet embeddings(2, items);
  ScoreFn dot = [](const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    return a.dot(b);
  };

  // Identical cohort vectors give zero spread on every side.
  std::vector<Embedding> flat = {{"c1", std::nullopt, Vec({1, 1})},
                                 {"c2", std::nullopt, Vec({1, 1})}};
  Cohort degenerate{EmbeddingSet(2, flat), 0};
  ScoreSet raw({{"e", "t", 0.5, std::nullopt}});
  CHECK_THROWS_AS(Snorm(raw, dot, embeddings, degenerate), DegenerateCohort);

  std::vector<Embedding> ok = {{"c1", std::nullopt, Vec({1, 1})},
                               {"c2", std::nullopt, Vec({-1, 0})}};
  Cohort cohort{EmbeddingSet(2, ok), 0};
  ScoreSet missing({{"nope", "t", 0.5, std::nullopt}});
  CHECK_THROWS_AS(Snorm(missing, dot, embeddings, cohort), MissingUtterance);
}

TEST_CASE("snorm is invariant under common positive affine transforms") {
  Rng rng(61);
  int dim = 6;
  std::vector<Embedding> items, cohort_items;
  for (int i = 0; i < 4; i++)
    items.push_back({"u" + std::to_string(i), std::nullopt,
                     rng.GaussianVector(dim)});
  for (int i = 0; i < 12; i++)
    cohort_items.push_back({"c" + std::to_string(i), std::nullopt,
                            rng.GaussianVector(dim)});
  EmbeddingSet embeddings(dim, items);
  Cohort cohort{EmbeddingSet(dim, cohort_items), 5};

  std::vector<ScoreEntry> entries;
  for (int e = 0; e < 4; e++)
    for (int t = 0; t < 4; t++) {
      if (e == t) continue;
      entries.push_back({"u" + std::to_string(e), "u" + std::to_string(t),
                         embeddings.Items()[e].vector.dot(
                             embeddings.Items()[t].vector),
                         std::nullopt});
    }
  ScoreSet raw(entries);

  double a = 2.75, b = -4.0;
  ScoreFn dot = [](const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
    return x.dot(y);
  };
  ScoreFn scaled_dot = [a, b](const Eigen::VectorXd &x,
                              const Eigen::VectorXd &y) {
    return a * x.dot(y) + b;
  };
  std::vector<ScoreEntry> scaled_entries = entries;
  for (ScoreEntry &e : scaled_entries) e.score = a * e.score + b;

  ScoreSet plain = Snorm(raw, dot, embeddings, cohort);
  ScoreSet transformed =
      Snorm(ScoreSet(scaled_entries), scaled_dot, embeddings, cohort);
  for (size_t i = 0; i < plain.Size(); i++)
    CHECK(std::abs(plain.Entries()[i].score -
                   transformed.Entries()[i].score) < 1e-10);
}

TEST_CASE("score_trials with the cosine backend") {
  std::vector<Embedding> items = {{"a", std::nullopt, Vec({1, 2})},
                                  {"b", std::nullopt, Vec({2, 4})},
                                  {"c", std::nullopt, Vec({1, 0})}};
  EmbeddingSet embeddings(2, items);
  std::vector<Trial> trials = {{"a", "b", TrialLabel::kTarget},
                               {"a", "c", std::nullopt}};
  ScoreSet scores = ScoreTrials(CosineBackend{}, embeddings, trials);
  REQUIRE(scores.Size() == 2);
  CHECK(scores.Entries()[0].score ==
        doctest::Approx(1.0).epsilon(1e-15));  // parallel vectors
  CHECK(scores.Entries()[0].label == TrialLabel::kTarget);
  CHECK(scores.Entries()[1].score ==
        doctest::Approx(CosineSimilarity(Vec({1, 2}), Vec({1, 0})))
            .epsilon(1e-15));

  std::vector<Trial> missing = {{"a", "zzz", std::nullopt}};
  CHECK_THROWS_AS(ScoreTrials(CosineBackend{}, embeddings, missing),
                  MissingUtterance);
}

TEST_CASE("score_trials reconstruction composes with the forward map") {
  Rng rng(41);
  int dim = 4;
  std::vector<Embedding> items;
  for (int i = 0; i < 6; i++)
    items.push_back({"u" + std::to_string(i), std::nullopt,
                     rng.GaussianVector(dim)});
  EmbeddingSet embeddings(dim, items);
  MlpParameters net = testing::RandomMlp(dim, {5}, Activation::kTanh, &rng);

  std::vector<Trial> trials = {{"u0", "u1", std::nullopt},
                               {"u2", "u3", std::nullopt}};
  ScoringOptions options;
  options.reconstruct_test = true;
  options.svr = &net;
  ScoreSet scores = ScoreTrials(CosineBackend{}, embeddings, trials, options);
  for (size_t i = 0; i < trials.size(); i++) {
    const Embedding *e = embeddings.Find(trials[i].enroll_utt);
    const Embedding *t = embeddings.Find(trials[i].test_utt);
    double expected = CosineSimilarity(e->vector, MlpForward(net, t->vector));
    CHECK(scores.Entries()[i].score == doctest::Approx(expected).epsilon(1e-15));
  }

  ScoringOptions broken;
  broken.reconstruct_test = true;
  CHECK_THROWS_AS(ScoreTrials(CosineBackend{}, embeddings, trials, broken),
                  FormatError);
}

TEST_CASE("score_trials matches the plda scorer and honors length norm") {
  Rng rng(50);
  int dim = 3;
  PldaModel model = RandomModel(dim, &rng);
  std::vector<Embedding> items;
  for (int i = 0; i < 4; i++)
    items.push_back({"u" + std::to_string(i), std::nullopt,
                     rng.GaussianVector(dim)});
  EmbeddingSet embeddings(dim, items);
  std::vector<Trial> trials = {{"u0", "u1", std::nullopt},
                               {"u3", "u2", std::nullopt}};

  ScoreSet scores = ScoreTrials(PldaBackend{model}, embeddings, trials);
  PldaScorer scorer(model);
  CHECK(scores.Entries()[0].score ==
        scorer.Score(items[0].vector, items[1].vector));

  ScoringOptions options;
  options.length_normalize = true;
  ScoreSet normalized =
      ScoreTrials(PldaBackend{model}, embeddings, trials, options);
  CHECK(normalized.Entries()[0].score ==
        scorer.Score(LengthNormalize(items[0].vector),
                     LengthNormalize(items[1].vector)));
}

TEST_CASE("score_trials output does not depend on trial order") {
  Rng rng(71);
  int dim = 5;
  std::vector<Embedding> items, cohort_items;
  for (int i = 0; i < 8; i++)
    items.push_back({"u" + std::to_string(i), std::nullopt,
                     rng.GaussianVector(dim)});
  for (int i = 0; i < 10; i++)
    cohort_items.push_back({"c" + std::to_string(i), std::nullopt,
                            rng.GaussianVector(dim)});
  EmbeddingSet embeddings(dim, items);
  Cohort cohort{EmbeddingSet(dim, cohort_items), 4};

  std::vector<Trial> trials;
  for (int e = 0; e < 8; e++)
    for (int t = 0; t < 8; t++)
      if (e != t)
        trials.push_back({"u" + std::to_string(e), "u" + std::to_string(t),
                          std::nullopt});
  std::vector<Trial> shuffled = trials;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(99));

  ScoringOptions options;
  options.snorm = &cohort;
  ScoreSet a = ScoreTrials(CosineBackend{}, embeddings, trials, options);
  ScoreSet b = ScoreTrials(CosineBackend{}, embeddings, shuffled, options);
  std::map<std::pair<std::string, std::string>, double> by_pair;
  for (const ScoreEntry &e : a.Entries())
    by_pair[{e.enroll_utt, e.test_utt}] = e.score;
  for (const ScoreEntry &e : b.Entries())
    CHECK(by_pair.at({e.enroll_utt, e.test_utt}) == e.score);
}
