// src/scoring.cc

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

#include "svrbench/scoring.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

#include "svrbench/vector-ops.h"

namespace svrbench {

namespace {

struct SideStats {
  double mean = 0.0;
  double stddev = 0.0;
};

// Cohort statistics for one trial side.  `against` computes the cohort
// score for one imposter vector.
SideStats CohortStats(
    const std::vector<Eigen::VectorXd> &cohort, int top_k,
    const std::function<double(const Eigen::VectorXd &)> &against,
    const std::string &side_utt) {
  std::vector<double> scores;
  scores.reserve(cohort.size());
  for (const Eigen::VectorXd &c : cohort) scores.push_back(against(c));

  size_t keep = scores.size();
  if (top_k > 0 && static_cast<size_t>(top_k) < scores.size()) {
    keep = static_cast<size_t>(top_k);
    std::nth_element(scores.begin(), scores.begin() + keep - 1, scores.end(),
                     std::greater<double>());
    scores.resize(keep);
  }

  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(keep);
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(keep);
  double stddev = std::sqrt(var);
  if (!(stddev > 0.0))
    throw DegenerateCohort("cohort scores for '" + side_utt +
                           "' have zero spread");
  return {mean, stddev};
}

// Shared core: normalizes entries given per-side vector resolvers, so the
// caller controls whether reconstruction applies.
ScoreSet SnormCore(
    const ScoreSet &raw, const ScoreFn &score_fn,
    const std::function<const Eigen::VectorXd &(const std::string &)> &
        enroll_vec,
    const std::function<const Eigen::VectorXd &(const std::string &)> &
        test_vec,
    const std::vector<Eigen::VectorXd> &cohort_vecs, int top_k) {
  if (cohort_vecs.empty()) throw DegenerateCohort("empty cohort");

  std::unordered_map<std::string, SideStats> enroll_stats, test_stats;
  std::vector<ScoreEntry> entries = raw.Entries();
  for (ScoreEntry &e : entries) {
    auto eit = enroll_stats.find(e.enroll_utt);
    if (eit == enroll_stats.end()) {
      const Eigen::VectorXd &ev = enroll_vec(e.enroll_utt);
      eit = enroll_stats
                .emplace(e.enroll_utt,
                         CohortStats(cohort_vecs, top_k,
                                     [&](const Eigen::VectorXd &c) {
                                       return score_fn(ev, c);
                                     },
                                     e.enroll_utt))
                .first;
    }
    auto tit = test_stats.find(e.test_utt);
    if (tit == test_stats.end()) {
      const Eigen::VectorXd &tv = test_vec(e.test_utt);
      tit = test_stats
                .emplace(e.test_utt,
                         CohortStats(cohort_vecs, top_k,
                                     [&](const Eigen::VectorXd &c) {
                                       return score_fn(c, tv);
                                     },
                                     e.test_utt))
                .first;
    }
    const SideStats &es = eit->second, &ts = tit->second;
    e.score = 0.5 * ((e.score - es.mean) / es.stddev +
                     (e.score - ts.mean) / ts.stddev);
  }
  return ScoreSet(std::move(entries));
}

const Eigen::VectorXd &LookupVector(const EmbeddingSet &set,
                                    const std::string &utt) {
  const Embedding *e = set.Find(utt);
  if (e == nullptr)
    throw MissingUtterance("utterance '" + utt + "' not found");
  return e->vector;
}

}  // namespace

ScoreSet Snorm(const ScoreSet &raw, const ScoreFn &score_fn,
               const EmbeddingSet &embeddings, const Cohort &cohort) {
  if (cohort.top_k < 0) throw FormatError("top_k must be non-negative");
  if (cohort.embeddings.Size() == 0) throw DegenerateCohort("empty cohort");
  if (cohort.embeddings.Dim() != embeddings.Dim())
    throw DimensionMismatch("cohort dim does not match the scored embeddings");
  std::vector<Eigen::VectorXd> cohort_vecs;
  cohort_vecs.reserve(cohort.embeddings.Size());
  for (const Embedding &e : cohort.embeddings.Items())
    cohort_vecs.push_back(e.vector);
  auto resolve = [&](const std::string &utt) -> const Eigen::VectorXd & {
    return LookupVector(embeddings, utt);
  };
  return SnormCore(raw, score_fn, resolve, resolve, cohort_vecs,
                   cohort.top_k);
}

ScoreSet ScoreTrials(const ScoringBackend &backend,
                     const EmbeddingSet &embeddings,
                     const std::vector<Trial> &trials,
                     const ScoringOptions &options) {
  if ((options.reconstruct_enroll || options.reconstruct_test) &&
      options.svr == nullptr)
    throw FormatError("reconstruction requested but no SVR model given");
  if (options.svr != nullptr) {
    ValidateMlpParameters(*options.svr);
    if (options.svr->InputDim() != embeddings.Dim())
      throw DimensionMismatch("SVR model dim " +
                              std::to_string(options.svr->InputDim()) +
                              " does not match embeddings dim " +
                              std::to_string(embeddings.Dim()));
  }

  ScoreFn score_fn;
  std::shared_ptr<PldaScorer> plda;
  if (std::holds_alternative<CosineBackend>(backend)) {
    score_fn = [](const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
      return CosineSimilarity(a, b);
    };
  } else {
    plda = std::make_shared<PldaScorer>(std::get<PldaBackend>(backend).model);
    if (plda->Dim() != embeddings.Dim())
      throw DimensionMismatch("PLDA dim does not match embeddings dim");
    score_fn = [plda](const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
      return plda->Score(a, b);
    };
  }

  // Per-side caches: one utterance can appear in many trials (and with
  // different processing per side).
  auto make_side_cache = [&](bool reconstruct) {
    auto cache =
        std::make_shared<std::unordered_map<std::string, Eigen::VectorXd>>();
    return [&, cache, reconstruct](
               const std::string &utt) -> const Eigen::VectorXd & {
      auto it = cache->find(utt);
      if (it != cache->end()) return it->second;
      Eigen::VectorXd v = LookupVector(embeddings, utt);
      if (reconstruct) v = MlpForward(*options.svr, v);
      if (options.length_normalize) v = LengthNormalize(v);
      return cache->emplace(utt, std::move(v)).first->second;
    };
  };
  auto enroll_vec = make_side_cache(options.reconstruct_enroll);
  auto test_vec = make_side_cache(options.reconstruct_test);

  std::vector<ScoreEntry> entries;
  entries.reserve(trials.size());
  for (const Trial &t : trials) {
    ScoreEntry e;
    e.enroll_utt = t.enroll_utt;
    e.test_utt = t.test_utt;
    e.score = score_fn(enroll_vec(t.enroll_utt), test_vec(t.test_utt));
    e.label = t.label;
    entries.push_back(std::move(e));
  }
  ScoreSet scores(std::move(entries));

  if (options.snorm != nullptr) {
    const Cohort &cohort = *options.snorm;
    if (cohort.top_k < 0) throw FormatError("top_k must be non-negative");
    if (cohort.embeddings.Size() == 0)
      throw DegenerateCohort("empty cohort");
    if (cohort.embeddings.Dim() != embeddings.Dim())
      throw DimensionMismatch(
          "cohort dim does not match the scored embeddings");
    std::vector<Eigen::VectorXd> cohort_vecs;
    cohort_vecs.reserve(cohort.embeddings.Size());
    for (const Embedding &e : cohort.embeddings.Items())
      cohort_vecs.push_back(options.length_normalize
                                ? LengthNormalize(e.vector)
                                : e.vector);
    scores = SnormCore(scores, score_fn, enroll_vec, test_vec, cohort_vecs,
                       cohort.top_k);
  }
  return scores;
}

}  // namespace svrbench
