// include/svrbench/scoring.h

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

#ifndef SVRBENCH_SCORING_H_
#define SVRBENCH_SCORING_H_

#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "svrbench/mlp.h"
#include "svrbench/plda.h"
#include "svrbench/types.h"

namespace svrbench {

// Imposter set for adaptive score normalization.  With top_k > 0 only the
// top_k highest cohort scores per trial side enter the statistics; 0 means
// use the whole cohort.
struct Cohort {
  EmbeddingSet embeddings;
  int top_k = 200;
};

using ScoreFn =
    std::function<double(const Eigen::VectorXd &, const Eigen::VectorXd &)>;

// Adaptive symmetric s-norm: each raw score s for trial (e, t) becomes
//   1/2 * ((s - mu_e) / sigma_e + (s - mu_t) / sigma_t)
// where mu_e/sigma_e are the statistics of score_fn(e, c) over the cohort
// and mu_t/sigma_t those of score_fn(c, t).  Throws DegenerateCohort when a
// side's cohort scores have zero spread and MissingUtterance when a trial
// utterance is not in `embeddings`.
ScoreSet Snorm(const ScoreSet &raw, const ScoreFn &score_fn,
               const EmbeddingSet &embeddings, const Cohort &cohort);

struct CosineBackend {};
struct PldaBackend {
  PldaModel model;
};
using ScoringBackend = std::variant<CosineBackend, PldaBackend>;

struct ScoringOptions {
  bool reconstruct_enroll = false;
  bool reconstruct_test = false;
  const MlpParameters *svr = nullptr;    // required by the reconstruct flags
  const Cohort *snorm = nullptr;         // normalize the full set when set
  bool length_normalize = false;         // unit-norm vectors before scoring
};

// Scores every trial: reconstruction is applied to the flagged side(s),
// the backend produces the raw score, and the whole set is then optionally
// s-normalized (cohort scores use the same per-side vectors as the raw
// scores; cohort entries are never reconstructed).  Labels are copied from
// the trials.  The score of a given (enroll, test) pair does not depend on
// the order of the trial list.
ScoreSet ScoreTrials(const ScoringBackend &backend,
                     const EmbeddingSet &embeddings,
                     const std::vector<Trial> &trials,
                     const ScoringOptions &options = {});

}  // namespace svrbench

#endif  // SVRBENCH_SCORING_H_
