// include/svrbench/plda.h

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

#ifndef SVRBENCH_PLDA_H_
#define SVRBENCH_PLDA_H_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "svrbench/types.h"

namespace svrbench {

// Two-covariance model: an embedding decomposes as x = mu + y + eps with a
// speaker part y ~ N(0, B) and a within-speaker part eps ~ N(0, W).
// B must be symmetric PSD and W symmetric positive definite; both are
// checked at construction and instances are immutable afterwards.
class PldaModel {
 public:
  PldaModel(Eigen::VectorXd mu, Eigen::MatrixXd between,
            Eigen::MatrixXd within);

  int Dim() const { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd &Mu() const { return mu_; }
  const Eigen::MatrixXd &Between() const { return between_; }
  const Eigen::MatrixXd &Within() const { return within_; }

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd between_;
  Eigen::MatrixXd within_;
};

struct PldaTrainResult {
  PldaModel model;
  // Marginal log-likelihood of the training data after each iteration;
  // non-decreasing up to numerical slack.
  std::vector<double> objective;
};

// Fits B and W by EM on a speaker-labeled set; mu is the global mean.
// Per-speaker posteriors use the precision B^-1 + n_s W^-1.  Near-singular
// covariances get trace/dim * 1e-8 added to the diagonal; if that does not
// make them invertible, SingularCovariance is thrown.
PldaTrainResult PldaTrainEm(const EmbeddingSet &data, int iters);

// Precomputed factorizations for scoring many trials against one model.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel &model);

  int Dim() const { return static_cast<int>(mu_.size()); }

  // Log-likelihood ratio of "same speaker" vs "different speakers" for the
  // stacked pair [enroll; test].
  double Score(const Eigen::VectorXd &enroll,
               const Eigen::VectorXd &test) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::LLT<Eigen::MatrixXd> total_;     // B + W
  Eigen::LLT<Eigen::MatrixXd> same_sum_;  // W + 2B
  Eigen::LLT<Eigen::MatrixXd> within_;    // W
  double logdet_total_ = 0.0;
  double logdet_same_sum_ = 0.0;
  double logdet_within_ = 0.0;
};

double PldaScore(const PldaModel &model, const Eigen::VectorXd &enroll,
                 const Eigen::VectorXd &test);

// Interpolates the model toward the adaptation set: with T_a the empirical
// covariance and mu_a the mean of the set, T_a splits into
// B_a = r T_a and W_a = (1-r) T_a where r = trace(B) / trace(B+W), and each
// parameter moves as (1-alpha) * original + alpha * adapted.  alpha = 0
// returns the original model bit-exactly.
PldaModel PldaAdapt(const PldaModel &model, const EmbeddingSet &adaptation,
                    double alpha);

// Versioned text serialization; round-trips bit-exactly.
void SavePlda(const PldaModel &model, std::ostream &out);
void SavePldaFile(const PldaModel &model, const std::string &path);
PldaModel LoadPlda(std::istream &in, const std::string &name = "<stream>");
PldaModel LoadPldaFile(const std::string &path);

}  // namespace svrbench

#endif  // SVRBENCH_PLDA_H_
