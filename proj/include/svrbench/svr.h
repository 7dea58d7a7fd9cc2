// include/svrbench/svr.h

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

#ifndef SVRBENCH_SVR_H_
#define SVRBENCH_SVR_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "svrbench/mlp.h"
#include "svrbench/rng.h"
#include "svrbench/types.h"

namespace svrbench {

// Siamese reconstruction training: two weight-shared copies of one network
// map low-quality embeddings toward their high-quality counterparts while a
// cosine term pushes reconstructed outputs of same-speaker pairs toward
// cosine 1 and different-speaker pairs toward cosine 0.

struct PairSample {
  Eigen::VectorXd x1_low, x1_high;
  Eigen::VectorXd x2_low, x2_high;
  bool same_speaker = false;
};

struct LossWeights {
  double recon = 1.0;
  double cos = 1.0;
};

struct PairLossTerms {
  double loss = 0.0;     // recon * (recon1 + recon2) + cos * cos_term
  double recon1 = 0.0;   // squared reconstruction error of branch 1
  double recon2 = 0.0;   // squared reconstruction error of branch 2
  double cos_term = 0.0; // squared cosine-target residual
};

// Low/high-quality embeddings aligned by utterance id and grouped by
// speaker, ready for pair sampling.  Every utterance must carry a speaker
// label and appear in both sets.
class PairedData {
 public:
  PairedData(const EmbeddingSet &low, const EmbeddingSet &high);

  struct Item {
    std::string utterance_id;
    size_t speaker = 0;  // dense speaker index
    Eigen::VectorXd low, high;
  };

  int Dim() const { return dim_; }
  size_t Size() const { return items_.size(); }
  size_t NumSpeakers() const { return group_begin_.size(); }
  const std::vector<Item> &Items() const { return items_; }
  size_t GroupBegin(size_t speaker) const { return group_begin_[speaker]; }
  size_t GroupSize(size_t speaker) const { return group_size_[speaker]; }
  // Items whose speaker has at least two utterances (same-speaker pool).
  const std::vector<size_t> &MultiUttItems() const { return multi_utt_items_; }

 private:
  int dim_ = 0;
  std::vector<Item> items_;  // contiguous per-speaker blocks
  std::vector<size_t> group_begin_;
  std::vector<size_t> group_size_;
  std::vector<size_t> multi_utt_items_;
};

enum class Optimizer { kSgd, kAdam };

std::string OptimizerName(Optimizer o);
Optimizer ParseOptimizer(const std::string &name);

struct TrainConfig {
  std::vector<int> hidden_dims = {512, 512};
  Activation activation = Activation::kRelu;
  int steps = 1000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double same_speaker_fraction = 0.5;
  uint64_t seed = 0;
  LossWeights loss_weights;
};

void ValidateTrainConfig(const TrainConfig &cfg);

struct TrainResult {
  MlpParameters params;
  std::vector<double> loss_curve;  // mean batch loss per step
};

// Total pair loss and its unweighted terms.  Throws ZeroVector when a
// reconstructed output has vanishing norm (cosine undefined).
PairLossTerms SvrPairLoss(const MlpParameters &params, const PairSample &s,
                          const LossWeights &weights = {});

// Exact gradient of SvrPairLoss with respect to every weight and bias;
// contributions of the two weight-shared branches accumulate into the one
// parameter set.
MlpGradient SvrPairGrad(const MlpParameters &params, const PairSample &s,
                        const LossWeights &weights = {});

// Draws n pairs; exactly round(same_speaker_fraction * n) of them share a
// speaker.  Utterances are uniform under the polarity constraint and the
// result is a pure function of the rng state.
std::vector<PairSample> SamplePairs(const PairedData &data, int n,
                                    const TrainConfig &cfg, Rng *rng);

// Runs cfg.steps optimizer steps over freshly sampled batches.  Fully
// deterministic given cfg.seed.  Throws NumericalDivergence if the batch
// loss stops being finite.
TrainResult Train(const PairedData &data, const TrainConfig &cfg);

// Applies the network to every vector; ids and order are preserved.
EmbeddingSet Reconstruct(const MlpParameters &params, const EmbeddingSet &set);

// Glorot-uniform weights, zero biases.
MlpParameters InitMlp(int dim, const std::vector<int> &hidden_dims,
                      Activation activation, Rng *rng);

// CSV lines "step,loss".
void SaveLossCurveCsv(const std::vector<double> &curve, std::ostream &out);
void SaveLossCurveCsvFile(const std::vector<double> &curve,
                          const std::string &path);

}  // namespace svrbench

#endif  // SVRBENCH_SVR_H_
