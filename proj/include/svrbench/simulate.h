// include/svrbench/simulate.h

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

#ifndef SVRBENCH_SIMULATE_H_
#define SVRBENCH_SIMULATE_H_

#include <cstdint>
#include <variant>
#include <vector>

#include "svrbench/types.h"

namespace svrbench {

// Synthetic world: speaker means drawn from N(0, sigma_between^2 I) and
// utterances scattered around them with N(0, sigma_within^2 I).  Everything
// is a pure function of the config, bit-identical across runs.

struct WorldConfig {
  int dim = 32;
  int n_speakers = 400;
  int utts_per_speaker = 10;
  double sigma_between = 1.0;
  double sigma_within = 0.7;
  uint64_t seed = 0;
};

// Ids are "spk<i>/utt<j>" with speaker label "spk<i>".
EmbeddingSet GenerateWorld(const WorldConfig &cfg);

// Quality-degradation channels.  The channel transform (basis, matrix,
// bias) is drawn once from the channel seed and applied to every
// utterance; additive noise is drawn per utterance.

struct AdditiveNoiseChannel {
  double sigma = 1.0;
};

// Projects onto a random rank-r orthonormal basis, plus optional noise.
struct RankProjectionChannel {
  int rank = 1;
  double sigma = 0.0;
};

// x -> diag(f) R x + b + noise with R a random orthogonal matrix, per-axis
// factors f uniform in [1 - scale_spread, 1 + scale_spread], and
// b ~ N(0, bias_sigma^2 I).
struct AffineChannel {
  double scale_spread = 0.7;
  double bias_sigma = 1.0;
  double noise_sigma = 0.35;
};

struct DegradationChannel {
  std::variant<AdditiveNoiseChannel, RankProjectionChannel, AffineChannel>
      kind = AffineChannel{};
  uint64_t seed = 0;
};

EmbeddingSet Degrade(const EmbeddingSet &set, const DegradationChannel &ch);

// Speaker-disjoint train/eval split with per-speaker enroll/test utterance
// split and sampled labeled trials.
struct ProtocolConfig {
  double train_speaker_fraction = 0.75;
  int n_enroll_utts_per_speaker = 3;
  int n_trials_target = 2000;
  int n_trials_nontarget = 2000;
  uint64_t seed = 0;
};

struct Protocol {
  EmbeddingSet train;   // all utterances of the training speakers
  EmbeddingSet enroll;  // enrollment utterances of the evaluation speakers
  EmbeddingSet test;    // remaining utterances of the evaluation speakers
  std::vector<Trial> trials;  // labeled; sampled without replacement
};

Protocol MakeProtocol(const EmbeddingSet &world, const ProtocolConfig &cfg);

}  // namespace svrbench

#endif  // SVRBENCH_SIMULATE_H_
