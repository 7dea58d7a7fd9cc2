// include/svrbench/types.h

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

#ifndef SVRBENCH_TYPES_H_
#define SVRBENCH_TYPES_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "svrbench/error.h"

namespace svrbench {

// One utterance's fixed-dimension embedding.  speaker_id is absent for
// scoring-only data where the speaker is unknown.
struct Embedding {
  std::string utterance_id;
  std::optional<std::string> speaker_id;
  Eigen::VectorXd vector;
};

// An ordered collection of embeddings sharing one dimension.  Invariants
// (finite values, consistent dimension, non-empty and pairwise-distinct
// utterance ids) are checked at construction; instances are immutable
// afterwards and safe to share across threads.
class EmbeddingSet {
 public:
  EmbeddingSet(int dim, std::vector<Embedding> items);

  int Dim() const { return dim_; }
  size_t Size() const { return items_.size(); }
  const std::vector<Embedding> &Items() const { return items_; }

  // Returns nullptr when the utterance is not in the set.
  const Embedding *Find(const std::string &utterance_id) const;

 private:
  int dim_;
  std::vector<Embedding> items_;
  std::unordered_map<std::string, size_t> index_;
};

enum class TrialLabel { kTarget, kNontarget };

struct Trial {
  std::string enroll_utt;
  std::string test_utt;
  std::optional<TrialLabel> label;
};

struct ScoreEntry {
  std::string enroll_utt;
  std::string test_utt;
  double score = 0.0;
  std::optional<TrialLabel> label;
};

// Labeled or unlabeled trial scores.  Scores must be finite and
// (enroll_utt, test_utt) pairs unique.
class ScoreSet {
 public:
  explicit ScoreSet(std::vector<ScoreEntry> entries);

  size_t Size() const { return entries_.size(); }
  const std::vector<ScoreEntry> &Entries() const { return entries_; }

 private:
  std::vector<ScoreEntry> entries_;
};

// Concatenates sets of a common dimension into one set; utterance ids must
// stay unique across the inputs.
EmbeddingSet MergeEmbeddingSets(const std::vector<const EmbeddingSet *> &sets);

}  // namespace svrbench

#endif  // SVRBENCH_TYPES_H_
