// src/types.cc

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

#include "svrbench/types.h"

#include <cmath>
#include <utility>

namespace svrbench {

EmbeddingSet::EmbeddingSet(int dim, std::vector<Embedding> items)
    : dim_(dim), items_(std::move(items)) {
  if (dim_ < 1)
    throw DimensionMismatch("embedding dimension must be >= 1, got " +
                            std::to_string(dim_));
  index_.reserve(items_.size());
  for (size_t i = 0; i < items_.size(); i++) {
    const Embedding &e = items_[i];
    if (e.utterance_id.empty())
      throw FormatError("empty utterance_id at row " + std::to_string(i));
    if (e.vector.size() != dim_)
      throw DimensionMismatch("utterance '" + e.utterance_id + "' has " +
                              std::to_string(e.vector.size()) +
                              " values, expected " + std::to_string(dim_));
    if (!e.vector.allFinite())
      throw FormatError("non-finite value in utterance '" + e.utterance_id +
                        "'");
    if (!index_.emplace(e.utterance_id, i).second)
      throw FormatError("duplicate utterance_id '" + e.utterance_id + "'");
  }
}

const Embedding *EmbeddingSet::Find(const std::string &utterance_id) const {
  auto it = index_.find(utterance_id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

EmbeddingSet MergeEmbeddingSets(
    const std::vector<const EmbeddingSet *> &sets) {
  if (sets.empty()) throw InsufficientData("no embedding sets to merge");
  int dim = sets.front()->Dim();
  std::vector<Embedding> items;
  for (const EmbeddingSet *set : sets) {
    if (set->Dim() != dim)
      throw DimensionMismatch("cannot merge sets of dims " +
                              std::to_string(dim) + " and " +
                              std::to_string(set->Dim()));
    items.insert(items.end(), set->Items().begin(), set->Items().end());
  }
  return EmbeddingSet(dim, std::move(items));
}

ScoreSet::ScoreSet(std::vector<ScoreEntry> entries)
    : entries_(std::move(entries)) {
  std::unordered_map<std::string, size_t> seen;
  seen.reserve(entries_.size());
  for (const ScoreEntry &e : entries_) {
    if (e.enroll_utt.empty() || e.test_utt.empty())
      throw FormatError("score entry with empty utterance id");
    if (!std::isfinite(e.score))
      throw FormatError("non-finite score for trial (" + e.enroll_utt + ", " +
                        e.test_utt + ")");
    // The separator cannot occur in ids (ids are whitespace-free), so this
    // key is collision-free.
    std::string key = e.enroll_utt + " " + e.test_utt;
    if (!seen.emplace(key, 0).second)
      throw FormatError("duplicate trial (" + e.enroll_utt + ", " +
                        e.test_utt + ")");
  }
}

}  // namespace svrbench
