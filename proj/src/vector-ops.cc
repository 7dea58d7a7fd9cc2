// src/vector-ops.cc

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

#include "svrbench/vector-ops.h"

#include <algorithm>

namespace svrbench {

double CosineSimilarity(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  if (a.size() != b.size())
    throw DimensionMismatch("cosine similarity of vectors with sizes " +
                            std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  if (a.size() == 0)
    throw DimensionMismatch("cosine similarity of empty vectors");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw ZeroVector("cosine similarity with a zero-norm vector");
  double cos = a.dot(b) / (na * nb);
  return std::clamp(cos, -1.0, 1.0);
}

Eigen::VectorXd LengthNormalize(const Eigen::VectorXd &v) {
  double norm = v.norm();
  if (norm == 0.0) throw ZeroVector("cannot length-normalize a zero vector");
  return v / norm;
}

Embedding LengthNormalize(const Embedding &e) {
  Embedding out = e;
  out.vector = LengthNormalize(e.vector);
  return out;
}

}  // namespace svrbench
