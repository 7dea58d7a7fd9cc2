// include/svrbench/vector-ops.h

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

#ifndef SVRBENCH_VECTOR_OPS_H_
#define SVRBENCH_VECTOR_OPS_H_

#include <Eigen/Core>

#include "svrbench/types.h"

namespace svrbench {

// (a . b) / (||a|| ||b||), clamped to [-1, 1] so rounding can never push the
// result out of range.  Throws DimensionMismatch / ZeroVector.
double CosineSimilarity(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

// Scales the vector to unit Euclidean norm; ids are unchanged.
// Throws ZeroVector on a zero input.
Embedding LengthNormalize(const Embedding &e);

Eigen::VectorXd LengthNormalize(const Eigen::VectorXd &v);

}  // namespace svrbench

#endif  // SVRBENCH_VECTOR_OPS_H_
