// include/svrbench/mlp.h

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

#ifndef SVRBENCH_MLP_H_
#define SVRBENCH_MLP_H_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "svrbench/error.h"

namespace svrbench {

enum class Activation { kRelu, kTanh };

std::string ActivationName(Activation a);
Activation ParseActivation(const std::string &name);

struct LayerParams {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Fully connected network.  The activation is applied after every layer
// except the last, whose output stays linear.
struct MlpParameters {
  std::vector<LayerParams> layers;
  Activation activation = Activation::kRelu;

  int InputDim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
  }
  int OutputDim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
  }
};

// Checks that layer dimensions chain, parameters are finite, and input and
// output dimensions agree (the network maps embeddings to embeddings).
void ValidateMlpParameters(const MlpParameters &params);

Eigen::VectorXd MlpForward(const MlpParameters &params,
                           const Eigen::VectorXd &x);

// Per-layer inputs and pre-activation values captured during a forward pass,
// as needed for backpropagation.
struct MlpTrace {
  std::vector<Eigen::VectorXd> inputs;           // inputs[k] feeds layer k
  std::vector<Eigen::VectorXd> pre_activations;  // W x + b of layer k
};

Eigen::VectorXd MlpForwardTraced(const MlpParameters &params,
                                 const Eigen::VectorXd &x, MlpTrace *trace);

// Gradient container with the same shape as the parameters.
using MlpGradient = std::vector<LayerParams>;

MlpGradient ZeroGradient(const MlpParameters &params);

// Backpropagates output_grad = d(loss)/d(output) through the traced pass and
// accumulates into *grad.
void MlpBackward(const MlpParameters &params, const MlpTrace &trace,
                 const Eigen::VectorXd &output_grad, MlpGradient *grad);

// Versioned text serialization; round-trips parameters bit-exactly.
void SaveMlp(const MlpParameters &params, std::ostream &out);
void SaveMlpFile(const MlpParameters &params, const std::string &path);
MlpParameters LoadMlp(std::istream &in, const std::string &name = "<stream>");
MlpParameters LoadMlpFile(const std::string &path);

}  // namespace svrbench

#endif  // SVRBENCH_MLP_H_
