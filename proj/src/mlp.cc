// src/mlp.cc

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

#include "svrbench/mlp.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "svrbench/io.h"

namespace svrbench {

std::string ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
  }
  throw FormatError("unknown activation enum value");
}

Activation ParseActivation(const std::string &name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw FormatError("unknown activation '" + name + "'");
}

void ValidateMlpParameters(const MlpParameters &params) {
  if (params.layers.empty())
    throw DimensionMismatch("network has no layers");
  for (size_t k = 0; k < params.layers.size(); k++) {
    const LayerParams &layer = params.layers[k];
    if (layer.weight.rows() < 1 || layer.weight.cols() < 1)
      throw DimensionMismatch("layer " + std::to_string(k) +
                              " has an empty weight matrix");
    if (layer.bias.size() != layer.weight.rows())
      throw DimensionMismatch("layer " + std::to_string(k) +
                              " bias size does not match weight rows");
    if (k > 0 &&
        layer.weight.cols() != params.layers[k - 1].weight.rows())
      throw DimensionMismatch("layer " + std::to_string(k) +
                              " input does not chain with previous output");
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      throw NumericalDivergence("non-finite parameter in layer " +
                                std::to_string(k));
  }
  if (params.InputDim() != params.OutputDim())
    throw DimensionMismatch("network input dim " +
                            std::to_string(params.InputDim()) +
                            " differs from output dim " +
                            std::to_string(params.OutputDim()));
}

namespace {

inline double ApplyActivation(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative in terms of the pre-activation value.
inline double ActivationSlope(Activation a, double z) {
  if (a == Activation::kRelu) return z > 0.0 ? 1.0 : 0.0;
  double t = std::tanh(z);
  return 1.0 - t * t;
}

}  // namespace

Eigen::VectorXd MlpForwardTraced(const MlpParameters &params,
                                 const Eigen::VectorXd &x, MlpTrace *trace) {
  if (params.layers.empty()) throw DimensionMismatch("network has no layers");
  if (x.size() != params.InputDim())
    throw DimensionMismatch("input size " + std::to_string(x.size()) +
                            " does not match network input dim " +
                            std::to_string(params.InputDim()));
  if (trace != nullptr) {
    trace->inputs.clear();
    trace->pre_activations.clear();
  }
  Eigen::VectorXd a = x;
  size_t last = params.layers.size() - 1;
  for (size_t k = 0; k < params.layers.size(); k++) {
    const LayerParams &layer = params.layers[k];
    if (trace != nullptr) trace->inputs.push_back(a);
    Eigen::VectorXd z = layer.weight * a + layer.bias;
    if (trace != nullptr) trace->pre_activations.push_back(z);
    if (k == last) {
      a = std::move(z);  // linear output layer
    } else {
      a = z.unaryExpr([&](double v) {
        return ApplyActivation(params.activation, v);
      });
    }
  }
  return a;
}

Eigen::VectorXd MlpForward(const MlpParameters &params,
                           const Eigen::VectorXd &x) {
  return MlpForwardTraced(params, x, nullptr);
}

MlpGradient ZeroGradient(const MlpParameters &params) {
  MlpGradient grad;
  grad.reserve(params.layers.size());
  for (const LayerParams &layer : params.layers)
    grad.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(),
                                          layer.weight.cols()),
                    Eigen::VectorXd::Zero(layer.bias.size())});
  return grad;
}

void MlpBackward(const MlpParameters &params, const MlpTrace &trace,
                 const Eigen::VectorXd &output_grad, MlpGradient *grad) {
  size_t num_layers = params.layers.size();
  Eigen::VectorXd g = output_grad;  // d(loss)/d(layer output)
  for (size_t k = num_layers; k-- > 0;) {
    Eigen::VectorXd gz;
    if (k == num_layers - 1) {
      gz = g;
    } else {
      const Eigen::VectorXd &z = trace.pre_activations[k];
      gz.resize(g.size());
      for (Eigen::Index i = 0; i < g.size(); i++)
        gz[i] = g[i] * ActivationSlope(params.activation, z[i]);
    }
    (*grad)[k].bias += gz;
    (*grad)[k].weight += gz * trace.inputs[k].transpose();
    if (k > 0) g = params.layers[k].weight.transpose() * gz;
  }
}

// Model file layout ("# svrmodel v1"):
//   activation <relu|tanh>
//   num_layers <K>
//   then per layer: "layer <out> <in>", a "b ..." line with the bias, and
//   <out> "w ..." lines, one weight-matrix row each.
void SaveMlp(const MlpParameters &params, std::ostream &out) {
  out << "# svrmodel v1\n";
  out << "activation " << ActivationName(params.activation) << "\n";
  out << "num_layers " << params.layers.size() << "\n";
  for (const LayerParams &layer : params.layers) {
    out << "layer " << layer.weight.rows() << ' ' << layer.weight.cols()
        << "\n";
    out << "b";
    for (Eigen::Index i = 0; i < layer.bias.size(); i++)
      out << ' ' << FormatFloat17(layer.bias[i]);
    out << "\n";
    for (Eigen::Index r = 0; r < layer.weight.rows(); r++) {
      out << "w";
      for (Eigen::Index c = 0; c < layer.weight.cols(); c++)
        out << ' ' << FormatFloat17(layer.weight(r, c));
      out << "\n";
    }
  }
}

void SaveMlpFile(const MlpParameters &params, const std::string &path) {
  AtomicWriteFile(path, [&](std::ostream &out) { SaveMlp(params, out); });
}

namespace {

std::vector<std::string> NextFields(std::istream &in, const std::string &name,
                                    size_t *line_no) {
  std::string line;
  while (std::getline(in, line)) {
    (*line_no)++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    if (!fields.empty()) return fields;
  }
  throw FormatError(name + ": unexpected end of model file");
}

long ParseCount(const std::string &tok, const std::string &what,
                const std::string &name) {
  char *end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty() || v < 0)
    throw FormatError(name + ": bad " + what + " '" + tok + "'");
  return v;
}

}  // namespace

MlpParameters LoadMlp(std::istream &in, const std::string &name) {
  size_t line_no = 0;
  std::vector<std::string> f = NextFields(in, name, &line_no);
  if (f.size() != 3 || f[0] != "#" || f[1] != "svrmodel" || f[2] != "v1")
    throw FormatError(name + ": bad model header");

  f = NextFields(in, name, &line_no);
  if (f.size() != 2 || f[0] != "activation")
    throw FormatError(name + ": expected 'activation <name>'");
  MlpParameters params;
  params.activation = ParseActivation(f[1]);

  f = NextFields(in, name, &line_no);
  if (f.size() != 2 || f[0] != "num_layers")
    throw FormatError(name + ": expected 'num_layers <K>'");
  long num_layers = ParseCount(f[1], "layer count", name);

  for (long k = 0; k < num_layers; k++) {
    f = NextFields(in, name, &line_no);
    if (f.size() != 3 || f[0] != "layer")
      throw FormatError(name + ": expected 'layer <out> <in>'");
    long out_dim = ParseCount(f[1], "layer rows", name);
    long in_dim = ParseCount(f[2], "layer cols", name);
    LayerParams layer;
    layer.weight.resize(out_dim, in_dim);
    layer.bias.resize(out_dim);

    f = NextFields(in, name, &line_no);
    if (f.size() != static_cast<size_t>(out_dim) + 1 || f[0] != "b")
      throw FormatError(name + ": bad bias line in layer " +
                        std::to_string(k));
    for (long i = 0; i < out_dim; i++)
      layer.bias[i] = ParseFloat(f[i + 1], name + " layer bias");

    for (long r = 0; r < out_dim; r++) {
      f = NextFields(in, name, &line_no);
      if (f.size() != static_cast<size_t>(in_dim) + 1 || f[0] != "w")
        throw FormatError(name + ": bad weight row in layer " +
                          std::to_string(k));
      for (long c = 0; c < in_dim; c++)
        layer.weight(r, c) = ParseFloat(f[c + 1], name + " layer weight");
    }
    params.layers.push_back(std::move(layer));
  }
  ValidateMlpParameters(params);
  return params;
}

MlpParameters LoadMlpFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  return LoadMlp(in, path);
}

}  // namespace svrbench
