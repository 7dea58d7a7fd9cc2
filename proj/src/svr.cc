// src/svr.cc

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

#include "svrbench/svr.h"

#include <cmath>
#include <map>
#include <ostream>

#include "svrbench/io.h"

namespace svrbench {

PairedData::PairedData(const EmbeddingSet &low, const EmbeddingSet &high) {
  if (low.Dim() != high.Dim())
    throw DimensionMismatch("low set dim " + std::to_string(low.Dim()) +
                            " differs from high set dim " +
                            std::to_string(high.Dim()));
  dim_ = low.Dim();
  if (low.Size() != high.Size())
    throw InsufficientData("low and high sets are not aligned: " +
                           std::to_string(low.Size()) + " vs " +
                           std::to_string(high.Size()) + " utterances");

  // Group by speaker in first-appearance order; items keep input order
  // within a group.  This ordering is part of the sampling determinism.
  std::map<std::string, size_t> speaker_index;
  std::vector<std::vector<Item>> groups;
  for (const Embedding &e : low.Items()) {
    const Embedding *h = high.Find(e.utterance_id);
    if (h == nullptr)
      throw InsufficientData("utterance '" + e.utterance_id +
                             "' missing from the high-quality set");
    if (!e.speaker_id.has_value())
      throw InsufficientData("utterance '" + e.utterance_id +
                             "' has no speaker label");
    if (h->speaker_id.has_value() && *h->speaker_id != *e.speaker_id)
      throw InsufficientData("utterance '" + e.utterance_id +
                             "' has conflicting speaker labels");
    auto [it, inserted] =
        speaker_index.emplace(*e.speaker_id, groups.size());
    if (inserted) groups.emplace_back();
    Item item;
    item.utterance_id = e.utterance_id;
    item.speaker = it->second;
    item.low = e.vector;
    item.high = h->vector;
    groups[it->second].push_back(std::move(item));
  }

  for (size_t s = 0; s < groups.size(); s++) {
    group_begin_.push_back(items_.size());
    group_size_.push_back(groups[s].size());
    for (Item &item : groups[s]) items_.push_back(std::move(item));
  }
  for (size_t i = 0; i < items_.size(); i++)
    if (group_size_[items_[i].speaker] >= 2) multi_utt_items_.push_back(i);
}

std::string OptimizerName(Optimizer o) {
  return o == Optimizer::kSgd ? "sgd" : "adam";
}

Optimizer ParseOptimizer(const std::string &name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "adam") return Optimizer::kAdam;
  throw FormatError("unknown optimizer '" + name + "'");
}

void ValidateTrainConfig(const TrainConfig &cfg) {
  if (cfg.hidden_dims.empty())
    throw DimensionMismatch("at least one hidden layer is required");
  for (int h : cfg.hidden_dims)
    if (h < 1) throw DimensionMismatch("hidden dims must be positive");
  if (cfg.steps < 1) throw FormatError("steps must be positive");
  if (cfg.batch_size < 1) throw FormatError("batch_size must be positive");
  if (!(cfg.learning_rate > 0.0))
    throw FormatError("learning_rate must be positive");
  if (!(cfg.same_speaker_fraction > 0.0 &&
        cfg.same_speaker_fraction < 1.0))
    throw FormatError("same_speaker_fraction must lie strictly in (0, 1)");
  if (!(cfg.loss_weights.recon > 0.0 && cfg.loss_weights.cos > 0.0))
    throw FormatError("loss weights must be positive");
}

namespace {

constexpr double kMinReconstructedNorm = 1e-30;

struct PairEval {
  PairLossTerms terms;
  // Populated only when a gradient was requested.
  MlpGradient grad;
};

// One forward/backward evaluation of the pair loss
//   w_recon * (||F(x1l) - x1h||^2 + ||F(x2l) - x2h||^2)
//     + w_cos * (cos(F(x1l), F(x2l)) - delta)^2
// with delta = 1 for a same-speaker pair and 0 otherwise.
PairEval EvalPair(const MlpParameters &params, const PairSample &s,
                  const LossWeights &weights, bool want_grad) {
  MlpTrace trace1, trace2;
  Eigen::VectorXd y1 = MlpForwardTraced(params, s.x1_low, &trace1);
  Eigen::VectorXd y2 = MlpForwardTraced(params, s.x2_low, &trace2);
  if (y1.size() != s.x1_high.size() || y2.size() != s.x2_high.size())
    throw DimensionMismatch("high-quality target dim does not match network");

  double n1 = y1.norm(), n2 = y2.norm();
  if (n1 < kMinReconstructedNorm || n2 < kMinReconstructedNorm)
    throw ZeroVector("reconstructed output has vanishing norm; "
                     "cosine term undefined");

  Eigen::VectorXd r1 = y1 - s.x1_high;
  Eigen::VectorXd r2 = y2 - s.x2_high;
  double cos = y1.dot(y2) / (n1 * n2);
  double delta = s.same_speaker ? 1.0 : 0.0;
  double residual = cos - delta;

  PairEval eval;
  eval.terms.recon1 = r1.squaredNorm();
  eval.terms.recon2 = r2.squaredNorm();
  eval.terms.cos_term = residual * residual;
  eval.terms.loss = weights.recon * (eval.terms.recon1 + eval.terms.recon2) +
                    weights.cos * eval.terms.cos_term;
  if (!want_grad) return eval;

  // d(cos)/dy1 = y2 / (n1 n2) - cos * y1 / n1^2, symmetrically for y2.
  double cos_scale = 2.0 * weights.cos * residual;
  Eigen::VectorXd g1 = 2.0 * weights.recon * r1 +
                       cos_scale * (y2 / (n1 * n2) - (cos / (n1 * n1)) * y1);
  Eigen::VectorXd g2 = 2.0 * weights.recon * r2 +
                       cos_scale * (y1 / (n1 * n2) - (cos / (n2 * n2)) * y2);

  eval.grad = ZeroGradient(params);
  MlpBackward(params, trace1, g1, &eval.grad);
  MlpBackward(params, trace2, g2, &eval.grad);
  return eval;
}

}  // namespace

PairLossTerms SvrPairLoss(const MlpParameters &params, const PairSample &s,
                          const LossWeights &weights) {
  return EvalPair(params, s, weights, false).terms;
}

MlpGradient SvrPairGrad(const MlpParameters &params, const PairSample &s,
                        const LossWeights &weights) {
  return EvalPair(params, s, weights, true).grad;
}

std::vector<PairSample> SamplePairs(const PairedData &data, int n,
                                    const TrainConfig &cfg, Rng *rng) {
  if (n < 0) throw FormatError("pair count must be non-negative");
  if (data.Size() == 0) throw InsufficientData("empty training dataset");

  int n_same = static_cast<int>(
      std::llround(cfg.same_speaker_fraction * static_cast<double>(n)));
  int n_diff = n - n_same;
  if (n_same > 0 && data.MultiUttItems().empty())
    throw InsufficientData(
        "same-speaker pairs requested but no speaker has two utterances");
  if (n_diff > 0 && data.NumSpeakers() < 2)
    throw InsufficientData(
        "different-speaker pairs requested but only one speaker present");

  const std::vector<PairedData::Item> &items = data.Items();
  std::vector<PairSample> pairs;
  pairs.reserve(n);

  auto make_pair = [&](size_t i, size_t j, bool same) {
    PairSample s;
    s.x1_low = items[i].low;
    s.x1_high = items[i].high;
    s.x2_low = items[j].low;
    s.x2_high = items[j].high;
    s.same_speaker = same;
    return s;
  };

  for (int k = 0; k < n_same; k++) {
    size_t i = data.MultiUttItems()[rng->UniformInt(
        data.MultiUttItems().size())];
    size_t spk = items[i].speaker;
    size_t begin = data.GroupBegin(spk), size = data.GroupSize(spk);
    // Uniform over the speaker's other utterances.
    size_t offset = rng->UniformInt(size - 1);
    size_t j = begin + offset;
    if (j >= i) j++;
    pairs.push_back(make_pair(i, j, true));
  }
  for (int k = 0; k < n_diff; k++) {
    size_t i = rng->UniformInt(items.size());
    size_t spk = items[i].speaker;
    size_t begin = data.GroupBegin(spk), size = data.GroupSize(spk);
    // Uniform over utterances outside the speaker's contiguous block.
    size_t j = rng->UniformInt(items.size() - size);
    if (j >= begin) j += size;
    pairs.push_back(make_pair(i, j, false));
  }
  return pairs;
}

MlpParameters InitMlp(int dim, const std::vector<int> &hidden_dims,
                      Activation activation, Rng *rng) {
  std::vector<int> dims;
  dims.push_back(dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(dim);

  MlpParameters params;
  params.activation = activation;
  for (size_t k = 0; k + 1 < dims.size(); k++) {
    int in = dims[k], out = dims[k + 1];
    double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    LayerParams layer;
    layer.weight.resize(out, in);
    for (int r = 0; r < out; r++)
      for (int c = 0; c < in; c++)
        layer.weight(r, c) = (2.0 * rng->Uniform() - 1.0) * limit;
    layer.bias = Eigen::VectorXd::Zero(out);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

TrainResult Train(const PairedData &data, const TrainConfig &cfg) {
  ValidateTrainConfig(cfg);
  if (data.Size() == 0) throw InsufficientData("empty training dataset");

  Rng rng(cfg.seed);
  MlpParameters params =
      InitMlp(data.Dim(), cfg.hidden_dims, cfg.activation, &rng);

  MlpGradient adam_m, adam_v;
  if (cfg.optimizer == Optimizer::kAdam) {
    adam_m = ZeroGradient(params);
    adam_v = ZeroGradient(params);
  }

  std::vector<double> curve;
  curve.reserve(cfg.steps);
  double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);

  for (int step = 0; step < cfg.steps; step++) {
    std::vector<PairSample> batch =
        SamplePairs(data, cfg.batch_size, cfg, &rng);

    MlpGradient grad = ZeroGradient(params);
    double loss_sum = 0.0;
    // Fixed accumulation order keeps runs bit-identical.
    for (const PairSample &s : batch) {
      PairEval eval = EvalPair(params, s, cfg.loss_weights, true);
      loss_sum += eval.terms.loss;
      for (size_t k = 0; k < grad.size(); k++) {
        grad[k].weight += eval.grad[k].weight;
        grad[k].bias += eval.grad[k].bias;
      }
    }
    double mean_loss = loss_sum * inv_batch;
    if (!std::isfinite(mean_loss))
      throw NumericalDivergence("batch loss became non-finite at step " +
                                std::to_string(step));
    curve.push_back(mean_loss);

    for (size_t k = 0; k < grad.size(); k++) {
      grad[k].weight *= inv_batch;
      grad[k].bias *= inv_batch;
    }

    if (cfg.optimizer == Optimizer::kSgd) {
      for (size_t k = 0; k < params.layers.size(); k++) {
        params.layers[k].weight -= cfg.learning_rate * grad[k].weight;
        params.layers[k].bias -= cfg.learning_rate * grad[k].bias;
      }
    } else {
      // Adam with the folded bias correction: the corrected step size is
      // lr * sqrt(1 - beta2^t) / (1 - beta1^t).
      double t = static_cast<double>(step + 1);
      double correction1 = 1.0 - std::pow(cfg.adam_beta1, t);
      double correction2 = 1.0 - std::pow(cfg.adam_beta2, t);
      double rate = cfg.learning_rate * std::sqrt(correction2) / correction1;
      auto update = [&](auto &p, auto &m, auto &v, const auto &g) {
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
        p.array() -= rate * m.array() / (v.array().sqrt() + cfg.adam_epsilon);
      };
      for (size_t k = 0; k < params.layers.size(); k++) {
        update(params.layers[k].weight, adam_m[k].weight, adam_v[k].weight,
               grad[k].weight);
        update(params.layers[k].bias, adam_m[k].bias, adam_v[k].bias,
               grad[k].bias);
      }
    }
  }

  return {std::move(params), std::move(curve)};
}

EmbeddingSet Reconstruct(const MlpParameters &params,
                         const EmbeddingSet &set) {
  ValidateMlpParameters(params);
  if (set.Dim() != params.InputDim())
    throw DimensionMismatch("set dim " + std::to_string(set.Dim()) +
                            " does not match network dim " +
                            std::to_string(params.InputDim()));
  std::vector<Embedding> items;
  items.reserve(set.Size());
  for (const Embedding &e : set.Items()) {
    Embedding out = e;
    out.vector = MlpForward(params, e.vector);
    items.push_back(std::move(out));
  }
  return EmbeddingSet(set.Dim(), std::move(items));
}

void SaveLossCurveCsv(const std::vector<double> &curve, std::ostream &out) {
  out << "step,loss\n";
  for (size_t i = 0; i < curve.size(); i++)
    out << i << ',' << FormatFloat17(curve[i]) << '\n';
}

void SaveLossCurveCsvFile(const std::vector<double> &curve,
                          const std::string &path) {
  AtomicWriteFile(path,
                  [&](std::ostream &out) { SaveLossCurveCsv(curve, out); });
}

}  // namespace svrbench
