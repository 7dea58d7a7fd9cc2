// src/simulate.cc

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

#include "svrbench/simulate.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/QR>

#include "svrbench/rng.h"

namespace svrbench {

namespace {

// Thin QR basis with the sign convention that makes the factorization
// unique (positive R diagonal).
Eigen::MatrixXd RandomOrthonormalBasis(int dim, int rank, Rng *rng) {
  Eigen::MatrixXd gaussian = rng->GaussianMatrix(dim, rank);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(dim, rank);
  Eigen::MatrixXd r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  for (int c = 0; c < rank; c++)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  return q;
}

template <typename Fn>
EmbeddingSet MapVectors(const EmbeddingSet &set, Fn &&fn) {
  std::vector<Embedding> items;
  items.reserve(set.Size());
  for (const Embedding &e : set.Items()) {
    Embedding out = e;
    out.vector = fn(e.vector);
    items.push_back(std::move(out));
  }
  return EmbeddingSet(set.Dim(), std::move(items));
}

void ShuffleIndices(std::vector<size_t> *indices, Rng *rng) {
  for (size_t i = indices->size(); i > 1; i--)
    std::swap((*indices)[i - 1], (*indices)[rng->UniformInt(i)]);
}

}  // namespace

EmbeddingSet GenerateWorld(const WorldConfig &cfg) {
  if (cfg.dim < 1) throw DimensionMismatch("world dim must be >= 1");
  if (cfg.n_speakers < 2)
    throw InsufficientData("world needs at least two speakers");
  if (cfg.utts_per_speaker < 1)
    throw InsufficientData("world needs at least one utterance per speaker");
  if (!(cfg.sigma_between > 0.0))
    throw FormatError("sigma_between must be positive");
  if (cfg.sigma_within < 0.0)
    throw FormatError("sigma_within must be non-negative");

  Rng rng(cfg.seed);
  std::vector<Embedding> items;
  items.reserve(static_cast<size_t>(cfg.n_speakers) * cfg.utts_per_speaker);
  for (int s = 0; s < cfg.n_speakers; s++) {
    std::string speaker = "spk" + std::to_string(s);
    Eigen::VectorXd mean = cfg.sigma_between * rng.GaussianVector(cfg.dim);
    for (int j = 0; j < cfg.utts_per_speaker; j++) {
      Embedding e;
      e.utterance_id = speaker + "/utt" + std::to_string(j);
      e.speaker_id = speaker;
      e.vector = cfg.sigma_within > 0.0
                     ? Eigen::VectorXd(mean +
                                       cfg.sigma_within *
                                           rng.GaussianVector(cfg.dim))
                     : mean;
      items.push_back(std::move(e));
    }
  }
  return EmbeddingSet(cfg.dim, std::move(items));
}

EmbeddingSet Degrade(const EmbeddingSet &set, const DegradationChannel &ch) {
  int dim = set.Dim();
  Rng rng(ch.seed);

  if (const auto *noise = std::get_if<AdditiveNoiseChannel>(&ch.kind)) {
    if (noise->sigma < 0.0) throw FormatError("noise sigma must be >= 0");
    double sigma = noise->sigma;
    return MapVectors(set, [&](const Eigen::VectorXd &x) {
      return sigma > 0.0
                 ? Eigen::VectorXd(x + sigma * rng.GaussianVector(dim))
                 : x;
    });
  }

  if (const auto *proj = std::get_if<RankProjectionChannel>(&ch.kind)) {
    if (proj->rank < 1 || proj->rank > dim)
      throw DimensionMismatch("projection rank must lie in [1, dim]");
    if (proj->sigma < 0.0) throw FormatError("projection sigma must be >= 0");
    Eigen::MatrixXd basis = RandomOrthonormalBasis(dim, proj->rank, &rng);
    double sigma = proj->sigma;
    return MapVectors(set, [&](const Eigen::VectorXd &x) {
      Eigen::VectorXd projected = basis * (basis.transpose() * x);
      if (sigma > 0.0) projected += sigma * rng.GaussianVector(dim);
      return projected;
    });
  }

  const auto &affine = std::get<AffineChannel>(ch.kind);
  if (affine.scale_spread < 0.0 || affine.bias_sigma < 0.0 ||
      affine.noise_sigma < 0.0)
    throw FormatError("affine channel parameters must be >= 0");
  // Fixed draw order: per-axis scales, rotation, bias, then per-utterance
  // noise.
  Eigen::VectorXd scales(dim);
  for (int i = 0; i < dim; i++)
    scales[i] = 1.0 - affine.scale_spread +
                2.0 * affine.scale_spread * rng.Uniform();
  Eigen::MatrixXd rotation = RandomOrthonormalBasis(dim, dim, &rng);
  Eigen::MatrixXd transform = scales.asDiagonal() * rotation;
  Eigen::VectorXd bias = affine.bias_sigma > 0.0
                             ? Eigen::VectorXd(affine.bias_sigma *
                                               rng.GaussianVector(dim))
                             : Eigen::VectorXd::Zero(dim);
  double sigma = affine.noise_sigma;
  return MapVectors(set, [&](const Eigen::VectorXd &x) {
    Eigen::VectorXd y = transform * x + bias;
    if (sigma > 0.0) y += sigma * rng.GaussianVector(dim);
    return y;
  });
}

Protocol MakeProtocol(const EmbeddingSet &world, const ProtocolConfig &cfg) {
  if (!(cfg.train_speaker_fraction > 0.0 &&
        cfg.train_speaker_fraction < 1.0))
    throw FormatError("train_speaker_fraction must lie strictly in (0, 1)");
  if (cfg.n_enroll_utts_per_speaker < 1)
    throw FormatError("n_enroll_utts_per_speaker must be positive");
  if (cfg.n_trials_target < 1 || cfg.n_trials_nontarget < 1)
    throw FormatError("trial counts must be positive");

  // Speakers in first-appearance order, with their item indices.
  std::vector<std::string> speakers;
  std::map<std::string, size_t> speaker_index;
  std::vector<std::vector<size_t>> speaker_items;
  const std::vector<Embedding> &items = world.Items();
  for (size_t i = 0; i < items.size(); i++) {
    if (!items[i].speaker_id.has_value())
      throw InsufficientData("utterance '" + items[i].utterance_id +
                             "' has no speaker label");
    auto [it, inserted] =
        speaker_index.emplace(*items[i].speaker_id, speakers.size());
    if (inserted) {
      speakers.push_back(*items[i].speaker_id);
      speaker_items.emplace_back();
    }
    speaker_items[it->second].push_back(i);
  }

  size_t n_speakers = speakers.size();
  size_t n_train = static_cast<size_t>(
      std::llround(cfg.train_speaker_fraction *
                   static_cast<double>(n_speakers)));
  if (n_train < 1 || n_speakers - n_train < 2)
    throw InsufficientData(
        "split needs at least one training speaker and two evaluation "
        "speakers, got " + std::to_string(n_speakers) + " speakers total");

  Rng rng(cfg.seed);
  std::vector<size_t> order(n_speakers);
  for (size_t i = 0; i < n_speakers; i++) order[i] = i;
  ShuffleIndices(&order, &rng);

  std::vector<bool> is_train(n_speakers, false);
  for (size_t i = 0; i < n_train; i++) is_train[order[i]] = true;

  // Per evaluation speaker, a seeded choice of enrollment utterances; the
  // rest become test utterances.  Selections are emitted in world order.
  std::vector<bool> is_enroll(items.size(), false);
  std::vector<bool> is_test(items.size(), false);
  for (size_t s = 0; s < n_speakers; s++) {
    if (is_train[s]) continue;
    const std::vector<size_t> &utts = speaker_items[s];
    if (utts.size() <= static_cast<size_t>(cfg.n_enroll_utts_per_speaker))
      throw InsufficientData(
          "speaker '" + speakers[s] + "' has " +
          std::to_string(utts.size()) +
          " utterances; need more than n_enroll_utts_per_speaker = " +
          std::to_string(cfg.n_enroll_utts_per_speaker));
    std::vector<size_t> shuffled = utts;
    ShuffleIndices(&shuffled, &rng);
    for (size_t k = 0; k < shuffled.size(); k++) {
      if (k < static_cast<size_t>(cfg.n_enroll_utts_per_speaker))
        is_enroll[shuffled[k]] = true;
      else
        is_test[shuffled[k]] = true;
    }
  }

  auto collect = [&](const std::vector<bool> &mask) {
    std::vector<Embedding> subset;
    for (size_t i = 0; i < items.size(); i++)
      if (mask[i]) subset.push_back(items[i]);
    return EmbeddingSet(world.Dim(), std::move(subset));
  };
  std::vector<bool> train_mask(items.size(), false);
  for (size_t i = 0; i < items.size(); i++)
    train_mask[i] = is_train[speaker_index[*items[i].speaker_id]];

  Protocol protocol{collect(train_mask), collect(is_enroll),
                    collect(is_test), {}};

  // Trial pools, enumerated deterministically and sampled without
  // replacement.
  std::vector<std::pair<size_t, size_t>> target_pool, nontarget_pool;
  std::vector<size_t> enroll_idx, test_idx;
  for (size_t i = 0; i < items.size(); i++) {
    if (is_enroll[i]) enroll_idx.push_back(i);
    if (is_test[i]) test_idx.push_back(i);
  }
  for (size_t e : enroll_idx)
    for (size_t t : test_idx) {
      if (*items[e].speaker_id == *items[t].speaker_id)
        target_pool.emplace_back(e, t);
      else
        nontarget_pool.emplace_back(e, t);
    }
  if (target_pool.size() < static_cast<size_t>(cfg.n_trials_target))
    throw InsufficientData("only " + std::to_string(target_pool.size()) +
                           " target pairs available, need " +
                           std::to_string(cfg.n_trials_target));
  if (nontarget_pool.size() < static_cast<size_t>(cfg.n_trials_nontarget))
    throw InsufficientData("only " + std::to_string(nontarget_pool.size()) +
                           " nontarget pairs available, need " +
                           std::to_string(cfg.n_trials_nontarget));

  auto sample_pool = [&](std::vector<std::pair<size_t, size_t>> *pool,
                         size_t count, TrialLabel label) {
    std::vector<size_t> idx(pool->size());
    for (size_t i = 0; i < idx.size(); i++) idx[i] = i;
    ShuffleIndices(&idx, &rng);
    for (size_t k = 0; k < count; k++) {
      const auto &[e, t] = (*pool)[idx[k]];
      protocol.trials.push_back(
          {items[e].utterance_id, items[t].utterance_id, label});
    }
  };
  sample_pool(&target_pool, cfg.n_trials_target, TrialLabel::kTarget);
  sample_pool(&nontarget_pool, cfg.n_trials_nontarget,
              TrialLabel::kNontarget);
  return protocol;
}

}  // namespace svrbench
