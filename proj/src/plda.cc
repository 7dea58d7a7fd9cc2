// src/plda.cc

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

#include "svrbench/plda.h"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "svrbench/io.h"

namespace svrbench {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kPsdTol = 1e-10;
constexpr double kRegularizerScale = 1e-8;
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

void CheckSymmetric(const Eigen::MatrixXd &m, const std::string &what) {
  if (m.rows() != m.cols())
    throw DimensionMismatch(what + " is not square");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale)
    throw NumericalDivergence(what + " is not symmetric (max asymmetry " +
                              FormatFloat17(asym) + ")");
}

double MinEigenvalue(const Eigen::MatrixXd &m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// A Cholesky that succeeded with a pivot many orders below the matrix scale
// is as unusable as an outright failure.
bool LltHealthy(const Eigen::LLT<Eigen::MatrixXd> &llt) {
  if (llt.info() != Eigen::Success) return false;
  auto diag = llt.matrixLLT().diagonal();
  double lo = diag.minCoeff(), hi = diag.maxCoeff();
  return lo > 0.0 && lo * lo > 1e-13 * hi * hi;
}

// Cholesky with one regularization retry, as used everywhere a covariance
// must be inverted.
Eigen::LLT<Eigen::MatrixXd> FactorizeSpd(const Eigen::MatrixXd &m,
                                         const std::string &what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (LltHealthy(llt)) return llt;
  double reg = kRegularizerScale * m.trace() / static_cast<double>(m.rows());
  if (reg <= 0.0) reg = kRegularizerScale;
  Eigen::MatrixXd regularized =
      m + reg * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  llt.compute(regularized);
  if (!LltHealthy(llt))
    throw SingularCovariance(what + " is singular even after regularization");
  return llt;
}

double LogDet(const Eigen::LLT<Eigen::MatrixXd> &llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

struct SpeakerStats {
  double count = 0.0;
  Eigen::VectorXd mean;  // centered on the global mean
};

struct SufficientStats {
  int dim = 0;
  double num_utts = 0.0;
  Eigen::VectorXd mu;            // global mean
  Eigen::MatrixXd within_scatter;  // sum of (x - speaker mean) outer products
  std::vector<SpeakerStats> speakers;
};

SufficientStats CollectStats(const EmbeddingSet &data) {
  std::map<std::string, std::vector<const Embedding *>> by_speaker;
  for (const Embedding &e : data.Items()) {
    if (!e.speaker_id.has_value())
      throw InsufficientData("utterance '" + e.utterance_id +
                             "' has no speaker label");
    by_speaker[*e.speaker_id].push_back(&e);
  }
  if (by_speaker.size() < 2)
    throw InsufficientData("need at least two speakers, got " +
                           std::to_string(by_speaker.size()));
  bool any_multi = false;
  for (const auto &[spk, utts] : by_speaker)
    if (utts.size() >= 2) any_multi = true;
  if (!any_multi)
    throw InsufficientData(
        "need at least one speaker with two or more utterances");

  SufficientStats stats;
  stats.dim = data.Dim();
  stats.num_utts = static_cast<double>(data.Size());
  stats.mu = Eigen::VectorXd::Zero(stats.dim);
  for (const Embedding &e : data.Items()) stats.mu += e.vector;
  stats.mu /= stats.num_utts;

  stats.within_scatter = Eigen::MatrixXd::Zero(stats.dim, stats.dim);
  for (const auto &[spk, utts] : by_speaker) {
    SpeakerStats s;
    s.count = static_cast<double>(utts.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(stats.dim);
    for (const Embedding *e : utts) mean += e->vector;
    mean /= s.count;
    for (const Embedding *e : utts) {
      Eigen::VectorXd r = e->vector - mean;
      stats.within_scatter += r * r.transpose();
    }
    s.mean = mean - stats.mu;
    stats.speakers.push_back(std::move(s));
  }
  return stats;
}

// Exact marginal log-likelihood of the data under (mu, B, W).  Per speaker
// with n utterances, an orthogonal change of basis over the utterance axis
// splits the joint density into n-1 within-speaker contrasts ~ N(0, W) and
// the scaled speaker mean ~ N(0, W + nB) around mu.
double MarginalLogLikelihood(const SufficientStats &stats,
                             const Eigen::MatrixXd &between,
                             const Eigen::MatrixXd &within) {
  double d = static_cast<double>(stats.dim);
  Eigen::LLT<Eigen::MatrixXd> within_llt = FactorizeSpd(within, "W");
  double logdet_within = LogDet(within_llt);

  double ll = 0.0;
  // Within-speaker part, pooled across speakers:
  // sum_s [ -((n_s - 1) d / 2) log 2pi - ((n_s - 1) / 2) log|W| ]
  //   - 1/2 tr(W^-1 S_w)
  double num_contrasts = stats.num_utts - static_cast<double>(
      stats.speakers.size());
  ll += -0.5 * num_contrasts * (d * kLog2Pi + logdet_within);
  ll += -0.5 * within_llt.solve(stats.within_scatter).trace();

  // Speaker-mean part, sharing factorizations across equal counts.
  std::map<double, std::pair<Eigen::LLT<Eigen::MatrixXd>, double>> by_count;
  for (const SpeakerStats &s : stats.speakers) {
    auto it = by_count.find(s.count);
    if (it == by_count.end()) {
      Eigen::MatrixXd cov = within + s.count * between;
      Eigen::LLT<Eigen::MatrixXd> llt = FactorizeSpd(cov, "W + nB");
      double logdet = LogDet(llt);
      it = by_count.emplace(s.count, std::make_pair(std::move(llt), logdet))
               .first;
    }
    const auto &[llt, logdet] = it->second;
    double quad = s.mean.dot(llt.solve(s.mean));
    ll += -0.5 * (d * kLog2Pi + logdet + s.count * quad);
  }
  return ll;
}

}  // namespace

PldaModel::PldaModel(Eigen::VectorXd mu, Eigen::MatrixXd between,
                     Eigen::MatrixXd within)
    : mu_(std::move(mu)), between_(std::move(between)),
      within_(std::move(within)) {
  if (mu_.size() < 1) throw DimensionMismatch("model mean is empty");
  if (between_.rows() != mu_.size() || within_.rows() != mu_.size())
    throw DimensionMismatch("covariance size does not match the mean");
  if (!mu_.allFinite() || !between_.allFinite() || !within_.allFinite())
    throw NumericalDivergence("non-finite model parameter");
  CheckSymmetric(between_, "between-speaker covariance");
  CheckSymmetric(within_, "within-speaker covariance");
  if (MinEigenvalue(between_) < -kPsdTol)
    throw SingularCovariance(
        "between-speaker covariance has a negative eigenvalue");
  if (!(MinEigenvalue(within_) > 0.0))
    throw SingularCovariance(
        "within-speaker covariance is not positive definite");
}

PldaTrainResult PldaTrainEm(const EmbeddingSet &data, int iters) {
  if (iters < 1) throw FormatError("iteration count must be positive");
  SufficientStats stats = CollectStats(data);
  int dim = stats.dim;
  double num_speakers = static_cast<double>(stats.speakers.size());

  // Moment initialization: pooled within-speaker covariance and the scatter
  // of speaker means.
  Eigen::MatrixXd within = stats.within_scatter / stats.num_utts;
  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(dim, dim);
  for (const SpeakerStats &s : stats.speakers)
    between += s.mean * s.mean.transpose();
  between /= num_speakers;

  std::vector<double> objective;
  objective.reserve(iters);

  for (int iter = 0; iter < iters; iter++) {
    Eigen::LLT<Eigen::MatrixXd> between_llt = FactorizeSpd(between, "B");
    Eigen::LLT<Eigen::MatrixXd> within_llt = FactorizeSpd(within, "W");
    Eigen::MatrixXd between_inv =
        between_llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    Eigen::MatrixXd within_inv =
        within_llt.solve(Eigen::MatrixXd::Identity(dim, dim));

    // Posterior of the speaker variable given n utterances has precision
    // B^-1 + n W^-1; factorizations are shared across equal counts.
    std::map<double, Eigen::LLT<Eigen::MatrixXd>> posterior_by_count;
    auto posterior = [&](double n) -> const Eigen::LLT<Eigen::MatrixXd> & {
      auto it = posterior_by_count.find(n);
      if (it == posterior_by_count.end()) {
        Eigen::MatrixXd precision = between_inv + n * within_inv;
        it = posterior_by_count
                 .emplace(n, FactorizeSpd(precision, "posterior precision"))
                 .first;
      }
      return it->second;
    };

    Eigen::MatrixXd new_between = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd new_within = stats.within_scatter;
    for (const SpeakerStats &s : stats.speakers) {
      const Eigen::LLT<Eigen::MatrixXd> &post = posterior(s.count);
      Eigen::MatrixXd post_cov =
          post.solve(Eigen::MatrixXd::Identity(dim, dim));
      Eigen::VectorXd post_mean =
          post.solve(within_inv * (s.count * s.mean));
      Eigen::VectorXd residual = s.mean - post_mean;
      new_between += post_cov + post_mean * post_mean.transpose();
      new_within +=
          s.count * (residual * residual.transpose() + post_cov);
    }
    new_between /= num_speakers;
    new_within /= stats.num_utts;
    // Keep both bitwise symmetric against drift from the solves.
    between = 0.5 * (new_between + new_between.transpose());
    within = 0.5 * (new_within + new_within.transpose());

    objective.push_back(MarginalLogLikelihood(stats, between, within));
  }

  // A within covariance flattened to zero by degenerate data would fail
  // model validation; give it the same floor the factorizations use.
  if (!(MinEigenvalue(within) > 0.0)) {
    double reg =
        kRegularizerScale * within.trace() / static_cast<double>(dim);
    if (reg <= 0.0) reg = kRegularizerScale;
    within += reg * Eigen::MatrixXd::Identity(dim, dim);
  }
  if (MinEigenvalue(between) < 0.0) {
    double reg =
        kRegularizerScale * std::max(between.trace(), 1.0) /
        static_cast<double>(dim);
    between += reg * Eigen::MatrixXd::Identity(dim, dim);
  }

  return {PldaModel(stats.mu, std::move(between), std::move(within)),
          std::move(objective)};
}

PldaScorer::PldaScorer(const PldaModel &model) : mu_(model.Mu()) {
  Eigen::MatrixXd total = model.Between() + model.Within();
  Eigen::MatrixXd same_sum = model.Within() + 2.0 * model.Between();
  total_ = FactorizeSpd(total, "B + W");
  same_sum_ = FactorizeSpd(same_sum, "W + 2B");
  within_ = FactorizeSpd(model.Within(), "W");
  logdet_total_ = LogDet(total_);
  logdet_same_sum_ = LogDet(same_sum_);
  logdet_within_ = LogDet(within_);
}

double PldaScorer::Score(const Eigen::VectorXd &enroll,
                         const Eigen::VectorXd &test) const {
  if (enroll.size() != mu_.size() || test.size() != mu_.size())
    throw DimensionMismatch("trial vector size does not match PLDA dim");
  Eigen::VectorXd u = enroll - mu_;
  Eigen::VectorXd v = test - mu_;

  // log N([e;t] | same) - log N([e;t] | different).  The same-speaker
  // 2d x 2d covariance [[B+W, B], [B, B+W]] block-diagonalizes over the sum
  // and difference of the two sides into (W + 2B) and W.
  Eigen::VectorXd sum = u + v;
  Eigen::VectorXd diff = u - v;
  double quad_diff = u.dot(total_.solve(u)) + v.dot(total_.solve(v));
  double quad_same = 0.5 * sum.dot(same_sum_.solve(sum)) +
                     0.5 * diff.dot(within_.solve(diff));
  return 0.5 * (2.0 * logdet_total_ - logdet_same_sum_ - logdet_within_) +
         0.5 * (quad_diff - quad_same);
}

double PldaScore(const PldaModel &model, const Eigen::VectorXd &enroll,
                 const Eigen::VectorXd &test) {
  return PldaScorer(model).Score(enroll, test);
}

PldaModel PldaAdapt(const PldaModel &model, const EmbeddingSet &adaptation,
                    double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw FormatError("alpha must lie in [0, 1], got " +
                      FormatFloat17(alpha));
  if (adaptation.Dim() != model.Dim())
    throw DimensionMismatch("adaptation dim " +
                            std::to_string(adaptation.Dim()) +
                            " does not match model dim " +
                            std::to_string(model.Dim()));
  if (adaptation.Size() < 2)
    throw InsufficientData("adaptation set needs at least two utterances");

  int dim = model.Dim();
  double n = static_cast<double>(adaptation.Size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const Embedding &e : adaptation.Items()) mean += e.vector;
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const Embedding &e : adaptation.Items()) {
    Eigen::VectorXd r = e.vector - mean;
    cov += r * r.transpose();
  }
  cov /= n;

  // The adaptation data is unlabeled, so its total covariance is split in
  // the same between/within proportion the original model exhibits.
  double ratio =
      model.Between().trace() /
      (model.Between().trace() + model.Within().trace());
  Eigen::MatrixXd adapted_between = ratio * cov;
  Eigen::MatrixXd adapted_within = (1.0 - ratio) * cov;

  double keep = 1.0 - alpha;
  return PldaModel(keep * model.Mu() + alpha * mean,
                   keep * model.Between() + alpha * adapted_between,
                   keep * model.Within() + alpha * adapted_within);
}

void SavePlda(const PldaModel &model, std::ostream &out) {
  int dim = model.Dim();
  out << "# plda v1\n";
  out << "dim " << dim << "\n";
  out << "mu";
  for (int i = 0; i < dim; i++) out << ' ' << FormatFloat17(model.Mu()[i]);
  out << "\n";
  auto write_matrix = [&](const char *tag, const Eigen::MatrixXd &m) {
    for (int r = 0; r < dim; r++) {
      out << tag;
      for (int c = 0; c < dim; c++) out << ' ' << FormatFloat17(m(r, c));
      out << "\n";
    }
  };
  write_matrix("B", model.Between());
  write_matrix("W", model.Within());
}

void SavePldaFile(const PldaModel &model, const std::string &path) {
  AtomicWriteFile(path, [&](std::ostream &out) { SavePlda(model, out); });
}

namespace {

std::vector<std::string> NextPldaFields(std::istream &in,
                                        const std::string &name) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    if (!fields.empty()) return fields;
  }
  throw FormatError(name + ": unexpected end of PLDA file");
}

}  // namespace

PldaModel LoadPlda(std::istream &in, const std::string &name) {
  std::vector<std::string> f = NextPldaFields(in, name);
  if (f.size() != 3 || f[0] != "#" || f[1] != "plda" || f[2] != "v1")
    throw FormatError(name + ": bad PLDA header");
  f = NextPldaFields(in, name);
  if (f.size() != 2 || f[0] != "dim")
    throw FormatError(name + ": expected 'dim <d>'");
  long dim = std::strtol(f[1].c_str(), nullptr, 10);
  if (dim < 1) throw FormatError(name + ": bad dim '" + f[1] + "'");

  auto read_vector = [&](const char *tag) {
    std::vector<std::string> fields = NextPldaFields(in, name);
    if (fields.size() != static_cast<size_t>(dim) + 1 || fields[0] != tag)
      throw FormatError(name + ": bad '" + std::string(tag) + "' line");
    Eigen::VectorXd v(dim);
    for (long i = 0; i < dim; i++)
      v[i] = ParseFloat(fields[i + 1], name + " " + tag);
    return v;
  };

  Eigen::VectorXd mu = read_vector("mu");
  Eigen::MatrixXd between(dim, dim), within(dim, dim);
  for (long r = 0; r < dim; r++) between.row(r) = read_vector("B");
  for (long r = 0; r < dim; r++) within.row(r) = read_vector("W");
  return PldaModel(std::move(mu), std::move(between), std::move(within));
}

PldaModel LoadPldaFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  return LoadPlda(in, path);
}

}  // namespace svrbench
