// src/metrics.cc

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

#include "svrbench/metrics.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "svrbench/io.h"

namespace svrbench {

namespace {

struct SplitScores {
  std::vector<double> targets;     // sorted ascending
  std::vector<double> nontargets;  // sorted ascending
};

SplitScores SplitByLabel(const ScoreSet &scores) {
  SplitScores split;
  for (const ScoreEntry &e : scores.Entries()) {
    if (!e.label.has_value())
      throw MissingLabels("unlabeled trial (" + e.enroll_utt + ", " +
                          e.test_utt + ")");
    if (*e.label == TrialLabel::kTarget)
      split.targets.push_back(e.score);
    else
      split.nontargets.push_back(e.score);
  }
  if (split.targets.empty()) throw EmptyClass("no target trials");
  if (split.nontargets.empty()) throw EmptyClass("no nontarget trials");
  std::sort(split.targets.begin(), split.targets.end());
  std::sort(split.nontargets.begin(), split.nontargets.end());
  return split;
}

std::vector<double> CandidateThresholds(const SplitScores &split) {
  std::vector<double> all;
  all.reserve(split.targets.size() + split.nontargets.size());
  all.insert(all.end(), split.targets.begin(), split.targets.end());
  all.insert(all.end(), split.nontargets.begin(), split.nontargets.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> thresholds;
  thresholds.reserve(all.size() + 1);
  thresholds.push_back(all.front() - 1.0);
  for (size_t i = 0; i + 1 < all.size(); i++)
    thresholds.push_back(0.5 * (all[i] + all[i + 1]));
  thresholds.push_back(all.back() + 1.0);
  return thresholds;
}

OperatingPoint RatesAt(const SplitScores &split, double threshold) {
  // scores below the threshold are rejected
  auto below = [](const std::vector<double> &v, double t) {
    return static_cast<size_t>(
        std::lower_bound(v.begin(), v.end(), t) - v.begin());
  };
  OperatingPoint p;
  p.threshold = threshold;
  p.p_fn = static_cast<double>(below(split.targets, threshold)) /
           static_cast<double>(split.targets.size());
  p.p_fp = static_cast<double>(split.nontargets.size() -
                               below(split.nontargets, threshold)) /
           static_cast<double>(split.nontargets.size());
  return p;
}

std::vector<OperatingPoint> SweepPoints(const SplitScores &split) {
  std::vector<OperatingPoint> points;
  for (double t : CandidateThresholds(split))
    points.push_back(RatesAt(split, t));
  return points;
}

double EerFromPoints(const std::vector<OperatingPoint> &points) {
  // p_fn - p_fp runs from -1 (accept everything) to +1 (reject everything),
  // so a crossing always exists.
  for (const OperatingPoint &p : points)
    if (p.p_fn == p.p_fp) return p.p_fn;
  for (size_t i = 0; i + 1 < points.size(); i++) {
    double d0 = points[i].p_fn - points[i].p_fp;
    double d1 = points[i + 1].p_fn - points[i + 1].p_fp;
    if (d0 < 0.0 && d1 > 0.0) {
      double t = -d0 / (d1 - d0);
      return points[i].p_fn + t * (points[i + 1].p_fn - points[i].p_fn);
    }
  }
  // Unreachable for a sweep that includes the extreme thresholds.
  throw NumericalDivergence("no EER crossing found");
}

MinDcfResult MinDcfFromPoints(const std::vector<OperatingPoint> &points,
                              const std::vector<double> &betas) {
  MinDcfResult result;
  if (betas.empty()) throw EmptyClass("min_dcf needs at least one beta");
  double sum = 0.0;
  for (double beta : betas) {
    if (!(beta > 0.0))
      throw NumericalDivergence("beta must be positive, got " +
                                FormatFloat17(beta));
    double best = points.front().p_fn + beta * points.front().p_fp;
    for (const OperatingPoint &p : points)
      best = std::min(best, p.p_fn + beta * p.p_fp);
    result.per_beta[beta] = best;
    sum += best;
  }
  result.avg = sum / static_cast<double>(betas.size());
  return result;
}

std::string BetaKey(double beta) {
  // Integral betas (the usual case) print without a decimal point.
  if (beta == std::floor(beta) && std::abs(beta) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", beta);
    return buf;
  }
  return FormatFloat17(beta);
}

}  // namespace

std::vector<OperatingPoint> ComputeOperatingPoints(const ScoreSet &scores) {
  return SweepPoints(SplitByLabel(scores));
}

double ComputeEer(const ScoreSet &scores) {
  return EerFromPoints(SweepPoints(SplitByLabel(scores)));
}

MinDcfResult ComputeMinDcf(const ScoreSet &scores,
                           const std::vector<double> &betas) {
  return MinDcfFromPoints(SweepPoints(SplitByLabel(scores)), betas);
}

MetricsReport Evaluate(const ScoreSet &scores) {
  SplitScores split = SplitByLabel(scores);
  MetricsReport report;
  report.det_points = SweepPoints(split);
  report.eer = EerFromPoints(report.det_points);
  MinDcfResult dcf = MinDcfFromPoints(report.det_points, kDefaultBetas);
  report.min_dcf_avg = dcf.avg;
  report.min_dcf_per_beta = dcf.per_beta;
  report.n_target = split.targets.size();
  report.n_nontarget = split.nontargets.size();
  return report;
}

ScoreSet JoinLabels(const ScoreSet &scores, const std::vector<Trial> &trials) {
  std::unordered_map<std::string, TrialLabel> labels;
  labels.reserve(trials.size());
  for (const Trial &t : trials)
    if (t.label.has_value())
      labels.emplace(t.enroll_utt + " " + t.test_utt, *t.label);
  std::vector<ScoreEntry> entries = scores.Entries();
  for (ScoreEntry &e : entries) {
    auto it = labels.find(e.enroll_utt + " " + e.test_utt);
    if (it != labels.end()) e.label = it->second;
  }
  return ScoreSet(std::move(entries));
}

void SaveReport(const MetricsReport &report, std::ostream &out) {
  out << "eer=" << FormatFloat17(report.eer) << "\n";
  out << "min_dcf_avg=" << FormatFloat17(report.min_dcf_avg) << "\n";
  for (const auto &[beta, value] : report.min_dcf_per_beta)
    out << "min_dcf_beta_" << BetaKey(beta) << "=" << FormatFloat17(value)
        << "\n";
  out << "n_target=" << report.n_target << "\n";
  out << "n_nontarget=" << report.n_nontarget << "\n";
}

void SaveReportFile(const MetricsReport &report, const std::string &path) {
  AtomicWriteFile(path, [&](std::ostream &out) { SaveReport(report, out); });
}

void SaveDetCsv(const MetricsReport &report, std::ostream &out) {
  out << "threshold,p_fn,p_fp\n";
  for (const OperatingPoint &p : report.det_points)
    out << FormatFloat17(p.threshold) << ',' << FormatFloat17(p.p_fn) << ','
        << FormatFloat17(p.p_fp) << '\n';
}

void SaveDetCsvFile(const MetricsReport &report, const std::string &path) {
  AtomicWriteFile(path, [&](std::ostream &out) { SaveDetCsv(report, out); });
}

}  // namespace svrbench
