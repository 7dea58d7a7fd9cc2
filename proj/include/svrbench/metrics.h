// include/svrbench/metrics.h

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

#ifndef SVRBENCH_METRICS_H_
#define SVRBENCH_METRICS_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "svrbench/types.h"

namespace svrbench {

// Detection metrics over labeled score sets.
//
// The decision rule is accept iff score >= threshold.  Candidate thresholds
// are the midpoints between consecutive distinct scores plus one value below
// the minimum and one above the maximum, which makes the sweep finite and
// exact: every achievable (p_fn, p_fp) pair appears exactly once.

struct OperatingPoint {
  double threshold = 0.0;
  double p_fn = 0.0;  // fraction of target trials rejected (score < threshold)
  double p_fp = 0.0;  // fraction of nontarget trials accepted (score >= threshold)
};

struct MinDcfResult {
  double avg = 0.0;
  std::map<double, double> per_beta;
};

struct MetricsReport {
  double eer = 0.0;
  double min_dcf_avg = 0.0;
  std::map<double, double> min_dcf_per_beta;
  size_t n_target = 0;
  size_t n_nontarget = 0;
  std::vector<OperatingPoint> det_points;
};

inline const std::vector<double> kDefaultBetas = {99.0, 199.0};

// Sweeps the candidate thresholds in increasing order; p_fn is
// non-decreasing and p_fp non-increasing along the result.
// Throws MissingLabels if any entry is unlabeled, EmptyClass if either
// class is empty.
std::vector<OperatingPoint> ComputeOperatingPoints(const ScoreSet &scores);

// Rate at the crossing of p_fn and p_fp along the sweep.  If a candidate
// threshold attains p_fn == p_fp exactly, that rate is returned; otherwise
// the crossing is found by linear interpolation between the two adjacent
// operating points where p_fn - p_fp changes sign.
double ComputeEer(const ScoreSet &scores);

// Per beta, min over the threshold sweep of p_fn + beta * p_fp; avg is the
// arithmetic mean over the betas.
MinDcfResult ComputeMinDcf(const ScoreSet &scores,
                           const std::vector<double> &betas = kDefaultBetas);

MetricsReport Evaluate(const ScoreSet &scores);

// Copies labels from the trial list onto matching (enroll, test) entries.
// Entries without a matching labeled trial stay unlabeled.
ScoreSet JoinLabels(const ScoreSet &scores, const std::vector<Trial> &trials);

// "key=value" lines: eer=, min_dcf_avg=, min_dcf_beta_<b>=, n_target=,
// n_nontarget=.  Floats carry 17 significant digits.
void SaveReport(const MetricsReport &report, std::ostream &out);
void SaveReportFile(const MetricsReport &report, const std::string &path);

// CSV "threshold,p_fn,p_fp", one row per operating point.
void SaveDetCsv(const MetricsReport &report, std::ostream &out);
void SaveDetCsvFile(const MetricsReport &report, const std::string &path);

}  // namespace svrbench

#endif  // SVRBENCH_METRICS_H_
