// tests/test_metrics.cc

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

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "oracles.h"
#include "svrbench/metrics.h"
#include "svrbench/rng.h"

using namespace svrbench;

namespace {

ScoreSet MakeScores(const std::vector<double> &targets,
                    const std::vector<double> &nontargets) {
  std::vector<ScoreEntry> entries;
  int i = 0;
  for (double s : targets)
    entries.push_back({"e" + std::to_string(i++), "t", s,
                       TrialLabel::kTarget});
  for (double s : nontargets)
    entries.push_back({"e" + std::to_string(i++), "t", s,
                       TrialLabel::kNontarget});
  return ScoreSet(std::move(entries));
}

}  // namespace

TEST_CASE("operating points at the extremes and at the pinned sweep") {
  ScoreSet simple = MakeScores({1.0}, {0.0});
  std::vector<OperatingPoint> points = ComputeOperatingPoints(simple);
  REQUIRE(points.size() == 3);
  // Below the minimum everything is accepted; above the maximum everything
  // is rejected.
  CHECK(points.front().p_fn == 0.0);
  CHECK(points.front().p_fp == 1.0);
  CHECK(points.back().p_fn == 1.0);
  CHECK(points.back().p_fp == 0.0);

  ScoreSet three = MakeScores({0.9, 0.7, 0.3}, {0.8, 0.2, 0.1});
  bool saw_half = false;
  for (const OperatingPoint &p : ComputeOperatingPoints(three))
    if (p.threshold == 0.5) {
      saw_half = true;
      CHECK(p.p_fn == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
      CHECK(p.p_fp == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
  CHECK(saw_half);
}

TEST_CASE("operating point monotonicity along the sweep") {
  Rng rng(17);
  std::vector<double> targets, nontargets;
  for (int i = 0; i < 30; i++) targets.push_back(rng.Gaussian() + 1.0);
  for (int i = 0; i < 40; i++) nontargets.push_back(rng.Gaussian());
  std::vector<OperatingPoint> points =
      ComputeOperatingPoints(MakeScores(targets, nontargets));
  for (size_t i = 0; i + 1 < points.size(); i++) {
    CHECK(points[i].threshold < points[i + 1].threshold);
    CHECK(points[i].p_fn <= points[i + 1].p_fn);
    CHECK(points[i].p_fp >= points[i + 1].p_fp);
  }
}

TEST_CASE("eer on the pinned cases") {
  CHECK(ComputeEer(MakeScores({2, 3}, {0, 1})) == 0.0);
  CHECK(ComputeEer(MakeScores({0, 1}, {2, 3})) == 1.0);
  CHECK(ComputeEer(MakeScores({0.9, 0.7, 0.3}, {0.8, 0.2, 0.1})) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("min_dcf on the pinned cases") {
  MinDcfResult perfect = ComputeMinDcf(MakeScores({2, 3}, {0, 1}));
  CHECK(perfect.avg == 0.0);
  CHECK(perfect.per_beta.at(99.0) == 0.0);
  CHECK(perfect.per_beta.at(199.0) == 0.0);

  // Best threshold sits just above 0.8: two targets rejected, no false
  // accepts, so the cost is 2/3 for every beta.
  MinDcfResult three = ComputeMinDcf(MakeScores({0.9, 0.7, 0.3},
                                                {0.8, 0.2, 0.1}));
  CHECK(three.per_beta.at(99.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(three.per_beta.at(199.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(three.avg == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("eer interpolates when no candidate threshold crosses exactly") {
  // T={1}, N={0, 0.5, 2}: the sweep jumps from (p_fn, p_fp) = (0, 1/3) to
  // (1, 1/3); the interpolated crossing sits at 1/3.
  double eer = ComputeEer(MakeScores({1.0}, {0.0, 0.5, 2.0}));
  CHECK(eer == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("error reporting for missing labels and empty classes") {
  CHECK_THROWS_AS(ComputeEer(MakeScores({1.0}, {})), EmptyClass);
  CHECK_THROWS_AS(ComputeEer(MakeScores({}, {1.0})), EmptyClass);
  ScoreSet unlabeled({{"e", "t", 0.5, std::nullopt}});
  CHECK_THROWS_AS(ComputeEer(unlabeled), MissingLabels);
  CHECK_THROWS_AS(ComputeMinDcf(unlabeled), MissingLabels);
}

TEST_CASE("evaluate bundles a consistent report") {
  MetricsReport report = Evaluate(MakeScores({0.9, 0.7, 0.3},
                                             {0.8, 0.2, 0.1}));
  CHECK(report.eer == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(report.min_dcf_avg == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(report.n_target == 3);
  CHECK(report.n_nontarget == 3);
  double mean = 0.0;
  for (const auto &[beta, value] : report.min_dcf_per_beta) mean += value;
  mean /= static_cast<double>(report.min_dcf_per_beta.size());
  CHECK(report.min_dcf_avg == doctest::Approx(mean).epsilon(1e-15));

  MetricsReport trivial = Evaluate(MakeScores({2, 3}, {0, 1}));
  CHECK(trivial.eer == 0.0);
  CHECK(trivial.min_dcf_avg == 0.0);
}

TEST_CASE("oracle equivalence on random score sets with ties") {
  Rng rng(123);
  for (int round = 0; round < 300; round++) {
    int n_t = 1 + static_cast<int>(rng.UniformInt(50));
    int n_n = 1 + static_cast<int>(rng.UniformInt(50));
    std::vector<double> targets, nontargets;
    for (int i = 0; i < n_t; i++)
      targets.push_back(std::round((rng.Gaussian() + 0.8) * 4.0) / 4.0);
    for (int i = 0; i < n_n; i++)
      nontargets.push_back(std::round(rng.Gaussian() * 4.0) / 4.0);

    ScoreSet scores = MakeScores(targets, nontargets);
    testing::RefMetrics ref =
        testing::BruteForceMetrics(targets, nontargets, kDefaultBetas);
    CHECK(std::abs(ComputeEer(scores) - ref.eer) < 1e-12);
    MinDcfResult dcf = ComputeMinDcf(scores);
    CHECK(std::abs(dcf.avg - ref.min_dcf_avg) < 1e-12);
    for (const auto &[beta, value] : ref.per_beta)
      CHECK(std::abs(dcf.per_beta.at(beta) - value) < 1e-12);
  }
}

TEST_CASE("monotone transforms leave eer and min_dcf unchanged") {
  Rng rng(7);
  std::vector<double> targets, nontargets;
  for (int i = 0; i < 25; i++) targets.push_back(rng.Gaussian() + 0.7);
  for (int i = 0; i < 35; i++) nontargets.push_back(rng.Gaussian());
  ScoreSet raw = MakeScores(targets, nontargets);
  double eer = ComputeEer(raw);
  double dcf = ComputeMinDcf(raw).avg;

  auto transform = [](double s) { return std::tanh(s) * 3.0 + 1.0; };
  std::vector<double> t2, n2;
  for (double s : targets) t2.push_back(transform(s));
  for (double s : nontargets) n2.push_back(transform(s));
  ScoreSet mapped = MakeScores(t2, n2);
  CHECK(ComputeEer(mapped) == eer);
  CHECK(ComputeMinDcf(mapped).avg == dcf);
}

TEST_CASE("bounds hold on random sets") {
  Rng rng(99);
  for (int round = 0; round < 100; round++) {
    int n_t = 1 + static_cast<int>(rng.UniformInt(20));
    int n_n = 1 + static_cast<int>(rng.UniformInt(20));
    std::vector<double> targets, nontargets;
    for (int i = 0; i < n_t; i++) targets.push_back(rng.Gaussian());
    for (int i = 0; i < n_n; i++) nontargets.push_back(rng.Gaussian());
    ScoreSet scores = MakeScores(targets, nontargets);
    double eer = ComputeEer(scores);
    CHECK(eer >= 0.0);
    CHECK(eer <= 1.0);
    MinDcfResult dcf = ComputeMinDcf(scores);
    for (const auto &[beta, value] : dcf.per_beta) {
      CHECK(value >= 0.0);
      // An extreme threshold achieves min(1, beta): reject-all costs 1,
      // accept-all costs beta.
      CHECK(value <= std::min(1.0, beta) + 1e-15);
    }
  }
}

TEST_CASE("report and DET serialization") {
  MetricsReport report = Evaluate(MakeScores({0.9, 0.7, 0.3},
                                             {0.8, 0.2, 0.1}));
  std::ostringstream out;
  SaveReport(report, out);
  std::string text = out.str();
  CHECK(text.find("eer=0.333333333333333") != std::string::npos);
  CHECK(text.find("min_dcf_beta_99=") != std::string::npos);
  CHECK(text.find("min_dcf_beta_199=") != std::string::npos);
  CHECK(text.find("n_target=3\n") != std::string::npos);

  std::ostringstream det;
  SaveDetCsv(report, det);
  CHECK(det.str().rfind("threshold,p_fn,p_fp\n", 0) == 0);
}

TEST_CASE("labels join from trials onto scores") {
  ScoreSet scores({{"e1", "t1", 0.5, std::nullopt},
                   {"e2", "t2", 0.1, std::nullopt}});
  std::vector<Trial> trials = {{"e1", "t1", TrialLabel::kTarget},
                               {"e2", "t2", TrialLabel::kNontarget}};
  ScoreSet joined = JoinLabels(scores, trials);
  CHECK(joined.Entries()[0].label == TrialLabel::kTarget);
  CHECK(joined.Entries()[1].label == TrialLabel::kNontarget);
}
