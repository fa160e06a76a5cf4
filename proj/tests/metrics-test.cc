// tests/metrics-test.cc

// Copyright 2026  jbhybrid contributors
//
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "jbhybrid/error.h"
#include "jbhybrid/metrics.h"
#include "metrics-oracle.h"

using namespace jbhybrid;
using namespace jbhybrid::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorKind KindOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::kUsage;
}

LabeledScores Map(const LabeledScores &s, const std::function<double(double)> &g) {
  LabeledScores out;
  for (double x : s.target) out.target.push_back(g(x));
  for (double x : s.nontarget) out.nontarget.push_back(g(x));
  return out;
}

}  // namespace

TEST_CASE("EER examples") {
  CHECK(ComputeEer(LabeledScores{{2, 3}, {0, 1}}).eer == 0.0);
  CHECK(ComputeEer(LabeledScores{{1, 3}, {0, 2}}).eer == 0.5);
  CHECK(KindOf([] { ComputeEer(LabeledScores{{1, 2}, {}}); }) == ErrorKind::kDegenerateLabels);
  CHECK(KindOf([] { ComputeEer(LabeledScores{{}, {1}}); }) == ErrorKind::kDegenerateLabels);
}

TEST_CASE("minDCF examples") {
  DcfResult sep = ComputeMinDcf(LabeledScores{{2, 3}, {0, 1}}, 0.01);
  CHECK(sep.raw == 0.0);
  CHECK(sep.normalized == 0.0);
  DcfResult r = ComputeMinDcf(LabeledScores{{1, 3}, {0, 2}}, 0.5);
  CHECK(r.raw == 0.25);
  CHECK(r.normalized == 0.5);
  // Ties go to the smallest threshold achieving the minimum.
  CHECK(r.threshold == 0.5);
  DcfResult n = ComputeMinDcf(LabeledScores{{0}, {1}}, 0.01);
  CHECK(n.raw == doctest::Approx(0.01));
  CHECK(n.normalized == doctest::Approx(1.0));
  CHECK(KindOf([] { ComputeMinDcf(LabeledScores{{1}, {0}}, 0.01, 0, 0); }) ==
        ErrorKind::kInvalidCost);
  CHECK(KindOf([] { ComputeMinDcf(LabeledScores{{1}, {0}}, 1.5); }) == ErrorKind::kInvalidCost);
}

TEST_CASE("EER and minDCF equal a brute-force sweep exactly") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; k++) {
    LabeledScores s = RandomScores(rng, 200);
    CHECK(ComputeEer(s).eer == BruteEer(s));
    for (double p : {0.5, 0.01, 0.001}) {
      DcfResult r = ComputeMinDcf(s, p);
      CHECK(r.raw == BruteMinDcf(s, p));
      CHECK(r.raw <= std::min(p, 1 - p));
      CHECK(r.normalized <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("calibration invariance and label symmetry") {
  std::mt19937_64 rng(2);
  auto sigmoid = [](double x) { return 1 / (1 + std::exp(-x)); };
  for (int k = 0; k < 50; k++) {
    LabeledScores s = RandomScores(rng, 200);
    double eer = ComputeEer(s).eer;
    for (const auto &g : std::vector<std::function<double(double)>>{
             [](double x) { return 2 * x + 3; }, sigmoid}) {
      LabeledScores m = Map(s, g);
      CHECK(ComputeEer(m).eer == eer);
      CHECK(ComputeMinDcf(m, 0.01).raw == ComputeMinDcf(s, 0.01).raw);
      CHECK(ComputeMinDcf(m, 0.001).raw == ComputeMinDcf(s, 0.001).raw);
    }
    LabeledScores swapped;
    for (double x : s.nontarget) swapped.target.push_back(-x);
    for (double x : s.target) swapped.nontarget.push_back(-x);
    CHECK(ComputeEer(swapped).eer == doctest::Approx(eer).epsilon(1e-12));
  }
}

TEST_CASE("DET curve shape") {
  auto det = DetCurve(LabeledScores{{1}, {0}});
  REQUIRE(det.size() == 3);
  CHECK(det.front().p_fa == 1.0);
  CHECK(det.front().p_miss == 0.0);
  CHECK(det.back().p_fa == 0.0);
  CHECK(det.back().p_miss == 1.0);
  CHECK(det[1].threshold == 0.5);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  LabeledScores big;
  for (int k = 0; k < 10000; k++) (k % 10 ? big.nontarget : big.target).push_back(normal(rng) + (k % 10 ? 0 : 1.5));
  det = DetCurve(big);
  for (size_t k = 1; k < det.size(); k++) {
    CHECK(det[k].threshold > det[k - 1].threshold);
    CHECK(det[k].p_fa <= det[k - 1].p_fa);
    CHECK(det[k].p_miss >= det[k - 1].p_miss);
  }
  // The EER point lies on the piecewise-linear curve, on the diagonal.
  EerResult e = ComputeEer(big);
  bool on_curve = false;
  for (size_t k = 1; k < det.size(); k++) {
    const auto &a = det[k - 1], &b = det[k];
    double lo = std::min(a.p_miss, b.p_miss), hi = std::max(a.p_miss, b.p_miss);
    if (e.eer < lo - 1e-12 || e.eer > hi + 1e-12) continue;
    // Distance from (eer, eer) to segment a-b along the segment's normal.
    double dx = b.p_fa - a.p_fa, dy = b.p_miss - a.p_miss;
    double cross = dx * (e.eer - a.p_miss) - dy * (e.eer - a.p_fa);
    if (std::abs(cross) <= 1e-12 * std::max(1.0, std::hypot(dx, dy))) on_curve = true;
  }
  CHECK(on_curve);
}

TEST_CASE("score histograms") {
  LabeledScores flat{{2, 2}, {2}};
  ScoreHistogram h = ScoreHistograms(flat, 5);
  int occupied_same = 0, occupied_diff = 0;
  for (int b = 0; b < 5; b++) {
    occupied_same += h.same[b] > 0;
    occupied_diff += h.different[b] > 0;
  }
  CHECK(occupied_same == 1);
  CHECK(occupied_diff == 1);

  std::mt19937_64 rng(4);
  LabeledScores s = RandomScores(rng, 200);
  s.target.push_back(-4.0);  // exact edges: min and max
  s.nontarget.push_back(4.0);
  ScoreHistogram a = ScoreHistograms(s, 16);
  long ts = 0, td = 0;
  for (int b = 0; b < 16; b++) {
    ts += a.same[b];
    td += a.different[b];
  }
  CHECK(ts == static_cast<long>(s.target.size()));
  CHECK(td == static_cast<long>(s.nontarget.size()));
  ScoreHistogram shifted = ScoreHistograms(Map(s, [](double x) { return x + 8.0; }), 16);
  CHECK(shifted.same == a.same);
  CHECK(shifted.different == a.different);
  for (int b = 0; b <= 16; b++) CHECK(shifted.edges[b] == doctest::Approx(a.edges[b] + 8.0));
  CHECK(KindOf([&] { ScoreHistograms(s, 0); }) == ErrorKind::kConfig);
}

TEST_CASE("report formats") {
  ScoreSet scores;
  scores.trials = {{"a", "b", TrialLabel::kSame}, {"a", "c", TrialLabel::kDifferent}};
  scores.scores = {1.0, 0.0};
  EvalReport r = Evaluate(scores, {{0.01}, {0.001}});
  CHECK(FormatSummary(r) == "EER=0% minDCF(0.01)=0 minDCF(0.001)=0");
  std::ostringstream det;
  WriteDetCsv(r.det, det);
  CHECK(det.str() == "p_fa,p_miss,threshold\n1,0,-inf\n0,0,0.5\n0,1,inf\n");
  std::ostringstream hist;
  WriteHistogramCsv(ScoreHistograms(scores, 2), hist);
  CHECK(hist.str() == "bin_lo,bin_hi,count_same,count_diff\n0,0.5,0,1\n0.5,1,1,0\n");
  scores.trials[1].label.reset();
  CHECK(KindOf([&] { Evaluate(scores, {}); }) == ErrorKind::kDegenerateLabels);
}
