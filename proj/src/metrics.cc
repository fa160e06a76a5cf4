// src/metrics.cc

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

#include "jbhybrid/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "jbhybrid/error.h"

namespace jbhybrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckBothClasses(const LabeledScores &scores) {
  if (scores.target.empty() || scores.nontarget.empty())
    throw Error(ErrorKind::kDegenerateLabels,
                "need at least one target and one nontarget trial (got " +
                    std::to_string(scores.target.size()) + " / " +
                    std::to_string(scores.nontarget.size()) + ")");
}

}  // namespace

LabeledScores SplitByLabel(const ScoreSet &scores) {
  if (scores.trials.size() != scores.scores.size())
    throw Error(ErrorKind::kShape, "score set has mismatched trial/score counts");
  LabeledScores out;
  for (size_t k = 0; k < scores.scores.size(); k++) {
    const auto &label = scores.trials[k].label;
    if (!label)
      throw Error(ErrorKind::kDegenerateLabels,
                  "trial " + std::to_string(k) + " has no label");
    (*label == TrialLabel::kSame ? out.target : out.nontarget)
        .push_back(scores.scores[k]);
  }
  CheckBothClasses(out);
  return out;
}

std::vector<DetPoint> DetCurve(const LabeledScores &scores) {
  CheckBothClasses(scores);
  // (score, is_target) sorted by score.
  std::vector<std::pair<double, bool>> all;
  all.reserve(scores.target.size() + scores.nontarget.size());
  for (double s : scores.target) all.emplace_back(s, true);
  for (double s : scores.nontarget) all.emplace_back(s, false);
  std::sort(all.begin(), all.end());

  const double n_tar = static_cast<double>(scores.target.size());
  const double n_non = static_cast<double>(scores.nontarget.size());
  std::vector<DetPoint> det;
  det.push_back({1.0, 0.0, -kInf});
  long misses = 0, false_alarms = static_cast<long>(scores.nontarget.size());
  size_t k = 0;
  while (k < all.size()) {
    double value = all[k].first;
    // Everything equal to `value` falls below the next threshold.
    while (k < all.size() && all[k].first == value) {
      if (all[k].second)
        misses++;
      else
        false_alarms--;
      k++;
    }
    double threshold = k < all.size() ? 0.5 * value + 0.5 * all[k].first : kInf;
    det.push_back({false_alarms / n_non, misses / n_tar, threshold});
  }
  return det;
}

std::vector<DetPoint> DetCurve(const ScoreSet &scores) {
  return DetCurve(SplitByLabel(scores));
}

EerResult ComputeEer(const LabeledScores &scores) {
  auto det = DetCurve(scores);
  for (size_t k = 0; k < det.size(); k++) {
    double diff = det[k].p_miss - det[k].p_fa;
    if (diff < 0) continue;
    if (diff == 0 || k == 0) return {det[k].p_miss, det[k].threshold};
    const DetPoint &lo = det[k - 1], &hi = det[k];
    double diff_lo = lo.p_miss - lo.p_fa;
    double t = -diff_lo / (diff - diff_lo);
    double eer = lo.p_miss + t * (hi.p_miss - lo.p_miss);
    double threshold;
    if (std::isinf(lo.threshold))
      threshold = hi.threshold;
    else if (std::isinf(hi.threshold))
      threshold = lo.threshold;
    else
      threshold = lo.threshold + t * (hi.threshold - lo.threshold);
    return {eer, threshold};
  }
  // Unreachable: the last point always has P_miss = 1, P_fa = 0.
  return {det.back().p_miss, det.back().threshold};
}

EerResult ComputeEer(const ScoreSet &scores) {
  return ComputeEer(SplitByLabel(scores));
}

DcfResult ComputeMinDcf(const LabeledScores &scores, double p_tar,
                        double c_miss, double c_fa) {
  if (!(p_tar > 0 && p_tar < 1))
    throw Error(ErrorKind::kInvalidCost, "p_tar must lie in (0, 1)");
  if (c_miss < 0 || c_fa < 0 || !(c_miss + c_fa > 0))
    throw Error(ErrorKind::kInvalidCost, "costs must be >= 0 and not both zero");
  auto det = DetCurve(scores);
  DcfResult best{kInf, kInf, 0.0};
  for (const auto &pt : det) {
    double cost = p_tar * c_miss * pt.p_miss + (1 - p_tar) * c_fa * pt.p_fa;
    if (cost < best.raw) best = {cost, 0.0, pt.threshold};
  }
  double divisor = std::min(p_tar * c_miss, (1 - p_tar) * c_fa);
  best.normalized = divisor > 0 ? best.raw / divisor : 0.0;
  return best;
}

DcfResult ComputeMinDcf(const ScoreSet &scores, double p_tar, double c_miss,
                        double c_fa) {
  return ComputeMinDcf(SplitByLabel(scores), p_tar, c_miss, c_fa);
}

ScoreHistogram ScoreHistograms(const LabeledScores &scores, int n_bins) {
  if (n_bins < 1) throw Error(ErrorKind::kConfig, "n_bins must be >= 1");
  CheckBothClasses(scores);
  double lo = kInf, hi = -kInf;
  for (const auto *v : {&scores.target, &scores.nontarget})
    for (double s : *v) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  if (hi == lo) hi = lo + 1e-9;
  double width = (hi - lo) / n_bins;
  ScoreHistogram h;
  h.edges.resize(n_bins + 1);
  for (int b = 0; b < n_bins; b++) h.edges[b] = lo + b * width;
  h.edges[n_bins] = hi;
  h.same.assign(n_bins, 0);
  h.different.assign(n_bins, 0);
  auto bin_of = [&](double s) {
    int b = static_cast<int>(std::floor((s - lo) / width));
    return std::clamp(b, 0, n_bins - 1);
  };
  for (double s : scores.target) h.same[bin_of(s)]++;
  for (double s : scores.nontarget) h.different[bin_of(s)]++;
  return h;
}

ScoreHistogram ScoreHistograms(const ScoreSet &scores, int n_bins) {
  return ScoreHistograms(SplitByLabel(scores), n_bins);
}

EvalReport Evaluate(const LabeledScores &scores,
                    const std::vector<DcfSetting> &dcf) {
  EvalReport report;
  report.eer = ComputeEer(scores);
  for (const auto &setting : dcf)
    report.min_dcf.push_back(
        {setting, ComputeMinDcf(scores, setting.p_tar, setting.c_miss, setting.c_fa)});
  report.det = DetCurve(scores);
  return report;
}

EvalReport Evaluate(const ScoreSet &scores, const std::vector<DcfSetting> &dcf) {
  return Evaluate(SplitByLabel(scores), dcf);
}

std::string FormatSummary(const EvalReport &report) {
  std::ostringstream os;
  os << "EER=" << FormatDouble(100.0 * report.eer.eer) << '%';
  for (const auto &entry : report.min_dcf) {
    os << " minDCF(" << entry.setting.p_tar;
    if (entry.setting.c_miss != 1.0 || entry.setting.c_fa != 1.0)
      os << ',' << entry.setting.c_miss << ',' << entry.setting.c_fa;
    os << ")=" << FormatDouble(entry.result.normalized);
  }
  return os.str();
}

void WriteDetCsv(const std::vector<DetPoint> &det, std::ostream &os) {
  os << "p_fa,p_miss,threshold\n";
  for (const auto &pt : det)
    os << FormatDouble(pt.p_fa) << ',' << FormatDouble(pt.p_miss) << ','
       << FormatDouble(pt.threshold) << '\n';
}

void WriteHistogramCsv(const ScoreHistogram &hist, std::ostream &os) {
  os << "bin_lo,bin_hi,count_same,count_diff\n";
  for (size_t b = 0; b < hist.same.size(); b++)
    os << FormatDouble(hist.edges[b]) << ',' << FormatDouble(hist.edges[b + 1])
       << ',' << hist.same[b] << ',' << hist.different[b] << '\n';
}

}  // namespace jbhybrid
