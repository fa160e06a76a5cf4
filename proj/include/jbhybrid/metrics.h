// include/jbhybrid/metrics.h

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

#ifndef JBHYBRID_METRICS_H_
#define JBHYBRID_METRICS_H_

#include <iosfwd>
#include <vector>

#include "jbhybrid/corpus.h"

namespace jbhybrid {

/// One operating point of the detector.  The decision is "same speaker"
/// iff score >= threshold; threshold may be -inf or +inf at the ends.
struct DetPoint {
  double p_fa;
  double p_miss;
  double threshold;
};

/// Scores split by hypothesis.  Built from a labeled ScoreSet, or directly.
struct LabeledScores {
  std::vector<double> target;     // SAME trials
  std::vector<double> nontarget;  // DIFFERENT trials
};

// Throws kDegenerateLabels when a trial is unlabeled or a class is empty.
LabeledScores SplitByLabel(const ScoreSet &scores);

// Operating points at -inf, at the midpoint of every pair of consecutive
// distinct sorted scores, and at +inf; thresholds ascending.
std::vector<DetPoint> DetCurve(const LabeledScores &scores);
std::vector<DetPoint> DetCurve(const ScoreSet &scores);

struct EerResult {
  double eer;
  double threshold;
};

// Linear interpolation of (P_miss, P_fa) between the two sweep points where
// P_miss - P_fa changes sign.
EerResult ComputeEer(const LabeledScores &scores);
EerResult ComputeEer(const ScoreSet &scores);

struct DcfResult {
  double raw;
  double normalized;  // raw / min(p_tar c_miss, (1 - p_tar) c_fa)
  double threshold;
};

DcfResult ComputeMinDcf(const LabeledScores &scores, double p_tar,
                        double c_miss = 1.0, double c_fa = 1.0);
DcfResult ComputeMinDcf(const ScoreSet &scores, double p_tar,
                        double c_miss = 1.0, double c_fa = 1.0);

struct ScoreHistogram {
  std::vector<double> edges;  // n_bins + 1 shared edges
  std::vector<long> same;
  std::vector<long> different;
};

ScoreHistogram ScoreHistograms(const LabeledScores &scores, int n_bins);
ScoreHistogram ScoreHistograms(const ScoreSet &scores, int n_bins);

struct DcfSetting {
  double p_tar;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

struct DcfEntry {
  DcfSetting setting;
  DcfResult result;
};

struct EvalReport {
  EerResult eer;
  std::vector<DcfEntry> min_dcf;
  std::vector<DetPoint> det;
};

EvalReport Evaluate(const ScoreSet &scores, const std::vector<DcfSetting> &dcf);
EvalReport Evaluate(const LabeledScores &scores,
                    const std::vector<DcfSetting> &dcf);

// "EER=<percent> minDCF(<p_tar>)=<normalized> ..." on one line.
std::string FormatSummary(const EvalReport &report);
void WriteDetCsv(const std::vector<DetPoint> &det, std::ostream &os);
void WriteHistogramCsv(const ScoreHistogram &hist, std::ostream &os);

}  // namespace jbhybrid

#endif  // JBHYBRID_METRICS_H_
