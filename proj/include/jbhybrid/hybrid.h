// include/jbhybrid/hybrid.h

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

#ifndef JBHYBRID_HYBRID_H_
#define JBHYBRID_HYBRID_H_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "jbhybrid/corpus.h"
#include "jbhybrid/jb.h"
#include "jbhybrid/linalg.h"
#include "jbhybrid/transform.h"

namespace jbhybrid {

enum class Variant { kTwoBranch, kMahalanobis };

/// Siamese verification network.
///
/// Both branches share  h = W^T (x - mean),  t = h / ||h||.
///
/// kTwoBranch:    r = 2 (P_G^T t_i)^T (P_G^T t_j) - ||P_A^T t_i||^2
///                    - ||P_A^T t_j||^2,     f = sigmoid(alpha r + beta)
/// kMahalanobis:  dist = ||P^T (t_i - t_j)||^2,
///                f = sigmoid(lambda (d0 - dist))
///
/// `mean` is a frozen centering offset; everything else is trainable.
struct SiameseModel {
  Variant variant = Variant::kTwoBranch;
  Vector mean;
  Matrix w;   // l x d
  Matrix pa;  // d x d, kTwoBranch
  Matrix pg;  // d x d, kTwoBranch
  Matrix p;   // d x d, kMahalanobis
  double alpha = 1.0;
  double beta = 0.0;
  double d0 = 0.0;
  double lambda = 1.0;

  int InputDim() const { return static_cast<int>(w.rows()); }
  int Dim() const { return static_cast<int>(w.cols()); }
};

/// Mutable view of one trainable tensor, flattened.
struct ParamView {
  std::string name;
  std::span<double> values;
};

// Trainable tensors of the model's variant in a fixed order:
// kTwoBranch: W, P_A, P_G, alpha, beta;  kMahalanobis: W, P, d0, lambda.
std::vector<ParamView> Params(SiameseModel &model);

// A zero-valued model with the same variant and shapes (gradient holder).
SiameseModel ZerosLike(const SiameseModel &model);

enum class LossKind { kBce, kWbce, kDem };

struct LossConfig {
  LossKind kind = LossKind::kDem;
  double p_tar = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
  double w_s = 0.01;
};

struct TrainConfig {
  double lr = 0.0005;
  int batch_size = 4096;
  int epochs = 20;
  double pos_fraction = 0.1;
  double split = 0.9;  // fraction of speakers used for training
  std::uint64_t seed = 0;
  std::set<std::string> freeze;
  int val_trials = 4096;
};

enum class RestrictMode { kAOnly, kGOnly, kGFromA, kAFromG };

SiameseModel InitFromGenerative(const LdaTransform &lda, const JbModel &jb,
                                Variant variant = Variant::kTwoBranch);
// He-normal initialization: each weight ~ N(0, 2 / fan_in).
SiameseModel InitRandom(int l, int d, std::uint64_t seed,
                        Variant variant = Variant::kTwoBranch);
// Replaces W and mean with an LDA transform and keeps the rest.
SiameseModel WithLdaNet(const SiameseModel &model, const LdaTransform &lda);

struct PairOutput {
  double r;  // LLR (kTwoBranch) or Mahalanobis distance (kMahalanobis)
  double f;  // calibrated same-speaker probability
};

PairOutput Forward(const SiameseModel &model, const Vector &xi, const Vector &xj);
PairOutput ForwardMd(const SiameseModel &model, const Vector &xi, const Vector &xj);

/// A batch of raw embedding pairs.  Row k of `xi`/`xj` forms trial k;
/// labels are 1 for SAME, 0 for DIFFERENT.
struct PairBatch {
  Matrix xi;
  Matrix xj;
  std::vector<int> labels;

  int Size() const { return static_cast<int>(labels.size()); }
};

struct BatchOutput {
  Vector r;   // per-trial LLR or distance
  Vector s;   // logit fed to the sigmoid
  Vector f;   // sigmoid(s)
  Vector fc;  // 1 - f, computed as sigmoid(-s)
};

BatchOutput ForwardBatch(const SiameseModel &model, const PairBatch &batch);

// Loss over a batch of calibrated probabilities.
//   BCE  = -sum [y log f + (1-y) log(1-f)]
//   WBCE = w_s L_S + (1 - w_s) L_D,  L_S = -mean_tar log f,
//          L_D = -mean_non log(1 - f)
//   DEM  = p_tar c_miss mean_tar(1 - f) + (1 - p_tar) c_fa mean_non(f)
// Log arguments are clamped at 1e-12.
double Loss(std::span<const double> f, std::span<const int> labels,
            const LossConfig &cfg);

// Loss of the model on a batch plus the exact gradient of every trainable
// tensor (frozen names get zeros).
double LossAndGrad(const SiameseModel &model, const PairBatch &batch,
                   const LossConfig &cfg, const std::set<std::string> &freeze,
                   SiameseModel *grad);
SiameseModel Grad(const SiameseModel &model, const PairBatch &batch,
                  const LossConfig &cfg, const std::set<std::string> &freeze = {});

/// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8 and bias correction.
struct AdamState {
  long step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

void AdamUpdate(std::span<double> params, std::span<const double> grads,
                std::vector<double> &m, std::vector<double> &v, long step,
                double lr);
void AdamStep(SiameseModel *model, const SiameseModel &grad, AdamState *state,
              double lr);

struct PairIndex {
  int i;
  int j;
  int label;  // 1 SAME, 0 DIFFERENT
};

// ceil(pos_fraction * batch_size) SAME pairs of distinct utterances (clamped
// to leave at least one of each label), the rest DIFFERENT-speaker pairs;
// both drawn uniformly over valid pairs.
std::vector<PairIndex> SampleMinibatch(const EmbeddingSet &set, int batch_size,
                                       double pos_fraction, std::mt19937_64 &rng);
PairBatch MakeBatch(const EmbeddingSet &set, const std::vector<PairIndex> &pairs);
TrialList MakeTrialList(const EmbeddingSet &set, const std::vector<PairIndex> &pairs);

struct EpochRecord {
  int epoch;
  double train_loss;
  double val_loss;
};

struct TrainResult {
  SiameseModel model;  // snapshot with the lowest validation loss
  std::vector<EpochRecord> history;
  double initial_val_loss = 0.0;
  int best_epoch = 0;  // 0 = initial model
};

TrainResult Train(const SiameseModel &init, const EmbeddingSet &set,
                  const TrainConfig &train_cfg, const LossConfig &loss_cfg);

SiameseModel Restrict(const SiameseModel &model, RestrictMode mode);

// Verification score per trial: r for kTwoBranch, -dist for kMahalanobis
// (higher means more likely the same speaker).
std::vector<double> ScoreTrials(const SiameseModel &model, const EmbeddingSet &set,
                                const TrialList &trials);
// LDA -> length norm -> JB closed-form LLR.
std::vector<double> ScoreTrialsGenerative(const LdaTransform &lda,
                                          const JbModel &jb,
                                          const EmbeddingSet &set,
                                          const TrialList &trials);

void WriteSiamese(const SiameseModel &model, std::ostream &os);
SiameseModel ReadSiamese(std::istream &is);
void SaveSiamese(const SiameseModel &model, const std::string &path);
SiameseModel LoadSiamese(const std::string &path);
void WriteHistoryCsv(const std::vector<EpochRecord> &history, std::ostream &os);

const char *VariantName(Variant v);
const char *LossName(LossKind k);
const char *RestrictModeName(RestrictMode m);

}  // namespace jbhybrid

#endif  // JBHYBRID_HYBRID_H_
