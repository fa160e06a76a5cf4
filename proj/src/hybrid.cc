// src/hybrid.cc

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

#include "jbhybrid/hybrid.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "jbhybrid/error.h"
#include "jbhybrid/log.h"

namespace jbhybrid {

namespace {

constexpr double kLogClamp = 1e-12;

double Sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  double e = std::exp(s);
  return e / (1.0 + e);
}

void CheckLossConfig(const LossConfig &cfg) {
  if (!(cfg.p_tar > 0 && cfg.p_tar < 1))
    throw Error(ErrorKind::kInvalidCost, "p_tar must lie in (0, 1)");
  if (cfg.c_miss < 0 || cfg.c_fa < 0 || !(cfg.c_miss + cfg.c_fa > 0))
    throw Error(ErrorKind::kInvalidCost, "costs must be >= 0 and not both zero");
  if (!(cfg.w_s > 0 && cfg.w_s < 1))
    throw Error(ErrorKind::kConfig, "w_s must lie in (0, 1)");
}

struct ClassCounts {
  int tar = 0;
  int non = 0;
};

ClassCounts CountLabels(std::span<const int> labels, const LossConfig &cfg) {
  ClassCounts c;
  for (int y : labels) (y == 1 ? c.tar : c.non)++;
  if (labels.empty())
    throw Error(ErrorKind::kDegenerateBatch, "empty batch");
  if (cfg.kind != LossKind::kBce && (c.tar == 0 || c.non == 0))
    throw Error(ErrorKind::kDegenerateBatch,
                std::string(LossName(cfg.kind)) +
                    " needs both SAME and DIFFERENT trials in a batch");
  return c;
}

// Loss from (f, 1 - f) pairs; when `dloss_ds` is non-null it receives the
// derivative with respect to each logit s (f = sigmoid(s)).
double LossImpl(std::span<const double> f, std::span<const double> fc,
                std::span<const int> labels, const LossConfig &cfg,
                Vector *dloss_ds) {
  CheckLossConfig(cfg);
  ClassCounts counts = CountLabels(labels, cfg);
  const size_t n = labels.size();
  if (dloss_ds != nullptr) dloss_ds->setZero(n);
  double total = 0.0;
  switch (cfg.kind) {
    case LossKind::kBce:
      for (size_t k = 0; k < n; k++) {
        if (labels[k] == 1) {
          total -= std::log(std::max(f[k], kLogClamp));
          if (dloss_ds && f[k] > kLogClamp) (*dloss_ds)(k) = -fc[k];
        } else {
          total -= std::log(std::max(fc[k], kLogClamp));
          if (dloss_ds && fc[k] > kLogClamp) (*dloss_ds)(k) = f[k];
        }
      }
      return total;
    case LossKind::kWbce: {
      double ls = 0.0, ld = 0.0;
      double ws = cfg.w_s / counts.tar, wd = (1 - cfg.w_s) / counts.non;
      for (size_t k = 0; k < n; k++) {
        if (labels[k] == 1) {
          ls -= std::log(std::max(f[k], kLogClamp));
          if (dloss_ds && f[k] > kLogClamp) (*dloss_ds)(k) = -ws * fc[k];
        } else {
          ld -= std::log(std::max(fc[k], kLogClamp));
          if (dloss_ds && fc[k] > kLogClamp) (*dloss_ds)(k) = wd * f[k];
        }
      }
      return cfg.w_s * ls / counts.tar + (1 - cfg.w_s) * ld / counts.non;
    }
    case LossKind::kDem: {
      double miss = 0.0, fa = 0.0;
      double wm = cfg.p_tar * cfg.c_miss / counts.tar;
      double wf = (1 - cfg.p_tar) * cfg.c_fa / counts.non;
      for (size_t k = 0; k < n; k++) {
        if (labels[k] == 1) {
          miss += fc[k];
          if (dloss_ds) (*dloss_ds)(k) = -wm * f[k] * fc[k];
        } else {
          fa += f[k];
          if (dloss_ds) (*dloss_ds)(k) = wf * f[k] * fc[k];
        }
      }
      return cfg.p_tar * cfg.c_miss * miss / counts.tar +
             (1 - cfg.p_tar) * cfg.c_fa * fa / counts.non;
    }
  }
  return total;
}

// Intermediate values of one side of the Siamese network.
struct BranchCache {
  Matrix centered;  // x - mean
  Matrix t;         // normalized LDA output
  Vector norms;     // ||h||
};

BranchCache RunBranch(const SiameseModel &model, const Matrix &x) {
  if (x.cols() != model.InputDim())
    throw Error(ErrorKind::kShape, "input dimension " + std::to_string(x.cols()) +
                                       " != model input " +
                                       std::to_string(model.InputDim()));
  BranchCache c;
  c.centered = x.rowwise() - model.mean.transpose();
  Matrix h = c.centered * model.w;
  c.norms = h.rowwise().norm();
  for (Eigen::Index k = 0; k < h.rows(); k++)
    if (!(c.norms(k) >= 1e-12))
      throw Error(ErrorKind::kZeroVector,
                  "LDA output of trial " + std::to_string(k) + " has zero norm");
  c.t = h.array().colwise() / c.norms.array();
  return c;
}

// Backward through t = h / ||h||, h = centered W.
void BackwardBranch(const BranchCache &c, const Matrix &dt, Matrix *dw) {
  Vector proj = (c.t.cwiseProduct(dt)).rowwise().sum();
  Matrix dh = dt - c.t.cwiseProduct(proj.replicate(1, dt.cols()));
  dh.array().colwise() /= c.norms.array();
  dw->noalias() += c.centered.transpose() * dh;
}

struct ForwardCache {
  BranchCache bi, bj;
  Matrix ai, aj, gi, gj;  // kTwoBranch
  Matrix diff, e;         // kMahalanobis
  BatchOutput out;
};

ForwardCache RunForward(const SiameseModel &model, const PairBatch &batch) {
  if (batch.xi.rows() != batch.xj.rows() ||
      batch.xi.rows() != static_cast<Eigen::Index>(batch.labels.size()))
    throw Error(ErrorKind::kShape, "batch sides and labels disagree in size");
  ForwardCache c;
  c.bi = RunBranch(model, batch.xi);
  c.bj = RunBranch(model, batch.xj);
  const Eigen::Index n = batch.xi.rows();
  BatchOutput &o = c.out;
  o.r.resize(n);
  o.s.resize(n);
  if (model.variant == Variant::kTwoBranch) {
    c.ai = c.bi.t * model.pa;
    c.aj = c.bj.t * model.pa;
    c.gi = c.bi.t * model.pg;
    c.gj = c.bj.t * model.pg;
    o.r = 2.0 * c.gi.cwiseProduct(c.gj).rowwise().sum() -
          c.ai.rowwise().squaredNorm() - c.aj.rowwise().squaredNorm();
    o.s = (model.alpha * o.r).array() + model.beta;
  } else {
    c.diff = c.bi.t - c.bj.t;
    c.e = c.diff * model.p;
    o.r = c.e.rowwise().squaredNorm();
    o.s = model.lambda * (model.d0 - o.r.array());
  }
  o.f = o.s.unaryExpr([](double s) { return Sigmoid(s); });
  o.fc = o.s.unaryExpr([](double s) { return Sigmoid(-s); });
  return c;
}

void CheckFreezeNames(const SiameseModel &model, const std::set<std::string> &freeze) {
  SiameseModel copy = ZerosLike(model);
  auto views = Params(copy);
  for (const auto &name : freeze) {
    bool known = std::any_of(views.begin(), views.end(),
                             [&](const ParamView &v) { return v.name == name; });
    if (!known)
      throw Error(ErrorKind::kConfig, "unknown parameter '" + name + "' for " +
                                          VariantName(model.variant) + " model");
  }
}

std::span<double> Flat(Matrix &m) { return {m.data(), static_cast<size_t>(m.size())}; }
std::span<double> Flat(double &v) { return {&v, 1}; }

}  // namespace

const char *VariantName(Variant v) {
  return v == Variant::kTwoBranch ? "two-branch" : "mahalanobis";
}

const char *LossName(LossKind k) {
  switch (k) {
    case LossKind::kBce: return "bce";
    case LossKind::kWbce: return "wbce";
    case LossKind::kDem: return "dem";
  }
  return "?";
}

const char *RestrictModeName(RestrictMode m) {
  switch (m) {
    case RestrictMode::kAOnly: return "a-only";
    case RestrictMode::kGOnly: return "g-only";
    case RestrictMode::kGFromA: return "g-from-a";
    case RestrictMode::kAFromG: return "a-from-g";
  }
  return "?";
}

std::vector<ParamView> Params(SiameseModel &model) {
  if (model.variant == Variant::kTwoBranch)
    return {{"W", Flat(model.w)},
            {"P_A", Flat(model.pa)},
            {"P_G", Flat(model.pg)},
            {"alpha", Flat(model.alpha)},
            {"beta", Flat(model.beta)}};
  return {{"W", Flat(model.w)},
          {"P", Flat(model.p)},
          {"d0", Flat(model.d0)},
          {"lambda", Flat(model.lambda)}};
}

SiameseModel ZerosLike(const SiameseModel &model) {
  SiameseModel z;
  z.variant = model.variant;
  z.mean = Vector::Zero(model.mean.size());
  z.w = Matrix::Zero(model.w.rows(), model.w.cols());
  z.pa = Matrix::Zero(model.pa.rows(), model.pa.cols());
  z.pg = Matrix::Zero(model.pg.rows(), model.pg.cols());
  z.p = Matrix::Zero(model.p.rows(), model.p.cols());
  z.alpha = z.beta = z.d0 = z.lambda = 0.0;
  return z;
}

SiameseModel InitFromGenerative(const LdaTransform &lda, const JbModel &jb,
                                Variant variant) {
  if (lda.OutputDim() != jb.Dim())
    throw Error(ErrorKind::kShape, "LDA output dimension " +
                                       std::to_string(lda.OutputDim()) +
                                       " != JB dimension " + std::to_string(jb.Dim()));
  if (lda.pre_normalize)
    throw Error(ErrorKind::kConfig,
                "an LDA fitted on pre-normalized inputs cannot seed the network");
  SiameseModel m;
  m.variant = variant;
  m.mean = lda.mean;
  m.w = lda.projection;
  if (variant == Variant::kTwoBranch) {
    m.pa = jb.pa;
    m.pg = jb.pg;
  } else {
    // With P = P_A, d0 = 0 and lambda = 1 the probability equals that of
    // the two-branch model restricted to G = A.
    m.p = jb.pa;
  }
  m.alpha = 1.0;
  m.beta = 0.0;
  m.d0 = 0.0;
  m.lambda = 1.0;
  return m;
}

SiameseModel InitRandom(int l, int d, std::uint64_t seed, Variant variant) {
  if (l < 1 || d < 1 || d > l)
    throw Error(ErrorKind::kShape, "need 1 <= d <= l");
  std::mt19937_64 rng(seed);
  auto he_normal = [&](int rows, int cols, int fan_in) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
    Matrix m(rows, cols);
    for (int r = 0; r < rows; r++)
      for (int c = 0; c < cols; c++) m(r, c) = normal(rng);
    return m;
  };
  SiameseModel m;
  m.variant = variant;
  m.mean = Vector::Zero(l);
  m.w = he_normal(l, d, l);
  if (variant == Variant::kTwoBranch) {
    m.pa = he_normal(d, d, d);
    m.pg = he_normal(d, d, d);
  } else {
    m.p = he_normal(d, d, d);
  }
  return m;
}

SiameseModel WithLdaNet(const SiameseModel &model, const LdaTransform &lda) {
  if (lda.OutputDim() != model.Dim() || lda.InputDim() != model.InputDim())
    throw Error(ErrorKind::kShape, "LDA transform shape differs from the model's");
  SiameseModel out = model;
  out.mean = lda.mean;
  out.w = lda.projection;
  return out;
}

PairOutput Forward(const SiameseModel &model, const Vector &xi, const Vector &xj) {
  if (model.variant != Variant::kTwoBranch)
    throw Error(ErrorKind::kConfig, "Forward needs a two-branch model");
  PairBatch b{xi.transpose(), xj.transpose(), {0}};
  auto c = RunForward(model, b);
  return {c.out.r(0), c.out.f(0)};
}

PairOutput ForwardMd(const SiameseModel &model, const Vector &xi, const Vector &xj) {
  if (model.variant != Variant::kMahalanobis)
    throw Error(ErrorKind::kConfig, "ForwardMd needs a Mahalanobis model");
  PairBatch b{xi.transpose(), xj.transpose(), {0}};
  auto c = RunForward(model, b);
  return {c.out.r(0), c.out.f(0)};
}

BatchOutput ForwardBatch(const SiameseModel &model, const PairBatch &batch) {
  return RunForward(model, batch).out;
}

double Loss(std::span<const double> f, std::span<const int> labels,
            const LossConfig &cfg) {
  if (f.size() != labels.size())
    throw Error(ErrorKind::kShape, "one probability per label required");
  std::vector<double> fc(f.size());
  for (size_t k = 0; k < f.size(); k++) fc[k] = 1.0 - f[k];
  return LossImpl(f, fc, labels, cfg, nullptr);
}

double LossAndGrad(const SiameseModel &model, const PairBatch &batch,
                   const LossConfig &cfg, const std::set<std::string> &freeze,
                   SiameseModel *grad) {
  ForwardCache c = RunForward(model, batch);
  const BatchOutput &o = c.out;
  std::span<const double> f(o.f.data(), o.f.size()), fc(o.fc.data(), o.fc.size());
  Vector gs;
  double loss = LossImpl(f, fc, batch.labels, cfg, grad ? &gs : nullptr);
  if (grad == nullptr) return loss;

  CheckFreezeNames(model, freeze);
  SiameseModel g = ZerosLike(model);
  Matrix dti, dtj;
  if (model.variant == Variant::kTwoBranch) {
    g.alpha = gs.dot(o.r);
    g.beta = gs.sum();
    Vector gr = model.alpha * gs;
    Matrix dai = -2.0 * (c.ai.array().colwise() * gr.array()).matrix();
    Matrix daj = -2.0 * (c.aj.array().colwise() * gr.array()).matrix();
    Matrix dgi = 2.0 * (c.gj.array().colwise() * gr.array()).matrix();
    Matrix dgj = 2.0 * (c.gi.array().colwise() * gr.array()).matrix();
    g.pa = c.bi.t.transpose() * dai + c.bj.t.transpose() * daj;
    g.pg = c.bi.t.transpose() * dgi + c.bj.t.transpose() * dgj;
    dti = dai * model.pa.transpose() + dgi * model.pg.transpose();
    dtj = daj * model.pa.transpose() + dgj * model.pg.transpose();
  } else {
    g.lambda = gs.dot((model.d0 - o.r.array()).matrix());
    g.d0 = model.lambda * gs.sum();
    Vector gdist = -model.lambda * gs;
    Matrix de = 2.0 * (c.e.array().colwise() * gdist.array()).matrix();
    g.p = c.diff.transpose() * de;
    dti = de * model.p.transpose();
    dtj = -dti;
  }
  BackwardBranch(c.bi, dti, &g.w);
  BackwardBranch(c.bj, dtj, &g.w);

  for (auto &view : Params(g))
    if (freeze.count(view.name)) std::fill(view.values.begin(), view.values.end(), 0.0);
  *grad = std::move(g);
  return loss;
}

SiameseModel Grad(const SiameseModel &model, const PairBatch &batch,
                  const LossConfig &cfg, const std::set<std::string> &freeze) {
  SiameseModel g;
  LossAndGrad(model, batch, cfg, freeze, &g);
  return g;
}

void AdamUpdate(std::span<double> params, std::span<const double> grads,
                std::vector<double> &m, std::vector<double> &v, long step,
                double lr) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  if (m.size() != params.size()) m.assign(params.size(), 0.0);
  if (v.size() != params.size()) v.assign(params.size(), 0.0);
  double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
  double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
  for (size_t k = 0; k < params.size(); k++) {
    m[k] = kBeta1 * m[k] + (1 - kBeta1) * grads[k];
    v[k] = kBeta2 * v[k] + (1 - kBeta2) * grads[k] * grads[k];
    double m_hat = m[k] / c1, v_hat = v[k] / c2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
  }
}

void AdamStep(SiameseModel *model, const SiameseModel &grad, AdamState *state,
              double lr) {
  auto params = Params(*model);
  SiameseModel g = grad;
  auto grads = Params(g);
  if (params.size() != grads.size())
    throw Error(ErrorKind::kShape, "gradient variant differs from model");
  for (size_t p = 0; p < params.size(); p++) {
    if (params[p].values.size() != grads[p].values.size())
      throw Error(ErrorKind::kShape, "gradient shape differs for " + params[p].name);
    for (double x : grads[p].values)
      if (!std::isfinite(x))
        throw Error(ErrorKind::kNumeric,
                    "non-finite gradient for parameter " + params[p].name);
  }
  state->m.resize(params.size());
  state->v.resize(params.size());
  state->step++;
  for (size_t p = 0; p < params.size(); p++)
    AdamUpdate(params[p].values, grads[p].values, state->m[p], state->v[p],
               state->step, lr);
}

std::vector<PairIndex> SampleMinibatch(const EmbeddingSet &set, int batch_size,
                                       double pos_fraction, std::mt19937_64 &rng) {
  if (batch_size < 2) throw Error(ErrorKind::kConfig, "batch size must be >= 2");
  if (!(pos_fraction > 0 && pos_fraction < 1))
    throw Error(ErrorKind::kConfig, "pos_fraction must lie in (0, 1)");
  const auto &groups = set.SpeakerGroups();
  if (groups.size() < 2)
    throw Error(ErrorKind::kDegenerateCorpus, "need at least 2 speakers for pairs");
  // Cumulative count of same-speaker unordered pairs per speaker.
  std::vector<long> cumulative;
  long total_pairs = 0;
  for (const auto &g : groups) {
    long m = static_cast<long>(g.size());
    total_pairs += m * (m - 1) / 2;
    cumulative.push_back(total_pairs);
  }
  if (total_pairs == 0)
    throw Error(ErrorKind::kDegenerateCorpus, "no speaker has two utterances");

  int n_pos = static_cast<int>(std::ceil(pos_fraction * batch_size));
  n_pos = std::clamp(n_pos, 1, batch_size - 1);
  std::vector<PairIndex> pairs;
  pairs.reserve(batch_size);
  std::uniform_int_distribution<long> pick_pair(0, total_pairs - 1);
  for (int k = 0; k < n_pos; k++) {
    long r = pick_pair(rng);
    size_t s = std::upper_bound(cumulative.begin(), cumulative.end(), r) -
               cumulative.begin();
    const auto &g = groups[s];
    int m = static_cast<int>(g.size());
    std::uniform_int_distribution<int> first(0, m - 1), second(0, m - 2);
    int a = first(rng), b = second(rng);
    if (b >= a) b++;
    pairs.push_back({g[a], g[b], 1});
  }
  std::uniform_int_distribution<int> pick_utt(0, set.Size() - 1);
  while (static_cast<int>(pairs.size()) < batch_size) {
    int a = pick_utt(rng), b = pick_utt(rng);
    if (set.SpeakerIndex(a) == set.SpeakerIndex(b)) continue;
    pairs.push_back({a, b, 0});
  }
  return pairs;
}

PairBatch MakeBatch(const EmbeddingSet &set, const std::vector<PairIndex> &pairs) {
  PairBatch b;
  b.xi.resize(pairs.size(), set.Dim());
  b.xj.resize(pairs.size(), set.Dim());
  b.labels.resize(pairs.size());
  for (size_t k = 0; k < pairs.size(); k++) {
    b.xi.row(k) = set.vectors().row(pairs[k].i);
    b.xj.row(k) = set.vectors().row(pairs[k].j);
    b.labels[k] = pairs[k].label;
  }
  return b;
}

TrialList MakeTrialList(const EmbeddingSet &set, const std::vector<PairIndex> &pairs) {
  TrialList trials;
  trials.reserve(pairs.size());
  for (const auto &p : pairs)
    trials.push_back({set.ids()[p.i], set.ids()[p.j],
                      p.label == 1 ? TrialLabel::kSame : TrialLabel::kDifferent});
  return trials;
}

TrainResult Train(const SiameseModel &init, const EmbeddingSet &set,
                  const TrainConfig &train_cfg, const LossConfig &loss_cfg) {
  CheckLossConfig(loss_cfg);
  CheckFreezeNames(init, train_cfg.freeze);
  if (set.Dim() != init.InputDim())
    throw Error(ErrorKind::kShape, "embedding dimension differs from model input");
  if (train_cfg.epochs < 0 || !(train_cfg.lr >= 0) || train_cfg.val_trials < 2)
    throw Error(ErrorKind::kConfig, "invalid training configuration");
  TrainResult result;
  result.model = init;
  if (train_cfg.epochs == 0) return result;
  if (!(train_cfg.split > 0 && train_cfg.split < 1))
    throw Error(ErrorKind::kConfig, "split must lie in (0, 1)");

  std::mt19937_64 rng(train_cfg.seed);
  // Speaker-disjoint split.
  const int n_spk = set.NumSpeakers();
  std::vector<int> order(n_spk);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  int n_train = static_cast<int>(std::lround(train_cfg.split * n_spk));
  if (n_train < 2 || n_spk - n_train < 2)
    throw Error(ErrorKind::kConfig, "split leaves fewer than 2 speakers on one side");
  std::vector<bool> is_train(n_spk, false);
  for (int k = 0; k < n_train; k++) is_train[order[k]] = true;
  std::vector<int> train_rows, val_rows;
  for (int k = 0; k < set.Size(); k++)
    (is_train[set.SpeakerIndex(k)] ? train_rows : val_rows).push_back(k);
  EmbeddingSet train_set = set.Subset(train_rows);
  EmbeddingSet val_set = set.Subset(val_rows);

  std::mt19937_64 val_rng(train_cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  PairBatch val_batch = MakeBatch(
      val_set, SampleMinibatch(val_set, train_cfg.val_trials,
                               train_cfg.pos_fraction, val_rng));

  SiameseModel model = init;
  AdamState adam;
  double best = LossAndGrad(model, val_batch, loss_cfg, {}, nullptr);
  result.initial_val_loss = best;
  const int steps = (train_set.Size() + train_cfg.batch_size - 1) / train_cfg.batch_size;
  for (int epoch = 1; epoch <= train_cfg.epochs; epoch++) {
    double train_loss = 0.0;
    for (int step = 0; step < steps; step++) {
      PairBatch batch = MakeBatch(
          train_set, SampleMinibatch(train_set, train_cfg.batch_size,
                                     train_cfg.pos_fraction, rng));
      SiameseModel grad;
      train_loss += LossAndGrad(model, batch, loss_cfg, train_cfg.freeze, &grad);
      AdamStep(&model, grad, &adam, train_cfg.lr);
    }
    train_loss /= steps;
    double val_loss = LossAndGrad(model, val_batch, loss_cfg, {}, nullptr);
    result.history.push_back({epoch, train_loss, val_loss});
    Info("epoch " + std::to_string(epoch) + ": train " + FormatDouble(train_loss) +
         ", validation " + FormatDouble(val_loss));
    if (val_loss < best) {
      best = val_loss;
      result.model = model;
      result.best_epoch = epoch;
    }
  }
  return result;
}

SiameseModel Restrict(const SiameseModel &model, RestrictMode mode) {
  if (model.variant != Variant::kTwoBranch)
    throw Error(ErrorKind::kConfig, "restriction applies to two-branch models only");
  SiameseModel out = model;
  switch (mode) {
    case RestrictMode::kAOnly: out.pg.setZero(); break;
    case RestrictMode::kGOnly: out.pa.setZero(); break;
    case RestrictMode::kGFromA: out.pg = out.pa; break;
    case RestrictMode::kAFromG: out.pa = out.pg; break;
  }
  return out;
}

namespace {

PairBatch TrialBatch(const EmbeddingSet &set, const TrialList &trials) {
  PairBatch b;
  b.xi.resize(trials.size(), set.Dim());
  b.xj.resize(trials.size(), set.Dim());
  b.labels.assign(trials.size(), 0);
  for (size_t k = 0; k < trials.size(); k++) {
    int i = set.IndexOf(trials[k].enroll_id), j = set.IndexOf(trials[k].test_id);
    if (i < 0 || j < 0)
      throw Error(ErrorKind::kMissingReference,
                  "trial " + std::to_string(k + 1) + " references an unknown id");
    b.xi.row(k) = set.vectors().row(i);
    b.xj.row(k) = set.vectors().row(j);
  }
  return b;
}

}  // namespace

std::vector<double> ScoreTrials(const SiameseModel &model, const EmbeddingSet &set,
                                const TrialList &trials) {
  if (trials.empty()) return {};
  BatchOutput o = ForwardBatch(model, TrialBatch(set, trials));
  std::vector<double> scores(o.r.data(), o.r.data() + o.r.size());
  if (model.variant == Variant::kMahalanobis)
    for (double &s : scores) s = -s;
  return scores;
}

std::vector<double> ScoreTrialsGenerative(const LdaTransform &lda,
                                          const JbModel &jb,
                                          const EmbeddingSet &set,
                                          const TrialList &trials) {
  if (lda.OutputDim() != jb.Dim())
    throw Error(ErrorKind::kShape, "LDA output dimension != JB dimension");
  Matrix t = PipelineRows(lda, set.vectors());
  std::vector<double> scores;
  scores.reserve(trials.size());
  for (size_t k = 0; k < trials.size(); k++) {
    int i = set.IndexOf(trials[k].enroll_id), j = set.IndexOf(trials[k].test_id);
    if (i < 0 || j < 0)
      throw Error(ErrorKind::kMissingReference,
                  "trial " + std::to_string(k + 1) + " references an unknown id");
    scores.push_back(ScoreLlr(jb, t.row(i).transpose(), t.row(j).transpose()));
  }
  return scores;
}

void WriteSiamese(const SiameseModel &model, std::ostream &os) {
  os << "siamese " << VariantName(model.variant) << ' ' << model.InputDim() << ' '
     << model.Dim() << '\n';
  WriteVector(os, model.mean);
  WriteMatrixRows(os, model.w);
  if (model.variant == Variant::kTwoBranch) {
    WriteMatrixRows(os, model.pa);
    WriteMatrixRows(os, model.pg);
  } else {
    WriteMatrixRows(os, model.p);
  }
  os << FormatDouble(model.alpha) << '\n' << FormatDouble(model.beta) << '\n';
  if (model.variant == Variant::kMahalanobis)
    os << FormatDouble(model.d0) << '\n' << FormatDouble(model.lambda) << '\n';
}

SiameseModel ReadSiamese(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::kParse, "empty model file");
  auto header = SplitFields(line);
  if (header.size() != 4 || header[0] != "siamese")
    throw Error(ErrorKind::kParse, "expected header 'siamese <variant> <l> <d>'");
  SiameseModel m;
  if (header[1] == "two-branch")
    m.variant = Variant::kTwoBranch;
  else if (header[1] == "mahalanobis")
    m.variant = Variant::kMahalanobis;
  else
    throw Error(ErrorKind::kParse, "unknown variant '" + std::string(header[1]) + "'");
  long l = ParseInt(header[2], "model header"), d = ParseInt(header[3], "model header");
  if (l < 1 || d < 1) throw Error(ErrorKind::kParse, "invalid model dimensions");
  m.mean = ReadVectorLine(is, l, "mean");
  m.w = ReadMatrixRows(is, l, d, "W");
  if (m.variant == Variant::kTwoBranch) {
    m.pa = ReadMatrixRows(is, d, d, "P_A");
    m.pg = ReadMatrixRows(is, d, d, "P_G");
  } else {
    m.p = ReadMatrixRows(is, d, d, "P");
  }
  m.alpha = ReadVectorLine(is, 1, "alpha")(0);
  m.beta = ReadVectorLine(is, 1, "beta")(0);
  if (m.variant == Variant::kMahalanobis) {
    m.d0 = ReadVectorLine(is, 1, "d0")(0);
    m.lambda = ReadVectorLine(is, 1, "lambda")(0);
  }
  return m;
}

void SaveSiamese(const SiameseModel &model, const std::string &path) {
  auto os = OpenForWrite(path);
  WriteSiamese(model, os);
  if (!os.flush()) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

SiameseModel LoadSiamese(const std::string &path) {
  auto is = OpenForRead(path);
  return ReadSiamese(is);
}

void WriteHistoryCsv(const std::vector<EpochRecord> &history, std::ostream &os) {
  os << "epoch,train_loss,val_loss\n";
  for (const auto &h : history)
    os << h.epoch << ',' << FormatDouble(h.train_loss) << ','
       << FormatDouble(h.val_loss) << '\n';
}

}  // namespace jbhybrid
