// tests/acceptance-test.cc

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

// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jbhybrid/hybrid.h"
#include "jbhybrid/jb.h"
#include "jbhybrid/log.h"
#include "jbhybrid/metrics.h"
#include "jbhybrid/synth.h"
#include "jbhybrid/transform.h"
#include "metrics-oracle.h"
#include "test-util.h"

using namespace jbhybrid;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects "name=value" fragments for the detail column.
class Detail {
 public:
  template <typename T>
  Detail &Add(const std::string &name, const T &value) {
    if (!os_.str().empty()) os_ << ", ";
    os_ << name << '=' << value;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Matrix Scalar(double x) { return Matrix::Constant(1, 1, x); }
Vector Vec1(double x) { return Vector::Constant(1, x); }

// ---------------------------------------------------------------------------

Outcome LlrCorrectness() {
  std::mt19937_64 rng(101);
  double worst_oracle = 0, worst_factored = 0;
  for (int k = 0; k < 200; k++) {
    int d = 1 << (k % 4);
    Matrix cu = testing::RandomSpd(d, rng, 0.05), cn = testing::RandomSpd(d, rng, 0.05);
    Vector hi = testing::RandomVector(d, rng), hj = testing::RandomVector(d, rng);
    JbModel m = MakeJbModel(cu, cn);
    Vector zero = Vector::Zero(d);
    double r = ScoreLlr(m, hi, hj);
    double oracle = 2 * (OracleLlrDensity(cu, cn, hi, hj) - OracleLlrDensity(cu, cn, zero, zero));
    worst_oracle = std::max(worst_oracle, std::abs(r - oracle));
    worst_factored = std::max(worst_factored, std::abs(r - ScoreLlrFactored(m.pa, m.pg, hi, hj)));
  }
  Outcome o;
  o.pass = worst_oracle <= 1e-8 && worst_factored <= 1e-8;
  o.detail = Detail().Add("max|r-oracle|", worst_oracle).Add("max|r-factored|", worst_factored).str();
  return o;
}

Outcome ScalarSpotCheck() {
  JbModel m = MakeJbModel(Scalar(1), Scalar(1));
  double a = m.a(0, 0), g = m.g(0, 0), r = ScoreLlr(m, Vec1(1), Vec1(1));
  double ratio = OracleLlrDensity(Scalar(1), Scalar(1), Vec1(1), Vec1(1));
  double exact_ratio = 0.5 * std::log(4.0 / 3) + 1.0 / 6;
  Outcome o;
  // 0.310508 is the six-digit rounding of the exact value.
  o.pass = std::abs(a + 1.0 / 6) <= 1e-10 && std::abs(g + 1.0 / 3) <= 1e-10 &&
           std::abs(r - 1.0 / 3) <= 1e-10 && std::abs(ratio - exact_ratio) <= 1e-10 &&
           std::abs(ratio - 0.310508) <= 5e-7;
  o.detail = Detail().Add("A", a).Add("G", g).Add("r(1,1)", r).Add("log-ratio(1,1)", ratio).str();
  return o;
}

Outcome EmRecovery() {
  SynthConfig cfg;
  cfg.n_speakers = 500;
  cfg.utts_min = cfg.utts_max = 10;
  cfg.dim = 16;
  cfg.speaker_cov = CovarianceRecipe::RandomSpd(1, 50);
  cfg.noise_cov = CovarianceRecipe::RandomSpd(101, 50);
  cfg.seed = 1;
  SynthCorpus corpus = Generate(cfg);
  Matrix x = corpus.set.vectors();
  x.rowwise() -= x.colwise().mean();
  EmTrace trace;
  JbModel m = FitJbEm(x, corpus.set.speakers(), EmConfig{}, &trace);
  const Matrix &cu = corpus.truth.speaker, &cn = corpus.truth.noise;
  double eu = (m.speaker_cov - cu).norm() / cu.norm();
  double en = (m.noise_cov - cn).norm() / cn.norm();
  double worst_drop = 0;
  for (size_t k = 1; k < trace.log_likelihood.size(); k++)
    worst_drop = std::max(worst_drop, trace.log_likelihood[k - 1] - trace.log_likelihood[k]);
  // Sampling floor: covariance of the 500 speaker vectors actually drawn.
  const Matrix &u = corpus.speaker_vectors;
  double floor = (u.transpose() * u / u.rows() - cu).norm() / cu.norm();
  Outcome o;
  o.pass = eu < 0.15 && en < 0.15 && worst_drop <= 1e-8 && trace.log_likelihood.size() >= 2;
  o.detail = Detail()
                 .Add("err(C_u)", eu)
                 .Add("err(C_n)", en)
                 .Add("C_u sampling floor", floor)
                 .Add("iters", trace.iterations)
                 .Add("max LL drop", worst_drop)
                 .str();
  return o;
}

SiameseModel SmallModel(Variant variant, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SiameseModel m = InitRandom(6, 4, seed, variant);
  m.mean = testing::RandomVector(6, rng, 0.3);
  m.alpha = 0.8;
  m.beta = -0.3;
  m.d0 = 1.2;
  m.lambda = 0.7;
  return m;
}

Outcome GradientAudit() {
  std::mt19937_64 rng(41);
  PairBatch batch;
  batch.xi = testing::RandomMatrix(8, 6, rng);
  batch.xj = testing::RandomMatrix(8, 6, rng);
  batch.labels = {1, 0, 1, 0, 0, 1, 0, 1};
  auto loss = [&](const SiameseModel &m, const LossConfig &cfg) {
    BatchOutput out = ForwardBatch(m, batch);
    return Loss(std::span<const double>(out.f.data(), out.f.size()), batch.labels, cfg);
  };
  double worst = 0;
  std::string worst_name;
  int checked = 0;
  for (Variant variant : {Variant::kTwoBranch, Variant::kMahalanobis})
    for (LossKind kind : {LossKind::kBce, LossKind::kWbce, LossKind::kDem}) {
      SiameseModel model = SmallModel(variant, 43);
      LossConfig cfg;
      cfg.kind = kind;
      cfg.p_tar = cfg.w_s = 0.3;
      SiameseModel grad = Grad(model, batch, cfg);
      auto analytic = Params(grad);
      auto params = Params(model);
      for (size_t p = 0; p < params.size(); p++) {
        double diff_sq = 0;
        for (size_t k = 0; k < params[p].values.size(); k++) {
          double saved = params[p].values[k];
          const double h = 1e-5;
          params[p].values[k] = saved + h;
          double up = loss(model, cfg);
          params[p].values[k] = saved - h;
          double down = loss(model, cfg);
          params[p].values[k] = saved;
          double numeric = (up - down) / (2 * h), a = analytic[p].values[k];
          diff_sq += (a - numeric) * (a - numeric);
        }
        double norm_sq = 0;
        for (double a : analytic[p].values) norm_sq += a * a;
        double rel = std::sqrt(diff_sq) / std::max(std::sqrt(norm_sq), 1e-12);
        if (rel > worst) {
          worst = rel;
          worst_name = std::string(VariantName(variant)) + "/" + LossName(kind) + "/" +
                       params[p].name;
        }
        checked++;
      }
    }
  Outcome o;
  o.pass = worst < 1e-5;
  o.detail = Detail().Add("tensors", checked).Add("worst rel err", worst).Add("at", worst_name).str();
  return o;
}

// The network built from a fitted LDA + JB pipeline scores like the pipeline.
Outcome GenerativeEquivalence() {
  SynthConfig cfg;
  cfg.n_speakers = 300;
  cfg.utts_min = 4;
  cfg.utts_max = 8;
  cfg.dim = 24;
  cfg.speaker_cov = CovarianceRecipe::RandomSpd(5, 20);
  cfg.noise_cov = CovarianceRecipe::RandomSpd(6, 20);
  cfg.seed = 7;
  SynthCorpus corpus = Generate(cfg);
  LdaTransform lda = FitLda(corpus.set, 16);
  JbModel jb = FitJbEm(PipelineRows(lda, corpus.set.vectors()), corpus.set.speakers(), EmConfig{});
  SiameseModel init = InitFromGenerative(lda, jb);
  std::mt19937_64 rng(8);
  TrialList trials = MakeTrialList(corpus.set, SampleMinibatch(corpus.set, 1000, 0.3, rng));
  std::vector<double> gen = ScoreTrialsGenerative(lda, jb, corpus.set, trials);
  std::vector<double> net = ScoreTrials(init, corpus.set, trials);
  double worst = 0;
  for (size_t k = 0; k < gen.size(); k++) worst = std::max(worst, std::abs(gen[k] - net[k]));
  ScoreSet a{trials, gen}, b{trials, net};
  double eer_a = ComputeEer(a).eer, eer_b = ComputeEer(b).eer;
  double dcf_a = ComputeMinDcf(a, 0.01).raw, dcf_b = ComputeMinDcf(b, 0.01).raw;
  Outcome o;
  o.pass = worst <= 1e-10 && eer_a == eer_b && dcf_a == dcf_b;
  o.detail = Detail().Add("max|diff|", worst).Add("EER", eer_a).Add("EER(net)", eer_b).str();
  return o;
}

Outcome MetricOracles() {
  std::mt19937_64 rng(61);
  int mismatches = 0, invariance_failures = 0;
  auto sigmoid = [](double x) { return 1 / (1 + std::exp(-x)); };
  for (int k = 0; k < 100; k++) {
    LabeledScores s = testing::RandomScores(rng, 200);
    double eer = ComputeEer(s).eer;
    if (eer != testing::BruteEer(s)) mismatches++;
    for (double p : {0.01, 0.001})
      if (ComputeMinDcf(s, p).raw != testing::BruteMinDcf(s, p)) mismatches++;
    for (const std::function<double(double)> &g :
         {std::function<double(double)>([](double x) { return 2 * x + 3; }),
          std::function<double(double)>(sigmoid)}) {
      LabeledScores m;
      for (double x : s.target) m.target.push_back(g(x));
      for (double x : s.nontarget) m.nontarget.push_back(g(x));
      if (ComputeEer(m).eer != eer || ComputeMinDcf(m, 0.01).raw != ComputeMinDcf(s, 0.01).raw)
        invariance_failures++;
    }
  }
  LabeledScores separated{{2.0, 3.0, 4.0}, {-1.0, 0.0, 1.0}};
  double sep_eer = ComputeEer(separated).eer, sep_dcf = ComputeMinDcf(separated, 0.01).raw;
  Outcome o;
  o.pass = mismatches == 0 && invariance_failures == 0 && sep_eer == 0 && sep_dcf == 0;
  o.detail = Detail()
                 .Add("oracle mismatches", mismatches)
                 .Add("invariance failures", invariance_failures)
                 .Add("separated EER", sep_eer)
                 .Add("separated minDCF", sep_dcf)
                 .str();
  return o;
}

// A training corpus, a held-out corpus of new speakers from the same
// distribution, and a labeled trial list on the held-out corpus.
struct Experiment {
  SynthCorpus train;
  SynthCorpus eval;
  TrialList trials;
};

Experiment MakeExperiment(SynthConfig cfg, int eval_speakers, int n_trials,
                          std::uint64_t seed) {
  Experiment e;
  cfg.seed = seed;
  e.train = Generate(cfg);
  cfg.seed = seed + 50000;
  cfg.n_speakers = eval_speakers;
  cfg.id_prefix = "ev";
  e.eval = Generate(cfg);
  std::mt19937_64 rng(seed + 7);
  e.trials = MakeTrialList(e.eval.set, SampleMinibatch(e.eval.set, n_trials, 0.1, rng));
  return e;
}

double Eer(const TrialList &trials, const std::vector<double> &scores) {
  return 100 * ComputeEer(ScoreSet{trials, scores}).eer;
}

Outcome MatchedEndToEnd() {
  const std::uint64_t seed = 1;
  SynthConfig cfg;
  cfg.n_speakers = 1000;
  cfg.utts_min = cfg.utts_max = 10;
  cfg.dim = 64;
  cfg.speaker_cov = CovarianceRecipe::RandomSpd(1000 + seed, 10);
  cfg.noise_cov = CovarianceRecipe::RandomSpd(2000 + seed, 10, 2.0);
  Experiment e = MakeExperiment(cfg, 1000, 10000, seed);

  std::vector<double> oracle;
  for (const auto &t : e.trials) {
    Vector a = e.eval.set.vectors().row(e.eval.set.IndexOf(t.enroll_id)).transpose();
    Vector b = e.eval.set.vectors().row(e.eval.set.IndexOf(t.test_id)).transpose();
    oracle.push_back(OracleLlrDensity(e.train.truth.speaker, e.train.truth.noise, a, b));
  }
  LdaTransform lda = FitLda(e.train.set, 64);
  JbModel jb = FitJbEm(PipelineRows(lda, e.train.set.vectors()), e.train.set.speakers(),
                       EmConfig{});
  TrainConfig tc;
  tc.seed = seed;  // batch 4096, lr 0.0005, 20 epochs
  LossConfig lc;   // DEM, p_tar 0.01
  TrainResult tuned = Train(InitFromGenerative(lda, jb), e.train.set, tc, lc);

  double eer_oracle = Eer(e.trials, oracle);
  double eer_jb = Eer(e.trials, ScoreTrialsGenerative(lda, jb, e.eval.set, e.trials));
  double eer_hyb = Eer(e.trials, ScoreTrials(tuned.model, e.eval.set, e.trials));
  Outcome o;
  o.pass = eer_jb - eer_oracle <= 1.0 && eer_hyb - eer_jb <= 0.5;
  o.detail = Detail()
                 .Add("EER% oracle", eer_oracle)
                 .Add("JB", eer_jb)
                 .Add("hybrid", eer_hyb)
                 .str();
  return o;
}

// The channel-shift corpus used for the mismatched criteria.
SynthConfig MismatchConfig(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_speakers = 5000;
  cfg.utts_min = cfg.utts_max = 10;
  cfg.dim = 32;
  cfg.speaker_cov = CovarianceRecipe::RandomSpd(1000 + seed, 10);
  cfg.noise_cov = CovarianceRecipe::RandomSpd(2000 + seed, 10);
  cfg.mismatch.kind = Mismatch::Kind::kChannelShift;
  return cfg;
}

Outcome MismatchedEndToEnd() {
  std::vector<double> eer_jb, eer_hyb, val_jb_init, val_rand_init;
  for (std::uint64_t seed = 1; seed <= 10; seed++) {
    Experiment e = MakeExperiment(MismatchConfig(seed), 1000, 10000, seed);
    LdaTransform lda = FitLda(e.train.set, 32);
    JbModel jb = FitJbEm(PipelineRows(lda, e.train.set.vectors()), e.train.set.speakers(),
                         EmConfig{});
    SiameseModel random_init = InitRandom(32, 32, seed);
    random_init.mean = lda.mean;

    // Balanced objective; first calibrate alpha and beta with the rest
    // frozen, then fine-tune everything at a small learning rate.
    LossConfig lc;
    lc.p_tar = 0.5;
    TrainConfig calibrate;
    calibrate.batch_size = 1024;
    calibrate.pos_fraction = 0.5;
    calibrate.seed = seed;
    calibrate.lr = 0.05;
    calibrate.epochs = 20;
    calibrate.freeze = {"W", "P_A", "P_G"};
    TrainConfig tune = calibrate;
    tune.lr = 0.0001;
    tune.epochs = 4;
    tune.freeze.clear();
    auto run = [&](const SiameseModel &init) {
      return Train(Train(init, e.train.set, calibrate, lc).model, e.train.set, tune, lc);
    };
    TrainResult from_jb = run(InitFromGenerative(lda, jb));
    TrainResult from_random = run(random_init);

    eer_jb.push_back(Eer(e.trials, ScoreTrialsGenerative(lda, jb, e.eval.set, e.trials)));
    eer_hyb.push_back(Eer(e.trials, ScoreTrials(from_jb.model, e.eval.set, e.trials)));
    val_jb_init.push_back(from_jb.history.back().val_loss);
    val_rand_init.push_back(from_random.history.back().val_loss);
  }
  double m_jb = Median(eer_jb), m_hyb = Median(eer_hyb);
  double m_vj = Median(val_jb_init), m_vr = Median(val_rand_init);
  Outcome o;
  o.pass = m_hyb < m_jb && m_vj < m_vr;
  o.detail = Detail()
                 .Add("median EER% JB", m_jb)
                 .Add("hybrid(JB init)", m_hyb)
                 .Add("median final val loss JB init", m_vj)
                 .Add("random init", m_vr)
                 .str();
  return o;
}

Outcome AblationIdentities() {
  std::mt19937_64 rng(81);
  const int l = 10, d = 6;
  SiameseModel m = InitRandom(l, d, 82);
  m.mean = testing::RandomVector(l, rng, 0.2);
  SiameseModel md = m;
  md.variant = Variant::kMahalanobis;
  md.p = m.pa;
  SiameseModel g_from_a = Restrict(m, RestrictMode::kGFromA);
  SiameseModel a_only = Restrict(m, RestrictMode::kAOnly);
  SiameseModel g_only = Restrict(m, RestrictMode::kGOnly);
  double worst_md = 0, worst_rows = 0;
  for (int k = 0; k < 1000; k++) {
    Vector xi = testing::RandomVector(l, rng), xj = testing::RandomVector(l, rng);
    worst_md = std::max(worst_md, std::abs(Forward(g_from_a, xi, xj).r + ForwardMd(md, xi, xj).r));
    Vector ti = (m.w.transpose() * (xi - m.mean)).normalized();
    Vector tj = (m.w.transpose() * (xj - m.mean)).normalized();
    Matrix a = -m.pa * m.pa.transpose(), g = -m.pg * m.pg.transpose();
    double direct_a = ti.dot(a * ti) + tj.dot(a * tj);
    double direct_g = -2 * ti.dot(g * tj);
    worst_rows = std::max(worst_rows, std::abs(Forward(a_only, xi, xj).r - direct_a));
    worst_rows = std::max(worst_rows, std::abs(Forward(g_only, xi, xj).r - direct_g));
  }

  // DEM vs WBCE at the low-false-alarm operating point.
  std::vector<double> dcf_dem, dcf_wbce;
  for (std::uint64_t seed = 1; seed <= 10; seed++) {
    Experiment e = MakeExperiment(MismatchConfig(seed), 1000, 50000, seed);
    LdaTransform lda = FitLda(e.train.set, 32);
    JbModel jb = FitJbEm(PipelineRows(lda, e.train.set.vectors()), e.train.set.speakers(),
                         EmConfig{});
    SiameseModel init = InitFromGenerative(lda, jb);
    TrainConfig tc;  // batch 4096, lr 0.0005
    tc.epochs = 4;
    tc.seed = seed;
    for (LossKind kind : {LossKind::kDem, LossKind::kWbce}) {
      LossConfig lc;
      lc.kind = kind;
      lc.p_tar = lc.w_s = 0.001;
      TrainResult r = Train(init, e.train.set, tc, lc);
      double dcf = ComputeMinDcf(ScoreSet{e.trials, ScoreTrials(r.model, e.eval.set, e.trials)},
                                 0.001).normalized;
      (kind == LossKind::kDem ? dcf_dem : dcf_wbce).push_back(dcf);
    }
  }
  double m_dem = Median(dcf_dem), m_wbce = Median(dcf_wbce);
  Outcome o;
  o.pass = worst_md <= 1e-10 && worst_rows <= 1e-10 && m_dem <= m_wbce;
  o.detail = Detail()
                 .Add("max|g-from-a + dist|", worst_md)
                 .Add("max|restricted - direct|", worst_rows)
                 .Add("median minDCF(0.001) DEM", m_dem)
                 .Add("WBCE", m_wbce)
                 .str();
  return o;
}

std::string Slurp(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome Determinism() {
  auto dir = testing::ScratchDir("acceptance");
  const char *chain[] = {
      R"(["synth", "--speakers", "200", "--utts", "4:8", "--dim", "16", "--seed", "1",
          "--cu", "random:1:10", "--cn", "random:2:10", "--mismatch", "channel-shift",
          "--out", "train.txt"])",
      R"(["synth", "--speakers", "100", "--utts", "4:8", "--dim", "16", "--seed", "2",
          "--cu", "random:1:10", "--cn", "random:2:10", "--mismatch", "channel-shift",
          "--prefix", "ev-", "--out", "eval.txt"])",
      R"(["trials", "--in", "eval.txt", "--out", "trials.txt", "--count", "3000", "--seed", "3"])",
      R"(["fit-lda", "--in", "train.txt", "--out", "lda.txt", "--dim", "12"])",
      R"(["fit-jb", "--in", "train.txt", "--lda", "lda.txt", "--out", "jb.txt"])",
      R"(["init-hybrid", "--lda", "lda.txt", "--jb", "jb.txt", "--out", "h0.txt"])",
      R"(["train", "--model", "h0.txt", "--in", "train.txt", "--out", "h1.txt",
          "--batch-size", "512", "--lr", "0.001", "--epochs", "3", "--seed", "4"])",
      R"(["score", "--in", "eval.txt", "--trials", "trials.txt", "--model", "h1.txt",
          "--out", "h1.scores"])",
      R"(["eval", "--scores", "h1.scores", "--trials", "trials.txt", "--det", "det.csv",
          "--out", "report.txt"])",
  };
  {
    std::ofstream os(dir / "chain.json");
    os << "{\"steps\": [";
    for (size_t k = 0; k < std::size(chain); k++)
      os << (k ? ", " : "") << "{\"argv\": " << chain[k] << "}";
    os << "]}\n";
  }
  auto replay = [&]() {
    std::string cmd = "cd '" + dir.string() + "' && '" JBHYBRID_CLI_PATH
                      "' replay chain.json > replay.out 2> replay.err";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::vector<std::string> files = {"h1.scores", "report.txt", "det.csv", "h1.txt"};
  Outcome o;
  int first = replay();
  std::vector<std::string> before;
  for (const auto &f : files) before.push_back(Slurp(dir / f));
  for (const auto &f : files) std::filesystem::remove(dir / f);
  int second = replay();
  int differing = 0;
  for (size_t k = 0; k < files.size(); k++)
    if (before[k].empty() || Slurp(dir / files[k]) != before[k]) differing++;
  o.pass = first == 0 && second == 0 && differing == 0;
  o.detail = Detail()
                 .Add("exit codes", std::to_string(first) + "," + std::to_string(second))
                 .Add("differing files", differing)
                 .Add("report", before[1].substr(0, before[1].find('\n')))
                 .str();
  return o;
}

}  // namespace

int main() {
  SetWarningSink([](const std::string &) {});
  struct Criterion {
    int id;
    const char *name;
    std::function<Outcome()> run;
    double limit_secs;  // 0 = no stated limit
  };
  const std::vector<Criterion> criteria = {
      {1, "LLR correctness", LlrCorrectness, 5},
      {2, "scalar closed form", ScalarSpotCheck, 0},
      {3, "EM recovery", EmRecovery, 60},
      {4, "gradient audit", GradientAudit, 10},
      {5, "generative equivalence at init", GenerativeEquivalence, 0},
      {6, "metric oracles", MetricOracles, 0},
      {7, "end-to-end, matched corpus", MatchedEndToEnd, 0},
      {8, "end-to-end, mismatched corpus", MismatchedEndToEnd, 600},
      {9, "ablation identities and DEM vs WBCE", AblationIdentities, 0},
      {10, "determinism of the CLI chain", Determinism, 0},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_secs > 0 && secs > c.limit_secs) {
      o.pass = false;
      o.detail += ", over the " + std::to_string(static_cast<int>(c.limit_secs)) + "s limit";
    }
    if (!o.pass) failures++;
    std::printf("%s %2d %-38s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
