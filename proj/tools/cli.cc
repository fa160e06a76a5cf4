// tools/cli.cc

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

// Command-line front end.  Every command reads and writes the documented
// text formats and leaves a JSON manifest next to its main output so that
// `jbhybrid replay <manifest>` can reproduce it.

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "jbhybrid/corpus.h"
#include "jbhybrid/error.h"
#include "jbhybrid/hybrid.h"
#include "jbhybrid/jb.h"
#include "jbhybrid/log.h"
#include "jbhybrid/metrics.h"
#include "jbhybrid/synth.h"
#include "jbhybrid/transform.h"

namespace jbhybrid {

namespace {

using json = nlohmann::ordered_json;

Error Usage(const std::string &msg) { return Error(ErrorKind::kUsage, msg); }

std::vector<std::string> SplitOn(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double ToDouble(const std::string &s, const std::string &what) {
  try {
    return ParseDouble(s, what);
  } catch (const Error &) {
    throw Usage(what + ": bad number '" + s + "'");
  }
}

long ToInt(const std::string &s, const std::string &what) {
  try {
    return ParseInt(s, what);
  } catch (const Error &) {
    throw Usage(what + ": bad integer '" + s + "'");
  }
}

CovarianceRecipe ParseRecipe(const std::string &spec, const std::string &flag) {
  auto parts = SplitOn(spec, ':');
  auto bad = [&] {
    return Usage(flag + " expects isotropic:<var>, diagonal:<v1,v2,...> or "
                        "random:<seed>:<cap>[:<scale>], got '" + spec + "'");
  };
  if (parts.empty()) throw bad();
  if (parts[0] == "isotropic" && parts.size() == 2)
    return CovarianceRecipe::Isotropic(ToDouble(parts[1], flag));
  if (parts[0] == "diagonal" && parts.size() == 2) {
    std::vector<double> diag;
    for (const auto &v : SplitOn(parts[1], ',')) diag.push_back(ToDouble(v, flag));
    return CovarianceRecipe::Diagonal(std::move(diag));
  }
  if (parts[0] == "random" && (parts.size() == 3 || parts.size() == 4)) {
    return CovarianceRecipe::RandomSpd(static_cast<std::uint64_t>(ToInt(parts[1], flag)),
                                       ToDouble(parts[2], flag),
                                       parts.size() == 4 ? ToDouble(parts[3], flag) : 1.0);
  }
  throw bad();
}

Mismatch ParseMismatch(const std::string &spec) {
  auto parts = SplitOn(spec, ':');
  Mismatch m;
  if (parts.size() == 1 && parts[0] == "none") return m;
  if (parts[0] == "heavy-tail" && parts.size() <= 2) {
    m.kind = Mismatch::Kind::kHeavyTail;
    if (parts.size() == 2) m.dof = ToDouble(parts[1], "--mismatch");
    return m;
  }
  if (parts[0] == "channel-shift" && parts.size() <= 4) {
    m.kind = Mismatch::Kind::kChannelShift;
    if (parts.size() >= 2) m.fraction = ToDouble(parts[1], "--mismatch");
    if (parts.size() >= 3) m.offset_norm = ToDouble(parts[2], "--mismatch");
    if (parts.size() == 4)
      m.offset_seed = static_cast<std::uint64_t>(ToInt(parts[3], "--mismatch"));
    return m;
  }
  throw Usage("--mismatch expects none, heavy-tail[:<dof>] or "
              "channel-shift[:<fraction>[:<norm>[:<seed>]]], got '" + spec + "'");
}

LossKind ParseLoss(const std::string &s) {
  if (s == "bce") return LossKind::kBce;
  if (s == "wbce") return LossKind::kWbce;
  if (s == "dem") return LossKind::kDem;
  throw Usage("--loss must be bce, wbce or dem");
}

Variant ParseVariant(const std::string &s) {
  if (s == "two-branch") return Variant::kTwoBranch;
  if (s == "mahalanobis") return Variant::kMahalanobis;
  throw Usage("--variant must be two-branch or mahalanobis");
}

RestrictMode ParseMode(const std::string &s) {
  if (s == "a-only") return RestrictMode::kAOnly;
  if (s == "g-only") return RestrictMode::kGOnly;
  if (s == "g-from-a") return RestrictMode::kGFromA;
  if (s == "a-from-g") return RestrictMode::kAFromG;
  throw Usage("--mode must be a-only, g-only, g-from-a or a-from-g");
}

void WriteTextFile(const std::string &path, const std::string &text) {
  auto os = OpenForWrite(path);
  os << text;
  if (!os.flush()) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

// Options shared by every command, plus the manifest bookkeeping.
struct Context {
  std::string command;
  std::vector<std::string> argv;
  json config = json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void WriteManifest(const Context &ctx) {
  if (ctx.outputs.empty()) return;
  json j;
  j["command"] = ctx.command;
  j["argv"] = ctx.argv;
  j["config"] = ctx.config;
  j["seed"] = ctx.seed;
  j["inputs"] = ctx.inputs;
  j["outputs"] = ctx.outputs;
  j["version"] = kToolkitVersion;
  WriteTextFile(ctx.outputs.front() + ".manifest.json", j.dump(2) + "\n");
}

void CaptureConfig(const CLI::App *sub, Context *ctx) {
  for (const CLI::Option *opt : sub->get_options()) {
    std::string name = opt->get_name();
    if (name == "--help" || name.empty()) continue;
    if (opt->count() > 0) {
      auto values = opt->reduced_results();
      if (opt->get_expected_max() > 1 || values.size() > 1)
        ctx->config[name] = values;
      else if (opt->get_type_size() == 0)
        ctx->config[name] = true;
      else
        ctx->config[name] = values.empty() ? "" : values.front();
    } else {
      ctx->config[name] = opt->get_default_str();
    }
  }
}

ScoreSet MakeScoreSet(const TrialList &trials, std::vector<double> scores) {
  ScoreSet s;
  s.trials = trials;
  for (auto &t : s.trials) t.label.reset();
  s.scores = std::move(scores);
  return s;
}

// ---------------------------------------------------------------- commands

struct SynthArgs {
  int speakers = 100;
  std::string utts = "10";
  int dim = 16;
  std::uint64_t seed = 0;
  std::string cu = "isotropic:1";
  std::string cn = "isotropic:1";
  std::string mismatch = "none";
  std::string prefix;
  std::string out;
  std::string truth;
};

void CmdSynth(const SynthArgs &a, Context *ctx) {
  SynthConfig cfg;
  cfg.n_speakers = a.speakers;
  auto range = SplitOn(a.utts, ':');
  if (range.empty() || range.size() > 2) throw Usage("--utts expects <n> or <min>:<max>");
  try {
    cfg.utts_min = static_cast<int>(ParseInt(range[0], "--utts"));
    cfg.utts_max = range.size() == 2 ? static_cast<int>(ParseInt(range[1], "--utts"))
                                     : cfg.utts_min;
  } catch (const Error &) {
    throw Usage("--utts expects <n> or <min>:<max>");
  }
  cfg.dim = a.dim;
  cfg.seed = a.seed;
  cfg.speaker_cov = ParseRecipe(a.cu, "--cu");
  cfg.noise_cov = ParseRecipe(a.cn, "--cn");
  cfg.mismatch = ParseMismatch(a.mismatch);
  cfg.id_prefix = a.prefix;
  SynthCorpus corpus = Generate(cfg);
  std::string truth = a.truth.empty() ? a.out + ".truth" : a.truth;
  SaveEmbeddings(corpus.set, a.out);
  SaveJb(MakeJbModel(corpus.truth.speaker, corpus.truth.noise), truth);
  ctx->seed = a.seed;
  ctx->outputs = {a.out, truth};
}

struct TrialsArgs {
  std::string in;
  std::string out;
  int count = 10000;
  double pos_fraction = 0.5;
  std::uint64_t seed = 0;
};

void CmdTrials(const TrialsArgs &a, Context *ctx) {
  EmbeddingSet set = LoadEmbeddings(a.in);
  std::mt19937_64 rng(a.seed);
  SaveTrials(MakeTrialList(set, SampleMinibatch(set, a.count, a.pos_fraction, rng)),
             a.out);
  ctx->seed = a.seed;
  ctx->inputs = {a.in};
  ctx->outputs = {a.out};
}

struct FitLdaArgs {
  std::string in;
  std::string out;
  int dim = 200;
  bool pre_normalize = false;
  double epsilon = 1e-6;
};

void CmdFitLda(const FitLdaArgs &a, Context *ctx) {
  EmbeddingSet set = LoadEmbeddings(a.in);
  LdaOptions opts;
  opts.epsilon = a.epsilon;
  opts.pre_normalize = a.pre_normalize;
  LdaTransform t = FitLda(set, a.dim, opts);
  SaveLda(t, a.out);
  std::cout << "LDA " << t.InputDim() << " -> " << t.OutputDim() << '\n';
  ctx->inputs = {a.in};
  ctx->outputs = {a.out};
}

struct FitJbArgs {
  std::string in;
  std::string lda;
  std::string out;
  int max_iters = 200;
  double rel_tol = 1e-6;
  bool em_like = false;
  bool verbose = false;
};

void CmdFitJb(const FitJbArgs &a, Context *ctx) {
  EmbeddingSet set = LoadEmbeddings(a.in);
  LdaTransform lda = LoadLda(a.lda);
  Matrix t = PipelineRows(lda, set.vectors());
  EmConfig cfg;
  cfg.max_iters = a.max_iters;
  cfg.rel_tol = a.rel_tol;
  cfg.drop_posterior_cov = a.em_like;
  cfg.verbose = a.verbose;
  EmTrace trace;
  JbModel model = FitJbEm(t, set.speakers(), cfg, &trace);
  SaveJb(model, a.out);
  std::cout << "EM iterations=" << trace.iterations
            << " converged=" << (trace.converged ? 1 : 0)
            << " log-likelihood=" << FormatDouble(trace.log_likelihood.back()) << '\n';
  ctx->inputs = {a.in, a.lda};
  ctx->outputs = {a.out};
}

struct InitArgs {
  std::string init = "jb";
  std::string lda;
  std::string jb;
  std::string variant = "two-branch";
  std::string md_from = "a";
  int in_dim = 0;
  int dim = 200;
  std::uint64_t seed = 0;
  std::string out;
};

void CmdInitHybrid(const InitArgs &a, Context *ctx) {
  Variant variant = ParseVariant(a.variant);
  SiameseModel m;
  if (a.init == "jb") {
    if (a.lda.empty() || a.jb.empty()) throw Usage("--init jb needs --lda and --jb");
    LdaTransform lda = LoadLda(a.lda);
    JbModel jb = LoadJb(a.jb);
    m = InitFromGenerative(lda, jb, variant);
    if (variant == Variant::kMahalanobis) {
      if (a.md_from == "g")
        m.p = jb.pg;
      else if (a.md_from != "a")
        throw Usage("--md-from must be a or g");
    }
    ctx->inputs = {a.lda, a.jb};
  } else if (a.init == "random") {
    int l = a.in_dim, d = a.dim;
    if (!a.lda.empty()) {
      // Shapes (and the centering offset) come from the LDA transform.
      LdaTransform lda = LoadLda(a.lda);
      l = lda.InputDim();
      d = lda.OutputDim();
      m = InitRandom(l, d, a.seed, variant);
      m.mean = lda.mean;
      ctx->inputs = {a.lda};
    } else {
      if (l < 1) throw Usage("--init random needs --in-dim (or --lda)");
      m = InitRandom(l, d, a.seed, variant);
    }
    ctx->seed = a.seed;
  } else {
    throw Usage("--init must be jb or random");
  }
  SaveSiamese(m, a.out);
  ctx->outputs = {a.out};
}

struct TrainArgs {
  std::string model;
  std::string in;
  std::string out;
  std::string history;
  std::string loss = "dem";
  double p_tar = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
  double w_s = -1.0;
  int batch_size = 4096;
  double lr = 0.0005;
  int epochs = 20;
  double pos_fraction = 0.1;
  double split = 0.9;
  std::uint64_t seed = 0;
  std::vector<std::string> freeze;
  int val_trials = 4096;
  bool verbose = false;
};

void CmdTrain(const TrainArgs &a, Context *ctx) {
  SiameseModel init = LoadSiamese(a.model);
  EmbeddingSet set = LoadEmbeddings(a.in);
  LossConfig loss;
  loss.kind = ParseLoss(a.loss);
  loss.p_tar = a.p_tar;
  loss.c_miss = a.c_miss;
  loss.c_fa = a.c_fa;
  loss.w_s = a.w_s > 0 ? a.w_s : a.p_tar;
  TrainConfig cfg;
  cfg.lr = a.lr;
  cfg.batch_size = a.batch_size;
  cfg.epochs = a.epochs;
  cfg.pos_fraction = a.pos_fraction;
  cfg.split = a.split;
  cfg.seed = a.seed;
  cfg.val_trials = a.val_trials;
  for (const auto &f : a.freeze)
    for (const auto &name : SplitOn(f, ','))
      if (!name.empty()) cfg.freeze.insert(name);
  SetVerbose(a.verbose);
  TrainResult result = Train(init, set, cfg, loss);
  SaveSiamese(result.model, a.out);
  std::string history = a.history.empty() ? a.out + ".history.csv" : a.history;
  std::ostringstream os;
  WriteHistoryCsv(result.history, os);
  WriteTextFile(history, os.str());
  std::cout << "best epoch=" << result.best_epoch << " initial val loss="
            << FormatDouble(result.initial_val_loss) << '\n';
  ctx->seed = a.seed;
  ctx->inputs = {a.model, a.in};
  ctx->outputs = {a.out, history};
}

struct ScoreArgs {
  std::string in;
  std::string trials;
  std::string out;
  std::string model;
  std::string lda;
  std::string jb;
  std::string mode;
};

void CmdScore(const ScoreArgs &a, Context *ctx) {
  EmbeddingSet set = LoadEmbeddings(a.in);
  TrialList trials = LoadTrials(a.trials, &set);
  std::vector<double> scores;
  if (!a.model.empty()) {
    SiameseModel m = LoadSiamese(a.model);
    if (!a.mode.empty()) m = Restrict(m, ParseMode(a.mode));
    scores = ScoreTrials(m, set, trials);
    ctx->inputs = {a.in, a.trials, a.model};
  } else if (!a.lda.empty() && !a.jb.empty()) {
    if (!a.mode.empty()) throw Usage("--mode applies to --model scoring only");
    scores = ScoreTrialsGenerative(LoadLda(a.lda), LoadJb(a.jb), set, trials);
    ctx->inputs = {a.in, a.trials, a.lda, a.jb};
  } else {
    throw Usage("score needs --model, or both --lda and --jb");
  }
  SaveScores(MakeScoreSet(trials, std::move(scores)), a.out);
  ctx->outputs = {a.out};
}

struct EvalArgs {
  std::string scores;
  std::string trials;
  std::vector<double> p_tar;
  double c_miss = 1.0;
  double c_fa = 1.0;
  std::string det;
  std::string hist;
  int bins = 50;
  std::string out;
};

void CmdEval(const EvalArgs &a, Context *ctx) {
  ScoreSet scores = LoadScores(a.scores);
  AttachLabels(LoadTrials(a.trials, nullptr), &scores);
  std::vector<DcfSetting> dcf;
  for (double p : a.p_tar.empty() ? std::vector<double>{0.01, 0.001} : a.p_tar)
    dcf.push_back({p, a.c_miss, a.c_fa});
  EvalReport report = Evaluate(scores, dcf);
  std::string summary = FormatSummary(report);
  std::cout << summary << '\n';
  ctx->inputs = {a.scores, a.trials};
  if (!a.out.empty()) {
    WriteTextFile(a.out, summary + "\n");
    ctx->outputs.push_back(a.out);
  }
  if (!a.det.empty()) {
    std::ostringstream os;
    WriteDetCsv(report.det, os);
    WriteTextFile(a.det, os.str());
    ctx->outputs.push_back(a.det);
  }
  if (!a.hist.empty()) {
    std::ostringstream os;
    WriteHistogramCsv(ScoreHistograms(scores, a.bins), os);
    WriteTextFile(a.hist, os.str());
    ctx->outputs.push_back(a.hist);
  }
}

struct AblateArgs {
  std::string model;
  std::string in;
  std::string trials;
  std::string out;
  std::string lda;
  std::string md_model;
  std::string mode;
  std::uint64_t seed = 0;
};

void CmdAblate(const AblateArgs &a, Context *ctx) {
  SiameseModel model = LoadSiamese(a.model);
  if (model.variant != Variant::kTwoBranch)
    throw Usage("ablate needs a two-branch model");
  EmbeddingSet set = LoadEmbeddings(a.in);
  TrialList trials = LoadTrials(a.trials, &set);
  std::vector<DcfSetting> dcf{{0.01}, {0.001}};

  std::vector<std::pair<std::string, SiameseModel>> rows;
  if (a.mode.empty()) {
    rows.emplace_back("full", model);
    for (RestrictMode m : {RestrictMode::kAOnly, RestrictMode::kGOnly,
                           RestrictMode::kGFromA, RestrictMode::kAFromG})
      rows.emplace_back(RestrictModeName(m), Restrict(model, m));
    SiameseModel md = model;
    md.variant = Variant::kMahalanobis;
    md.p = model.pa;
    md.pa.resize(0, 0);
    md.pg.resize(0, 0);
    rows.emplace_back("mahalanobis(P=P_A)", md);
  } else {
    RestrictMode m = ParseMode(a.mode);
    rows.emplace_back(RestrictModeName(m), Restrict(model, m));
  }
  if (!a.md_model.empty()) rows.emplace_back("mahalanobis(trained)", LoadSiamese(a.md_model));
  if (!a.lda.empty()) {
    // LDA_net comparison with a random JB_net: (a) independent LDA,
    // (b) the jointly trained projection of `model`.
    LdaTransform lda = LoadLda(a.lda);
    SiameseModel random = InitRandom(model.InputDim(), model.Dim(), a.seed);
    SiameseModel setting_a = WithLdaNet(random, lda);
    SiameseModel setting_b = random;
    setting_b.mean = model.mean;
    setting_b.w = model.w;
    rows.emplace_back("lda-net(a)+random-jb", setting_a);
    rows.emplace_back("lda-net(b)+random-jb", setting_b);
    ctx->seed = a.seed;
  }

  std::ostringstream table;
  table << "setting\tEER(%)\tminDCF(0.01)\tminDCF(0.001)\n";
  for (const auto &[name, m] : rows) {
    ScoreSet s{trials, ScoreTrials(m, set, trials)};
    EvalReport r = Evaluate(s, dcf);
    table << name << '\t' << FormatDouble(100.0 * r.eer.eer) << '\t'
          << FormatDouble(r.min_dcf[0].result.normalized) << '\t'
          << FormatDouble(r.min_dcf[1].result.normalized) << '\n';
  }
  std::cout << table.str();
  ctx->inputs = {a.model, a.in, a.trials};
  if (!a.out.empty()) {
    WriteTextFile(a.out, table.str());
    ctx->outputs = {a.out};
  }
}

int Replay(const std::string &path);

// ---------------------------------------------------------------- driver

int Dispatch(const std::vector<std::string> &args) {
  CLI::App app{"Joint Bayesian / Siamese speaker-verification backend", "jbhybrid"};
  const auto kModes = CLI::IsMember({"a-only", "g-only", "g-from-a", "a-from-g"});
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Context ctx;
  ctx.argv = args;

  SynthArgs synth;
  auto *s = app.add_subcommand("synth", "Sample a synthetic embedding corpus");
  s->add_option("--speakers", synth.speakers, "Number of speakers");
  s->add_option("--utts", synth.utts, "Utterances per speaker, <n> or <min>:<max>");
  s->add_option("--dim", synth.dim, "Embedding dimension");
  s->add_option("--seed", synth.seed, "RNG seed");
  s->add_option("--cu", synth.cu, "Speaker covariance recipe");
  s->add_option("--cn", synth.cn, "Noise covariance recipe");
  s->add_option("--mismatch", synth.mismatch, "none | heavy-tail:<dof> | channel-shift[:f[:norm[:seed]]]");
  s->add_option("--prefix", synth.prefix, "Prefix for generated ids");
  s->add_option("--out", synth.out, "Embedding file")->required();
  s->add_option("--truth", synth.truth, "Ground-truth JB file (default <out>.truth)");

  TrialsArgs trials;
  auto *t = app.add_subcommand("trials", "Sample a labeled trial list from an embedding set");
  t->add_option("--in", trials.in, "Embedding file")->required();
  t->add_option("--out", trials.out, "Trial file")->required();
  t->add_option("--count", trials.count, "Number of trials");
  t->add_option("--pos-fraction", trials.pos_fraction, "Fraction of target trials");
  t->add_option("--seed", trials.seed, "RNG seed");

  FitLdaArgs lda;
  auto *l = app.add_subcommand("fit-lda", "Estimate an LDA transform");
  l->add_option("--in", lda.in, "Embedding file")->required();
  l->add_option("--out", lda.out, "LDA file")->required();
  l->add_option("--dim", lda.dim, "Output dimension");
  l->add_flag("--pre-normalize", lda.pre_normalize, "Length-normalize inputs first");
  l->add_option("--epsilon", lda.epsilon, "Relative within-class ridge");

  FitJbArgs jb;
  auto *j = app.add_subcommand("fit-jb", "Fit the Joint Bayesian model by EM");
  j->add_option("--in", jb.in, "Embedding file")->required();
  j->add_option("--lda", jb.lda, "LDA file")->required();
  j->add_option("--out", jb.out, "JB file")->required();
  j->add_option("--max-iters", jb.max_iters, "EM iteration cap");
  j->add_option("--rel-tol", jb.rel_tol, "Relative convergence tolerance");
  j->add_flag("--em-like", jb.em_like, "Drop posterior covariance terms");
  j->add_flag("--verbose", jb.verbose, "Log every iteration");

  InitArgs init;
  auto *i = app.add_subcommand("init-hybrid", "Create a Siamese model");
  i->add_option("--init", init.init, "jb | random")->check(CLI::IsMember({"jb", "random"}));
  i->add_option("--lda", init.lda, "LDA file");
  i->add_option("--jb", init.jb, "JB file");
  i->add_option("--variant", init.variant, "two-branch | mahalanobis")
      ->check(CLI::IsMember({"two-branch", "mahalanobis"}));
  i->add_option("--md-from", init.md_from, "Mahalanobis P from P_A (a) or P_G (g)")
      ->check(CLI::IsMember({"a", "g"}));
  i->add_option("--in-dim", init.in_dim, "Input dimension for random init");
  i->add_option("--dim", init.dim, "Projection dimension for random init");
  i->add_option("--seed", init.seed, "RNG seed");
  i->add_option("--out", init.out, "Model file")->required();

  TrainArgs train;
  auto *r = app.add_subcommand("train", "Discriminative fine-tuning");
  r->add_option("--model", train.model, "Initial model")->required();
  r->add_option("--in", train.in, "Embedding file")->required();
  r->add_option("--out", train.out, "Trained model")->required();
  r->add_option("--history", train.history, "History CSV (default <out>.history.csv)");
  r->add_option("--loss", train.loss, "bce | wbce | dem")
      ->check(CLI::IsMember({"bce", "wbce", "dem"}));
  r->add_option("--p-tar", train.p_tar, "Target prior");
  r->add_option("--c-miss", train.c_miss, "Miss cost");
  r->add_option("--c-fa", train.c_fa, "False-alarm cost");
  r->add_option("--w-s", train.w_s, "WBCE target weight (default: p-tar)");
  r->add_option("--batch-size", train.batch_size, "Trials per step");
  r->add_option("--lr", train.lr, "Adam step size");
  r->add_option("--epochs", train.epochs, "Epochs");
  r->add_option("--pos-fraction", train.pos_fraction, "Target fraction per batch");
  r->add_option("--split", train.split, "Training share of speakers");
  r->add_option("--seed", train.seed, "RNG seed");
  r->add_option("--freeze", train.freeze, "Parameters excluded from updates");
  r->add_option("--val-trials", train.val_trials, "Validation trials");
  r->add_flag("--verbose", train.verbose, "Log every epoch");

  ScoreArgs score;
  auto *c = app.add_subcommand("score", "Score a trial list");
  c->add_option("--in", score.in, "Embedding file")->required();
  c->add_option("--trials", score.trials, "Trial file")->required();
  c->add_option("--out", score.out, "Score file")->required();
  c->add_option("--model", score.model, "Siamese model");
  c->add_option("--lda", score.lda, "LDA file (generative scoring)");
  c->add_option("--jb", score.jb, "JB file (generative scoring)");
  c->add_option("--mode", score.mode, "a-only | g-only | g-from-a | a-from-g")
      ->check(kModes);

  EvalArgs eval;
  auto *e = app.add_subcommand("eval", "EER, minDCF, DET and histograms");
  e->add_option("--scores", eval.scores, "Score file")->required();
  e->add_option("--trials", eval.trials, "Labeled trial file")->required();
  e->add_option("--p-tar", eval.p_tar, "Target prior(s); default 0.01 and 0.001");
  e->add_option("--c-miss", eval.c_miss, "Miss cost");
  e->add_option("--c-fa", eval.c_fa, "False-alarm cost");
  e->add_option("--det", eval.det, "DET CSV output");
  e->add_option("--hist", eval.hist, "Histogram CSV output");
  e->add_option("--bins", eval.bins, "Histogram bins");
  e->add_option("--out", eval.out, "Summary output");

  AblateArgs ablate;
  auto *b = app.add_subcommand("ablate", "A/G settings and LDA_net comparison table");
  b->add_option("--model", ablate.model, "Two-branch model")->required();
  b->add_option("--in", ablate.in, "Embedding file")->required();
  b->add_option("--trials", ablate.trials, "Labeled trial file")->required();
  b->add_option("--out", ablate.out, "Table output");
  b->add_option("--lda", ablate.lda, "Independent LDA for the LDA_net comparison");
  b->add_option("--md-model", ablate.md_model, "Trained Mahalanobis model");
  b->add_option("--mode", ablate.mode, "Only this setting")->check(kModes);
  b->add_option("--seed", ablate.seed, "Seed of the random JB_net");

  std::string replay_path;
  auto *p = app.add_subcommand("replay", "Re-run the command(s) recorded in a manifest");
  p->add_option("manifest", replay_path, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &err) {
    return app.exit(err) == 0 ? 0 : 1;
  }

  CLI::App *sub = app.get_subcommands().front();
  ctx.command = sub->get_name();
  CaptureConfig(sub, &ctx);
  if (sub == s) CmdSynth(synth, &ctx);
  else if (sub == t) CmdTrials(trials, &ctx);
  else if (sub == l) CmdFitLda(lda, &ctx);
  else if (sub == j) CmdFitJb(jb, &ctx);
  else if (sub == i) CmdInitHybrid(init, &ctx);
  else if (sub == r) CmdTrain(train, &ctx);
  else if (sub == c) CmdScore(score, &ctx);
  else if (sub == e) CmdEval(eval, &ctx);
  else if (sub == b) CmdAblate(ablate, &ctx);
  else if (sub == p) return Replay(replay_path);
  WriteManifest(ctx);
  return 0;
}

// A manifest holds either one command ("argv") or a chain ("steps", each
// with its own "argv").
int Replay(const std::string &path) {
  auto is = OpenForRead(path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, "manifest '" + path + "': " + e.what());
  }
  std::vector<std::vector<std::string>> steps;
  try {
    if (j.contains("steps"))
      for (const auto &step : j.at("steps"))
        steps.push_back(step.at("argv").get<std::vector<std::string>>());
    else
      steps.push_back(j.at("argv").get<std::vector<std::string>>());
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, "manifest '" + path + "': " + e.what());
  }
  for (const auto &argv : steps) {
    if (!argv.empty() && argv.front() == "replay")
      throw Usage("manifests may not replay other manifests");
    int status = Dispatch(argv);
    if (status != 0) return status;
  }
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string> &args) {
  try {
    return Dispatch(args);
  } catch (const Error &e) {
    std::cerr << "jbhybrid: " << e.what() << '\n';
    return e.kind() == ErrorKind::kUsage ? 1 : 2;
  } catch (const std::exception &e) {
    std::cerr << "jbhybrid: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace jbhybrid
