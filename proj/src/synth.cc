// src/synth.cc

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

#include "jbhybrid/synth.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "jbhybrid/error.h"

namespace jbhybrid {

CovarianceRecipe CovarianceRecipe::Isotropic(double variance) {
  CovarianceRecipe r;
  r.kind = Kind::kIsotropic;
  r.variance = variance;
  return r;
}

CovarianceRecipe CovarianceRecipe::Diagonal(std::vector<double> diagonal) {
  CovarianceRecipe r;
  r.kind = Kind::kDiagonal;
  r.diagonal = std::move(diagonal);
  return r;
}

CovarianceRecipe CovarianceRecipe::RandomSpd(std::uint64_t seed, double cap,
                                             double scale) {
  CovarianceRecipe r;
  r.kind = Kind::kRandomSpd;
  r.seed = seed;
  r.condition_cap = cap;
  r.scale = scale;
  return r;
}

namespace {

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
// signs of R's diagonal folded into Q.
Matrix RandomOrthogonal(int dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Matrix g(dim, dim);
  for (int r = 0; r < dim; r++)
    for (int c = 0; c < dim; c++) g(r, c) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; c++)
    if (rmat(c, c) < 0) q.col(c) = -q.col(c);
  return q;
}

// Symmetric square root of a PSD matrix.
Matrix SqrtPsd(const Matrix &m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Symmetrize(m));
  Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

std::string SpeakerId(const std::string &prefix, int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%05d", s);
  return prefix + buf;
}

}  // namespace

Matrix MakeCovariance(const CovarianceRecipe &recipe, int dim, bool psd_only) {
  if (dim < 1) throw Error(ErrorKind::kConfig, "dimension must be >= 1");
  auto bad = [](const std::string &msg) { return Error(ErrorKind::kConfig, msg); };
  switch (recipe.kind) {
    case CovarianceRecipe::Kind::kIsotropic:
      if (!(psd_only ? recipe.variance >= 0 : recipe.variance > 0))
        throw bad("isotropic variance must be " +
                  std::string(psd_only ? ">= 0" : "> 0"));
      return recipe.variance * Matrix::Identity(dim, dim);
    case CovarianceRecipe::Kind::kDiagonal: {
      if (static_cast<int>(recipe.diagonal.size()) != dim)
        throw bad("diagonal recipe needs " + std::to_string(dim) + " entries");
      Matrix m = Matrix::Zero(dim, dim);
      for (int i = 0; i < dim; i++) {
        double v = recipe.diagonal[i];
        if (!(psd_only ? v >= 0 : v > 0) || !std::isfinite(v))
          throw bad("diagonal entry " + std::to_string(i) + " out of range");
        m(i, i) = v;
      }
      return m;
    }
    case CovarianceRecipe::Kind::kRandomSpd: {
      if (!(recipe.condition_cap >= 1.0) || !(recipe.scale > 0))
        throw bad("random SPD recipe needs cap >= 1 and scale > 0");
      std::mt19937_64 rng(recipe.seed);
      Matrix q = RandomOrthogonal(dim, rng);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Vector lambda(dim);
      double log_cap = std::log(recipe.condition_cap);
      for (int i = 0; i < dim; i++)
        lambda(i) = recipe.scale * std::exp(unit(rng) * log_cap);
      return Symmetrize(q * lambda.asDiagonal() * q.transpose());
    }
  }
  throw bad("unknown covariance recipe");
}

Covariances MakeCovariances(const SynthConfig &cfg) {
  return {MakeCovariance(cfg.speaker_cov, cfg.dim, true),
          MakeCovariance(cfg.noise_cov, cfg.dim, false)};
}

SynthCorpus Generate(const SynthConfig &cfg) {
  if (cfg.n_speakers < 2)
    throw Error(ErrorKind::kInsufficientClasses,
                "need at least 2 speakers, got " + std::to_string(cfg.n_speakers));
  if (cfg.utts_min < 1 || cfg.utts_max < cfg.utts_min)
    throw Error(ErrorKind::kConfig, "utterances per speaker must satisfy 1 <= min <= max");
  const Mismatch &mm = cfg.mismatch;
  if (mm.kind == Mismatch::Kind::kHeavyTail && !(mm.dof > 2))
    throw Error(ErrorKind::kConfig, "heavy-tail mismatch needs dof > 2");
  if (mm.kind == Mismatch::Kind::kChannelShift &&
      !(mm.fraction >= 0 && mm.fraction <= 1))
    throw Error(ErrorKind::kConfig, "channel-shift fraction must lie in [0, 1]");

  const int d = cfg.dim;
  Covariances truth = MakeCovariances(cfg);
  Matrix speaker_root = SqrtPsd(truth.speaker);
  Matrix noise_root = SqrtPsd(truth.noise);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> utt_count(cfg.utts_min, cfg.utts_max);
  std::chi_squared_distribution<double> chi2(mm.dof);
  std::bernoulli_distribution shifted(mm.fraction);
  auto gaussian = [&](const Matrix &root) {
    Vector z(d);
    for (int i = 0; i < d; i++) z(i) = normal(rng);
    return Vector(root * z);
  };

  Vector offset = Vector::Zero(d);
  if (mm.kind == Mismatch::Kind::kChannelShift) {
    std::mt19937_64 channel_rng(mm.offset_seed);
    Vector dir(d);
    for (int i = 0; i < d; i++) dir(i) = normal(channel_rng);
    double norm = mm.offset_norm > 0 ? mm.offset_norm : std::sqrt(truth.noise.trace());
    offset = dir.normalized() * norm;
  }

  std::vector<std::string> ids, speakers;
  std::vector<Vector> rows;
  Matrix speaker_vectors(cfg.n_speakers, d);
  for (int s = 0; s < cfg.n_speakers; s++) {
    std::string spk = SpeakerId(cfg.id_prefix, s);
    int m = utt_count(rng);
    Vector u = gaussian(speaker_root);
    speaker_vectors.row(s) = u.transpose();
    for (int j = 0; j < m; j++) {
      Vector n = gaussian(noise_root);
      if (mm.kind == Mismatch::Kind::kHeavyTail)
        n *= std::sqrt((mm.dof - 2.0) / chi2(rng));
      else if (mm.kind == Mismatch::Kind::kChannelShift && shifted(rng))
        n += offset;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "-utt%03d", j);
      ids.push_back(spk + buf);
      speakers.push_back(spk);
      rows.push_back(u + n);
    }
  }
  Matrix x(rows.size(), d);
  for (size_t k = 0; k < rows.size(); k++) x.row(k) = rows[k].transpose();
  return {EmbeddingSet(std::move(ids), std::move(speakers), std::move(x)),
          std::move(truth), std::move(speaker_vectors)};
}

}  // namespace jbhybrid
