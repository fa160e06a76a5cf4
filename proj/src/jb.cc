// src/jb.cc

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

#include "jbhybrid/jb.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "jbhybrid/error.h"
#include "jbhybrid/log.h"

namespace jbhybrid {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Utterance rows grouped by speaker label, speakers in first-seen order.
std::vector<std::vector<int>> GroupBySpeaker(
    const std::vector<std::string> &speakers) {
  std::unordered_map<std::string, int> pos;
  std::vector<std::vector<int>> groups;
  for (int k = 0; k < static_cast<int>(speakers.size()); k++) {
    auto [it, inserted] = pos.emplace(speakers[k], static_cast<int>(groups.size()));
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(k);
  }
  return groups;
}

void CheckShapes(const Matrix &vectors, const std::vector<std::string> &speakers) {
  if (static_cast<Eigen::Index>(speakers.size()) != vectors.rows())
    throw Error(ErrorKind::kShape, "one speaker label per row required");
  if (vectors.rows() == 0) throw Error(ErrorKind::kShape, "no observations");
}

double RelativeChange(const Matrix &next, const Matrix &prev) {
  double denom = prev.norm();
  return (next - prev).norm() / (denom > 0 ? denom : 1.0);
}

// Adds 1e-6 * mean(diag) to the diagonal when m is not positive definite.
Matrix FloorToPd(Matrix m) {
  m = Symmetrize(m);
  if (m.rows() > 0 && MinEigenvalue(m) <= 0.0) {
    double mean_diag = m.diagonal().mean();
    m.diagonal().array() += 1e-6 * (mean_diag > 0 ? mean_diag : 1.0);
  }
  return m;
}

struct SpeakerStats {
  int count;
  Vector sum;
};

double LogLikelihoodFromStats(const Matrix &speaker_cov, const Matrix &noise_cov,
                              const std::vector<SpeakerStats> &stats,
                              const Matrix &scatter_within) {
  const int d = static_cast<int>(noise_cov.rows());
  Matrix noise_inv = SpdInverse(noise_cov, "noise covariance");
  double logdet_noise = SpdLogDet(noise_cov, "noise covariance");
  // Per utterance-count cache of ((C_n + m C_u)^-1, log|C_n + m C_u|).
  std::map<int, std::pair<Matrix, double>> cache;
  double total = 0.0;
  long n = 0;
  for (const auto &s : stats) {
    auto it = cache.find(s.count);
    if (it == cache.end()) {
      Matrix c = noise_cov + s.count * speaker_cov;
      it = cache.emplace(s.count,
                         std::make_pair(SpdInverse(c, "speaker block covariance"),
                                        SpdLogDet(c, "speaker block covariance")))
               .first;
    }
    Vector mean = s.sum / s.count;
    total -= 0.5 * ((s.count - 1) * logdet_noise + it->second.second +
                    s.count * mean.dot(it->second.first * mean));
    n += s.count;
  }
  // Sum over speakers of sum_j (x_j - xbar)^T C_n^-1 (x_j - xbar).
  total -= 0.5 * (noise_inv.cwiseProduct(scatter_within).sum());
  total -= 0.5 * n * d * kLog2Pi;
  return total;
}

// Sum over speakers of sum_j (x_j - xbar_i)(x_j - xbar_i)^T.
Matrix WithinScatter(const Matrix &vectors,
                     const std::vector<std::vector<int>> &groups,
                     const std::vector<SpeakerStats> &stats) {
  Matrix total = vectors.transpose() * vectors;
  for (size_t i = 0; i < groups.size(); i++)
    total.noalias() -= stats[i].sum * stats[i].sum.transpose() / stats[i].count;
  return Symmetrize(total);
}

std::vector<SpeakerStats> CollectStats(const Matrix &vectors,
                                       const std::vector<std::vector<int>> &groups) {
  std::vector<SpeakerStats> stats;
  stats.reserve(groups.size());
  for (const auto &g : groups) {
    SpeakerStats s{static_cast<int>(g.size()), Vector::Zero(vectors.cols())};
    for (int k : g) s.sum += vectors.row(k).transpose();
    stats.push_back(std::move(s));
  }
  return stats;
}

}  // namespace

JbModel MakeJbModel(const Matrix &speaker_cov, const Matrix &noise_cov) {
  if (speaker_cov.rows() != speaker_cov.cols() ||
      noise_cov.rows() != noise_cov.cols() ||
      speaker_cov.rows() != noise_cov.rows() || speaker_cov.rows() < 1)
    throw Error(ErrorKind::kShape, "covariances must be square and equal-sized");
  JbModel m;
  m.speaker_cov = speaker_cov;
  m.noise_cov = noise_cov;
  auto ag = DeriveAg(speaker_cov, noise_cov);
  m.a = std::move(ag.a);
  m.g = std::move(ag.g);
  m.pa = FactorizeNsd(m.a);
  m.pg = FactorizeNsd(m.g);
  return m;
}

ScoringMatrices DeriveAg(const Matrix &speaker_cov, const Matrix &noise_cov) {
  if (speaker_cov.rows() != noise_cov.rows() ||
      speaker_cov.cols() != noise_cov.cols())
    throw Error(ErrorKind::kShape, "C_u and C_n differ in shape");
  Eigen::LLT<Matrix> check(Symmetrize(noise_cov));
  if (check.info() != Eigen::Success || MinEigenvalue(noise_cov) <= 0.0)
    throw Error(ErrorKind::kIllConditioned, "C_n is not positive definite");
  Matrix total = speaker_cov + noise_cov;
  Matrix total_inv = SpdInverse(total, "C_u + C_n");
  Matrix schur = total - speaker_cov * total_inv * speaker_cov;
  ScoringMatrices out;
  out.a = Symmetrize(total_inv - SpdInverse(Symmetrize(schur), "Schur complement"));
  Matrix g = -SpdInverse(2.0 * speaker_cov + noise_cov, "2 C_u + C_n") *
             speaker_cov * SpdInverse(noise_cov, "C_n");
  out.g = Symmetrize(g);
  return out;
}

Matrix FactorizeNsd(const Matrix &m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::kShape, "matrix not square");
  const int d = static_cast<int>(m.rows());
  Matrix sym = Symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(-sym);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::kNumeric, "eigendecomposition failed");
  // Eigenvalues of -M, ascending.
  const Vector &lambda = es.eigenvalues();
  double tol = 1e-8 * sym.norm();
  if (d > 0 && -lambda(0) > tol)
    throw Error(ErrorKind::kNotNsd, "matrix has positive eigenvalue " +
                                        FormatDouble(-lambda(0)));
  double lambda_max = d > 0 ? lambda(d - 1) : 0.0;
  double clamp = 1e-10 * lambda_max;
  Matrix p = Matrix::Zero(d, d);
  for (int c = 0; c < d; c++) {
    int src = d - 1 - c;  // descending order
    double value = lambda(src);
    if (!(value > clamp) || value <= 0.0) continue;
    Vector v = es.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    p.col(c) = v * std::sqrt(value);
  }
  return p;
}

double ScoreLlr(const JbModel &model, const Vector &hi, const Vector &hj) {
  if (hi.size() != model.Dim() || hj.size() != model.Dim())
    throw Error(ErrorKind::kShape, "score input dimension mismatch");
  return hi.dot(model.a * hi) + hj.dot(model.a * hj) - 2.0 * hi.dot(model.g * hj);
}

double ScoreLlrFactored(const Matrix &pa, const Matrix &pg, const Vector &hi,
                        const Vector &hj) {
  if (pa.cols() != pg.cols() || pa.rows() != pg.rows() ||
      hi.size() != pa.rows() || hj.size() != pa.rows())
    throw Error(ErrorKind::kShape, "factor/input shape mismatch");
  Vector ai = pa.transpose() * hi, aj = pa.transpose() * hj;
  Vector gi = pg.transpose() * hi, gj = pg.transpose() * hj;
  return 2.0 * gi.dot(gj) - ai.squaredNorm() - aj.squaredNorm();
}

double OracleLlrDensity(const Matrix &speaker_cov, const Matrix &noise_cov,
                        const Vector &hi, const Vector &hj) {
  const int d = static_cast<int>(speaker_cov.rows());
  if (hi.size() != d || hj.size() != d || noise_cov.rows() != d)
    throw Error(ErrorKind::kShape, "oracle input dimension mismatch");
  Matrix same(2 * d, 2 * d), diff = Matrix::Zero(2 * d, 2 * d);
  Matrix total = speaker_cov + noise_cov;
  same << total, speaker_cov, speaker_cov, total;
  diff.topLeftCorner(d, d) = total;
  diff.bottomRightCorner(d, d) = total;
  Vector z(2 * d);
  z << hi, hj;
  auto log_density = [&](const Matrix &cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::kIllConditioned, "pair covariance is singular");
    Matrix l = llt.matrixL();
    double logdet = 2.0 * l.diagonal().array().log().sum();
    Vector w = llt.matrixL().solve(z);
    return -0.5 * (w.squaredNorm() + logdet + 2 * d * kLog2Pi);
  };
  return log_density(same) - log_density(diff);
}

double JbLogLikelihood(const Matrix &speaker_cov, const Matrix &noise_cov,
                       const Matrix &vectors,
                       const std::vector<std::string> &speakers) {
  CheckShapes(vectors, speakers);
  if (vectors.cols() != noise_cov.rows())
    throw Error(ErrorKind::kShape, "observation dimension differs from model");
  auto groups = GroupBySpeaker(speakers);
  auto stats = CollectStats(vectors, groups);
  return LogLikelihoodFromStats(speaker_cov, noise_cov, stats,
                                WithinScatter(vectors, groups, stats));
}

double JbLogLikelihood(const JbModel &model, const Matrix &vectors,
                       const std::vector<std::string> &speakers) {
  return JbLogLikelihood(model.speaker_cov, model.noise_cov, vectors, speakers);
}

JbModel FitJbEm(const Matrix &vectors, const std::vector<std::string> &speakers,
                const EmConfig &cfg, EmTrace *trace) {
  CheckShapes(vectors, speakers);
  if (cfg.max_iters < 1 || !(cfg.rel_tol > 0))
    throw Error(ErrorKind::kConfig, "EM needs max_iters >= 1 and rel_tol > 0");
  const int d = static_cast<int>(vectors.cols());
  const double n = static_cast<double>(vectors.rows());
  auto groups = GroupBySpeaker(speakers);
  const double num_speakers = static_cast<double>(groups.size());
  bool identifiable = false;
  for (const auto &g : groups) identifiable = identifiable || g.size() >= 2;
  if (!identifiable)
    throw Error(ErrorKind::kUnidentifiable,
                "no speaker has two or more utterances; C_u and C_n cannot be "
                "separated");

  Vector global_mean = vectors.colwise().mean().transpose();
  double mean_norm = vectors.rowwise().norm().mean();
  if (global_mean.norm() > 1e-6 * mean_norm)
    Warn("JB training data is not centered (mean norm " +
         FormatDouble(global_mean.norm()) + ")");

  auto stats = CollectStats(vectors, groups);
  Matrix within_scatter = WithinScatter(vectors, groups, stats);

  // Moment initialization.
  Matrix speaker_cov = Matrix::Zero(d, d);
  {
    Vector mean_of_means = Vector::Zero(d);
    for (const auto &s : stats) mean_of_means += s.sum / s.count;
    mean_of_means /= num_speakers;
    for (const auto &s : stats) {
      Vector c = s.sum / s.count - mean_of_means;
      speaker_cov.noalias() += c * c.transpose();
    }
    speaker_cov /= num_speakers;
  }
  double dof = n - num_speakers;
  Matrix noise_cov = within_scatter / dof;
  speaker_cov = FloorToPd(speaker_cov);
  noise_cov = FloorToPd(noise_cov);

  EmTrace local;
  EmTrace &tr = trace != nullptr ? *trace : local;
  tr = EmTrace{};
  double ll = LogLikelihoodFromStats(speaker_cov, noise_cov, stats, within_scatter);
  tr.log_likelihood.push_back(ll);

  Matrix total_second = Symmetrize(vectors.transpose() * vectors);
  for (int iter = 1; iter <= cfg.max_iters; iter++) {
    std::string at = " at EM iteration " + std::to_string(iter);
    // E-step.  Posterior of u_i given m_i utterances with sum s_i:
    //   cov  = (C_u^-1 + m C_n^-1)^-1 = C_u - m C_u (m C_u + C_n)^-1 C_u
    //   mean = cov C_n^-1 s_i       = C_u (m C_u + C_n)^-1 s_i
    std::map<int, std::pair<Matrix, Matrix>> per_count;  // gain, posterior cov
    Matrix next_speaker = Matrix::Zero(d, d);
    Matrix cross = Matrix::Zero(d, d);  // sum_i (s_i mu^T + mu s_i^T - m mu mu^T)
    Matrix post_cov_weighted = Matrix::Zero(d, d);
    for (const auto &s : stats) {
      auto it = per_count.find(s.count);
      if (it == per_count.end()) {
        Matrix block = s.count * speaker_cov + noise_cov;
        Matrix block_inv;
        try {
          block_inv = SpdInverse(Symmetrize(block), "m C_u + C_n");
        } catch (const Error &) {
          throw Error(ErrorKind::kIllConditioned, "m C_u + C_n singular" + at);
        }
        Matrix gain = speaker_cov * block_inv;
        Matrix post = Symmetrize(speaker_cov - s.count * gain * speaker_cov);
        it = per_count.emplace(s.count, std::make_pair(gain, post)).first;
      }
      Vector mu = it->second.first * s.sum;
      const Matrix &post = it->second.second;
      next_speaker.noalias() += mu * mu.transpose();
      Matrix smu = s.sum * mu.transpose();
      cross.noalias() += smu + smu.transpose() - s.count * mu * mu.transpose();
      if (!cfg.drop_posterior_cov) {
        next_speaker += post;
        post_cov_weighted += s.count * post;
      }
    }
    // M-step.
    next_speaker = Symmetrize(next_speaker / num_speakers);
    Matrix next_noise = Symmetrize((total_second - cross + post_cov_weighted) / n);
    Eigen::LLT<Matrix> noise_check(next_noise);
    if (noise_check.info() != Eigen::Success || !next_noise.allFinite())
      throw Error(ErrorKind::kIllConditioned, "C_n lost positive definiteness" + at);

    double change = std::max(RelativeChange(next_speaker, speaker_cov),
                             RelativeChange(next_noise, noise_cov));
    speaker_cov = std::move(next_speaker);
    noise_cov = std::move(next_noise);
    double next_ll =
        LogLikelihoodFromStats(speaker_cov, noise_cov, stats, within_scatter);
    if (!cfg.drop_posterior_cov && next_ll < ll - 1e-8)
      Warn("EM log-likelihood decreased by " + FormatDouble(ll - next_ll) + at);
    double ll_change = std::abs(next_ll - ll) / std::max(std::abs(ll), 1e-300);
    ll = next_ll;
    tr.log_likelihood.push_back(ll);
    tr.iterations = iter;
    if (cfg.verbose)
      Info("EM iteration " + std::to_string(iter) + ": log-likelihood " +
           FormatDouble(ll) + ", relative change " + FormatDouble(change));
    if (change < cfg.rel_tol && ll_change < cfg.rel_tol) {
      tr.converged = true;
      break;
    }
  }
  return MakeJbModel(speaker_cov, noise_cov);
}

void WriteJb(const JbModel &model, std::ostream &os) {
  os << "jb " << model.Dim() << '\n';
  WriteMatrixRows(os, model.speaker_cov);
  WriteMatrixRows(os, model.noise_cov);
  WriteMatrixRows(os, model.pa);
  WriteMatrixRows(os, model.pg);
}

JbModel ReadJb(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::kParse, "empty JB file");
  auto header = SplitFields(line);
  if (header.size() != 2 || header[0] != "jb")
    throw Error(ErrorKind::kParse, "expected header 'jb <d>'");
  long d = ParseInt(header[1], "JB header");
  if (d < 1) throw Error(ErrorKind::kParse, "invalid JB dimension");
  JbModel m;
  m.speaker_cov = ReadMatrixRows(is, d, d, "C_u");
  m.noise_cov = ReadMatrixRows(is, d, d, "C_n");
  m.pa = ReadMatrixRows(is, d, d, "P_A");
  m.pg = ReadMatrixRows(is, d, d, "P_G");
  auto ag = DeriveAg(m.speaker_cov, m.noise_cov);
  m.a = std::move(ag.a);
  m.g = std::move(ag.g);
  auto check = [](const Matrix &target, const Matrix &factor, const char *name) {
    double err = (target + factor * factor.transpose()).norm();
    if (err > 1e-8 * std::max(1.0, target.norm()))
      throw Error(ErrorKind::kParse, std::string(name) +
                                         " factor does not reproduce the "
                                         "covariance-derived matrix");
  };
  check(m.a, m.pa, "P_A");
  check(m.g, m.pg, "P_G");
  return m;
}

void SaveJb(const JbModel &model, const std::string &path) {
  auto os = OpenForWrite(path);
  WriteJb(model, os);
  if (!os.flush()) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

JbModel LoadJb(const std::string &path) {
  auto is = OpenForRead(path);
  return ReadJb(is);
}

}  // namespace jbhybrid
