// include/jbhybrid/jb.h

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

#ifndef JBHYBRID_JB_H_
#define JBHYBRID_JB_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "jbhybrid/corpus.h"
#include "jbhybrid/linalg.h"

namespace jbhybrid {

/// Joint Bayesian model x = u + n, u ~ N(0, C_u), n ~ N(0, C_n).
/// A and G are the quadratic scoring matrices; P_A, P_G their factors
/// with A = -P_A P_A^T, G = -P_G P_G^T.
struct JbModel {
  Matrix speaker_cov;  // C_u
  Matrix noise_cov;    // C_n
  Matrix a;
  Matrix g;
  Matrix pa;
  Matrix pg;

  int Dim() const { return static_cast<int>(speaker_cov.rows()); }
};

struct EmConfig {
  int max_iters = 200;
  double rel_tol = 1e-6;
  bool verbose = false;
  // Drop the posterior-covariance terms from the M-step (the cheaper
  // "EM-like" update); the likelihood is then no longer guaranteed to rise.
  bool drop_posterior_cov = false;
};

struct EmTrace {
  std::vector<double> log_likelihood;  // entry 0 is the initial model
  int iterations = 0;
  bool converged = false;
};

// Builds a complete model (A, G, factors) from the two covariances.
JbModel MakeJbModel(const Matrix &speaker_cov, const Matrix &noise_cov);

// Maximum-likelihood fit of (C_u, C_n) by EM.  `vectors` rows are centered
// observations; `speakers` gives one label per row.
JbModel FitJbEm(const Matrix &vectors, const std::vector<std::string> &speakers,
                const EmConfig &cfg, EmTrace *trace = nullptr);

// Sum over speakers of log N(stacked utterances; 0, block covariance) with
// diagonal blocks C_u + C_n and off-diagonal blocks C_u.
double JbLogLikelihood(const JbModel &model, const Matrix &vectors,
                       const std::vector<std::string> &speakers);
double JbLogLikelihood(const Matrix &speaker_cov, const Matrix &noise_cov,
                       const Matrix &vectors,
                       const std::vector<std::string> &speakers);

struct ScoringMatrices {
  Matrix a;
  Matrix g;
};

// A = (C_u+C_n)^-1 - [(C_u+C_n) - C_u (C_u+C_n)^-1 C_u]^-1,
// G = -(2 C_u + C_n)^-1 C_u C_n^-1 (symmetrized).
ScoringMatrices DeriveAg(const Matrix &speaker_cov, const Matrix &noise_cov);

// Returns P (d x d) with -P P^T == m for symmetric negative semi-definite m.
Matrix FactorizeNsd(const Matrix &m);

// r = h_i^T A h_i + h_j^T A h_j - 2 h_i^T G h_j.
double ScoreLlr(const JbModel &model, const Vector &hi, const Vector &hj);
// r = 2 g_i^T g_j - a_i^T a_i - a_j^T a_j, a = P_A^T h, g = P_G^T h.
double ScoreLlrFactored(const Matrix &pa, const Matrix &pg, const Vector &hi,
                        const Vector &hj);

// log N([h_i; h_j]; 0, cov_S) - log N([h_i; h_j]; 0, cov_D) evaluated with
// dense 2d x 2d algebra.  Reference implementation for tests.
double OracleLlrDensity(const Matrix &speaker_cov, const Matrix &noise_cov,
                        const Vector &hi, const Vector &hj);

void WriteJb(const JbModel &model, std::ostream &os);
JbModel ReadJb(std::istream &is);
void SaveJb(const JbModel &model, const std::string &path);
JbModel LoadJb(const std::string &path);

}  // namespace jbhybrid

#endif  // JBHYBRID_JB_H_
