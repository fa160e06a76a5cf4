// include/jbhybrid/linalg.h

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

#ifndef JBHYBRID_LINALG_H_
#define JBHYBRID_LINALG_H_

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace jbhybrid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix Symmetrize(const Matrix &m) { return 0.5 * (m + m.transpose()); }

// Inverse of a symmetric positive-definite matrix through a Cholesky solve.
// If the factorization fails, the diagonal is jittered once by
// 1e-10 * mean(diag) before giving up with kIllConditioned.
Matrix SpdInverse(const Matrix &m, std::string_view what);

// log|m| for symmetric positive-definite m, same jitter policy.
double SpdLogDet(const Matrix &m, std::string_view what);

// Smallest eigenvalue of a symmetric matrix.
double MinEigenvalue(const Matrix &m);

// Text helpers shared by every file format in the toolkit.  Doubles are
// written with 17 significant digits so that they round-trip exactly.
std::string FormatDouble(double v);
void WriteVector(std::ostream &os, const Vector &v);
void WriteMatrixRows(std::ostream &os, const Matrix &m);

std::vector<std::string_view> SplitFields(std::string_view line);
// Throws kParse mentioning `context` when the token is not a finite real.
double ParseDouble(std::string_view token, const std::string &context);
long ParseInt(std::string_view token, const std::string &context);

// Reads one non-empty line from `is` and parses exactly `n` reals from it.
Vector ReadVectorLine(std::istream &is, int n, const std::string &what);
Matrix ReadMatrixRows(std::istream &is, int rows, int cols,
                      const std::string &what);

}  // namespace jbhybrid

#endif  // JBHYBRID_LINALG_H_
