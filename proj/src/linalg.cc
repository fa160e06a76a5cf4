// src/linalg.cc

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

#include "jbhybrid/linalg.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "jbhybrid/error.h"

namespace jbhybrid {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kDuplicateId: return "duplicate-id error";
    case ErrorKind::kMissingReference: return "missing-reference error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kInsufficientClasses: return "insufficient-classes error";
    case ErrorKind::kDegenerateScatter: return "degenerate-scatter error";
    case ErrorKind::kUnidentifiable: return "unidentifiable-model error";
    case ErrorKind::kIllConditioned: return "ill-conditioning error";
    case ErrorKind::kNotNsd: return "not-NSD error";
    case ErrorKind::kZeroVector: return "zero-vector error";
    case ErrorKind::kDegenerateBatch: return "degenerate-batch error";
    case ErrorKind::kDegenerateCorpus: return "degenerate-corpus error";
    case ErrorKind::kDegenerateLabels: return "degenerate-labels error";
    case ErrorKind::kInvalidCost: return "invalid-cost error";
    case ErrorKind::kNumeric: return "numeric error";
  }
  return "error";
}

namespace {

double Jitter(const Matrix &m) {
  double mean_diag = m.diagonal().mean();
  return 1e-10 * (mean_diag > 0 ? mean_diag : 1.0);
}

template <class F>
auto WithJitterRetry(const Matrix &m, std::string_view what, F &&use) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success && m.allFinite()) return use(llt);
  Matrix jittered = m;
  jittered.diagonal().array() += Jitter(m);
  Eigen::LLT<Matrix> retry(jittered);
  if (retry.info() != Eigen::Success || !jittered.allFinite())
    throw Error(ErrorKind::kIllConditioned,
                std::string(what) + " is not positive definite");
  return use(retry);
}

}  // namespace

Matrix SpdInverse(const Matrix &m, std::string_view what) {
  return WithJitterRetry(m, what, [&](const Eigen::LLT<Matrix> &llt) {
    Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
    return Matrix(Symmetrize(inv));
  });
}

double SpdLogDet(const Matrix &m, std::string_view what) {
  return WithJitterRetry(m, what, [](const Eigen::LLT<Matrix> &llt) {
    Matrix l = llt.matrixL();
    return 2.0 * l.diagonal().array().log().sum();
  });
}

double MinEigenvalue(const Matrix &m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Symmetrize(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteVector(std::ostream &os, const Vector &v) {
  for (Eigen::Index i = 0; i < v.size(); i++) {
    if (i > 0) os << ' ';
    os << FormatDouble(v(i));
  }
  os << '\n';
}

void WriteMatrixRows(std::ostream &os, const Matrix &m) {
  for (Eigen::Index r = 0; r < m.rows(); r++) WriteVector(os, m.row(r));
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() &&
           (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
      pos++;
    size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' &&
           line[pos] != '\r')
      pos++;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

double ParseDouble(std::string_view token, const std::string &context) {
  double v = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(v))
    throw Error(ErrorKind::kParse, context + ": bad number '" +
                                       std::string(token) + "'");
  return v;
}

long ParseInt(std::string_view token, const std::string &context) {
  long v = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw Error(ErrorKind::kParse, context + ": bad integer '" +
                                       std::string(token) + "'");
  return v;
}

Vector ReadVectorLine(std::istream &is, int n, const std::string &what) {
  std::string line;
  while (std::getline(is, line)) {
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (static_cast<int>(fields.size()) != n)
      throw Error(ErrorKind::kParse, what + ": expected " + std::to_string(n) +
                                         " values, got " +
                                         std::to_string(fields.size()));
    Vector v(n);
    for (int i = 0; i < n; i++) v(i) = ParseDouble(fields[i], what);
    return v;
  }
  throw Error(ErrorKind::kParse, what + ": unexpected end of file");
}

Matrix ReadMatrixRows(std::istream &is, int rows, int cols,
                      const std::string &what) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; r++)
    m.row(r) = ReadVectorLine(is, cols, what + " row " + std::to_string(r));
  return m;
}

}  // namespace jbhybrid
