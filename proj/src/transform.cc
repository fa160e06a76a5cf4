// src/transform.cc

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

#include "jbhybrid/transform.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "jbhybrid/error.h"
#include "jbhybrid/log.h"

namespace jbhybrid {

Scatter ComputeScatter(const EmbeddingSet &set) {
  const Matrix &x = set.vectors();
  const int n = set.Size(), l = set.Dim();
  Scatter s;
  s.mean = x.colwise().mean().transpose();
  s.within = Matrix::Zero(l, l);
  s.between = Matrix::Zero(l, l);
  for (const auto &group : set.SpeakerGroups()) {
    Vector mu = Vector::Zero(l);
    for (int k : group) mu += x.row(k).transpose();
    mu /= group.size();
    Matrix centered(group.size(), l);
    for (size_t r = 0; r < group.size(); r++)
      centered.row(r) = x.row(group[r]) - mu.transpose();
    s.within.noalias() += centered.transpose() * centered;
    Vector diff = mu - s.mean;
    s.between.noalias() += static_cast<double>(group.size()) * diff * diff.transpose();
  }
  s.within = Symmetrize(s.within / n);
  s.between = Symmetrize(s.between / n);
  return s;
}

LdaTransform FitLda(const EmbeddingSet &set, int dim, const LdaOptions &opts) {
  const int l = set.Dim();
  if (set.NumSpeakers() < 2)
    throw Error(ErrorKind::kInsufficientClasses,
                "LDA needs at least 2 speakers, got " +
                    std::to_string(set.NumSpeakers()));
  if (dim < 1 || dim > l)
    throw Error(ErrorKind::kShape, "LDA output dimension " + std::to_string(dim) +
                                       " not in [1, " + std::to_string(l) + "]");
  if (dim > set.NumSpeakers() - 1)
    Warn("LDA output dimension " + std::to_string(dim) +
         " exceeds #speakers - 1 = " + std::to_string(set.NumSpeakers() - 1));

  EmbeddingSet input = opts.pre_normalize
                           ? set.WithVectors(LengthNormalizeRows(set.vectors()))
                           : set;
  Scatter s = ComputeScatter(input);
  double trace_w = s.within.trace();
  if (!(trace_w > 0.0) || !(s.between.trace() > 0.0))
    throw Error(ErrorKind::kDegenerateScatter,
                "within- or between-class scatter vanishes");
  Matrix within = s.within;
  within.diagonal().array() += opts.epsilon * trace_w / l;

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(s.between, within);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorKind::kIllConditioned, "generalized eigensolve failed");
  const Vector &evals = ges.eigenvalues();
  const Matrix &evecs = ges.eigenvectors();

  std::vector<int> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return evals(a) > evals(b); });

  LdaTransform t;
  t.mean = s.mean;
  t.pre_normalize = opts.pre_normalize;
  t.projection.resize(l, dim);
  t.eigenvalues.resize(dim);
  for (int c = 0; c < dim; c++) {
    Vector w = evecs.col(order[c]);
    Eigen::Index arg = 0;
    w.cwiseAbs().maxCoeff(&arg);
    if (w(arg) < 0) w = -w;
    t.projection.col(c) = w;
    t.eigenvalues(c) = evals(order[c]);
  }
  if (!t.projection.allFinite())
    throw Error(ErrorKind::kNumeric, "LDA projection has non-finite entries");
  return t;
}

Vector ApplyLda(const LdaTransform &t, const Vector &x) {
  if (x.size() != t.InputDim())
    throw Error(ErrorKind::kShape, "LDA input has dimension " +
                                       std::to_string(x.size()) + ", expected " +
                                       std::to_string(t.InputDim()));
  if (t.pre_normalize) return t.projection.transpose() * (LengthNormalize(x) - t.mean);
  return t.projection.transpose() * (x - t.mean);
}

Matrix ApplyLdaRows(const LdaTransform &t, const Matrix &x) {
  if (x.cols() != t.InputDim())
    throw Error(ErrorKind::kShape, "LDA input has dimension " +
                                       std::to_string(x.cols()) + ", expected " +
                                       std::to_string(t.InputDim()));
  Matrix in = t.pre_normalize ? LengthNormalizeRows(x) : x;
  return (in.rowwise() - t.mean.transpose()) * t.projection;
}

Vector LengthNormalize(const Vector &h) {
  double norm = h.norm();
  if (!(norm >= 1e-12))
    throw Error(ErrorKind::kZeroVector, "cannot length-normalize a vector of norm " +
                                            FormatDouble(norm));
  return h / norm;
}

Matrix LengthNormalizeRows(const Matrix &h) {
  Matrix out(h.rows(), h.cols());
  for (Eigen::Index r = 0; r < h.rows(); r++)
    out.row(r) = LengthNormalize(h.row(r).transpose()).transpose();
  return out;
}

Matrix PipelineRows(const LdaTransform &t, const Matrix &x) {
  return LengthNormalizeRows(ApplyLdaRows(t, x));
}

void WriteLda(const LdaTransform &t, std::ostream &os) {
  os << "lda " << t.InputDim() << ' ' << t.OutputDim();
  if (t.pre_normalize) os << " prenorm";
  os << '\n';
  WriteVector(os, t.mean);
  for (int c = 0; c < t.OutputDim(); c++) WriteVector(os, t.projection.col(c));
}

LdaTransform ReadLda(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::kParse, "empty LDA file");
  auto header = SplitFields(line);
  if ((header.size() != 3 && header.size() != 4) || header[0] != "lda" ||
      (header.size() == 4 && header[3] != "prenorm"))
    throw Error(ErrorKind::kParse, "expected header 'lda <l> <d>'");
  long l = ParseInt(header[1], "LDA header"), d = ParseInt(header[2], "LDA header");
  if (l < 1 || d < 1 || d > l)
    throw Error(ErrorKind::kParse, "invalid LDA dimensions");
  LdaTransform t;
  t.pre_normalize = header.size() == 4;
  t.mean = ReadVectorLine(is, l, "LDA mean");
  t.projection.resize(l, d);
  for (int c = 0; c < d; c++)
    t.projection.col(c) = ReadVectorLine(is, l, "LDA column " + std::to_string(c));
  return t;
}

void SaveLda(const LdaTransform &t, const std::string &path) {
  auto os = OpenForWrite(path);
  WriteLda(t, os);
  if (!os.flush()) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

LdaTransform LoadLda(const std::string &path) {
  auto is = OpenForRead(path);
  return ReadLda(is);
}

}  // namespace jbhybrid
