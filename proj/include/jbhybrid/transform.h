// include/jbhybrid/transform.h

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

#ifndef JBHYBRID_TRANSFORM_H_
#define JBHYBRID_TRANSFORM_H_

#include <iosfwd>
#include <string>

#include "jbhybrid/corpus.h"
#include "jbhybrid/linalg.h"

namespace jbhybrid {

/// Mean-centering LDA projection h = W^T (x - mean), W is l x d.
struct LdaTransform {
  Vector mean;
  Matrix projection;
  // Generalized eigenvalues of the retained directions, descending.  Only
  // populated by FitLda; empty after a load.
  Vector eigenvalues;
  // Inputs are length-normalized before centering (see LdaOptions).
  bool pre_normalize = false;

  int InputDim() const { return static_cast<int>(projection.rows()); }
  int OutputDim() const { return static_cast<int>(projection.cols()); }
};

struct LdaOptions {
  // Relative ridge added to the within-class scatter diagonal:
  // epsilon * tr(S_w) / l.
  double epsilon = 1e-6;
  // Length-normalize the inputs before estimating (off by default).
  bool pre_normalize = false;
};

struct Scatter {
  Vector mean;
  Matrix within;
  Matrix between;
};

// S_w = sum_s sum_u (x - mu_s)(x - mu_s)^T / N,
// S_b = sum_s (N_s / N)(mu_s - mu)(mu_s - mu)^T.
Scatter ComputeScatter(const EmbeddingSet &set);

LdaTransform FitLda(const EmbeddingSet &set, int dim,
                    const LdaOptions &opts = {});

Vector ApplyLda(const LdaTransform &t, const Vector &x);
// Row-wise version; rows of `x` are inputs.
Matrix ApplyLdaRows(const LdaTransform &t, const Matrix &x);

// h / ||h||; throws kZeroVector when ||h|| < 1e-12.
Vector LengthNormalize(const Vector &h);
Matrix LengthNormalizeRows(const Matrix &h);

// LDA followed by length normalization, the front half of the backend.
Matrix PipelineRows(const LdaTransform &t, const Matrix &x);

void WriteLda(const LdaTransform &t, std::ostream &os);
LdaTransform ReadLda(std::istream &is);
void SaveLda(const LdaTransform &t, const std::string &path);
LdaTransform LoadLda(const std::string &path);

}  // namespace jbhybrid

#endif  // JBHYBRID_TRANSFORM_H_
