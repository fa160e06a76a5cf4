// include/jbhybrid/synth.h

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

#ifndef JBHYBRID_SYNTH_H_
#define JBHYBRID_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "jbhybrid/corpus.h"
#include "jbhybrid/linalg.h"

namespace jbhybrid {

/// How to build one covariance matrix.
struct CovarianceRecipe {
  enum class Kind { kIsotropic, kDiagonal, kRandomSpd };
  Kind kind = Kind::kIsotropic;
  double variance = 1.0;          // kIsotropic: sigma^2
  std::vector<double> diagonal;   // kDiagonal
  std::uint64_t seed = 0;         // kRandomSpd
  double condition_cap = 10.0;    // kRandomSpd: lambda_max / lambda_min bound
  double scale = 1.0;             // kRandomSpd: smallest possible eigenvalue

  static CovarianceRecipe Isotropic(double variance);
  static CovarianceRecipe Diagonal(std::vector<double> diagonal);
  static CovarianceRecipe RandomSpd(std::uint64_t seed, double cap,
                                    double scale = 1.0);
};

struct Mismatch {
  enum class Kind { kNone, kHeavyTail, kChannelShift };
  Kind kind = Kind::kNone;
  double dof = 4.0;          // kHeavyTail, must exceed 2
  double fraction = 0.5;     // kChannelShift
  double offset_norm = -1;   // kChannelShift; <= 0 means sqrt(tr C_n)
  // The offset direction is a property of the channel, not of one corpus:
  // corpora generated with the same offset_seed share it.
  std::uint64_t offset_seed = 1;
};

struct SynthConfig {
  int n_speakers = 100;
  int utts_min = 10;
  int utts_max = 10;  // utterances per speaker drawn uniformly in [min, max]
  int dim = 16;
  CovarianceRecipe speaker_cov = CovarianceRecipe::Isotropic(1.0);
  CovarianceRecipe noise_cov = CovarianceRecipe::Isotropic(1.0);
  Mismatch mismatch;
  std::uint64_t seed = 0;
  std::string id_prefix;  // prepended to generated speaker/utterance ids
};

struct Covariances {
  Matrix speaker;
  Matrix noise;
};

struct SynthCorpus {
  EmbeddingSet set;
  Covariances truth;
  Matrix speaker_vectors;  // the drawn u, one row per speaker
};

// Throws kConfig on an invalid recipe; `psd_only` admits a zero matrix.
Matrix MakeCovariance(const CovarianceRecipe &recipe, int dim, bool psd_only);
Covariances MakeCovariances(const SynthConfig &cfg);

SynthCorpus Generate(const SynthConfig &cfg);

}  // namespace jbhybrid

#endif  // JBHYBRID_SYNTH_H_
