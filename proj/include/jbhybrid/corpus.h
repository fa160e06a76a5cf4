// include/jbhybrid/corpus.h

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

#ifndef JBHYBRID_CORPUS_H_
#define JBHYBRID_CORPUS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "jbhybrid/linalg.h"

namespace jbhybrid {

/// A labeled collection of fixed-dimension embeddings.  Row k of vectors()
/// belongs to utterance ids()[k] spoken by speakers()[k].  Immutable once
/// constructed; the constructor enforces unique ids and N >= 1.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::vector<std::string> ids, std::vector<std::string> speakers,
               Matrix vectors);

  int Size() const { return static_cast<int>(ids_.size()); }
  int Dim() const { return static_cast<int>(vectors_.cols()); }
  const std::vector<std::string> &ids() const { return ids_; }
  const std::vector<std::string> &speakers() const { return speakers_; }
  const Matrix &vectors() const { return vectors_; }

  // Returns -1 when the id is unknown.
  int IndexOf(const std::string &id) const;

  // Utterance indices grouped by speaker, speakers in order of first
  // appearance.
  const std::vector<std::vector<int>> &SpeakerGroups() const { return groups_; }
  int NumSpeakers() const { return static_cast<int>(groups_.size()); }
  // Index into SpeakerGroups() for utterance k.
  int SpeakerIndex(int k) const { return speaker_index_[k]; }

  EmbeddingSet Subset(const std::vector<int> &rows) const;
  // Same ids and speakers, different vectors (same row count required).
  EmbeddingSet WithVectors(Matrix vectors) const;

  bool operator==(const EmbeddingSet &other) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> speakers_;
  Matrix vectors_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> speaker_index_;
};

enum class TrialLabel { kSame, kDifferent };

struct Trial {
  std::string enroll_id;
  std::string test_id;
  std::optional<TrialLabel> label;

  bool operator==(const Trial &) const = default;
};

using TrialList = std::vector<Trial>;

struct ScoreSet {
  TrialList trials;
  std::vector<double> scores;

  int Size() const { return static_cast<int>(scores.size()); }
};

EmbeddingSet ReadEmbeddings(std::istream &is);
void WriteEmbeddings(const EmbeddingSet &set, std::ostream &os);
EmbeddingSet LoadEmbeddings(const std::string &path);
void SaveEmbeddings(const EmbeddingSet &set, const std::string &path);

// With `set` == nullptr the id check is deferred to the caller.
TrialList ReadTrials(std::istream &is, const EmbeddingSet *set);
void WriteTrials(const TrialList &trials, std::ostream &os);
TrialList LoadTrials(const std::string &path, const EmbeddingSet *set);
void SaveTrials(const TrialList &trials, const std::string &path);

ScoreSet ReadScores(std::istream &is);
void WriteScores(const ScoreSet &scores, std::ostream &os);
ScoreSet LoadScores(const std::string &path);
void SaveScores(const ScoreSet &scores, const std::string &path);

// Copies labels from `trials` onto a score set read from disk, matching by
// position and checking that ids agree.
void AttachLabels(const TrialList &trials, ScoreSet *scores);

// Opens files with kIo errors on failure.
std::ifstream OpenForRead(const std::string &path);
std::ofstream OpenForWrite(const std::string &path);

}  // namespace jbhybrid

#endif  // JBHYBRID_CORPUS_H_
