// src/corpus.cc

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

#include "jbhybrid/corpus.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "jbhybrid/error.h"

namespace jbhybrid {

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids,
                           std::vector<std::string> speakers, Matrix vectors)
    : ids_(std::move(ids)),
      speakers_(std::move(speakers)),
      vectors_(std::move(vectors)) {
  if (ids_.empty())
    throw Error(ErrorKind::kShape, "embedding set must have at least one row");
  if (ids_.size() != speakers_.size() ||
      static_cast<Eigen::Index>(ids_.size()) != vectors_.rows())
    throw Error(ErrorKind::kShape, "ids, speakers and vectors disagree in size");
  if (vectors_.cols() < 1)
    throw Error(ErrorKind::kShape, "embedding dimension must be >= 1");
  std::unordered_map<std::string, int> speaker_pos;
  speaker_index_.resize(ids_.size());
  for (int k = 0; k < Size(); k++) {
    if (!index_.emplace(ids_[k], k).second)
      throw Error(ErrorKind::kDuplicateId, "duplicate utterance id '" +
                                               ids_[k] + "'");
    auto [it, inserted] =
        speaker_pos.emplace(speakers_[k], static_cast<int>(groups_.size()));
    if (inserted) groups_.emplace_back();
    groups_[it->second].push_back(k);
    speaker_index_[k] = it->second;
  }
}

int EmbeddingSet::IndexOf(const std::string &id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

EmbeddingSet EmbeddingSet::Subset(const std::vector<int> &rows) const {
  std::vector<std::string> ids, speakers;
  Matrix v(rows.size(), Dim());
  for (size_t r = 0; r < rows.size(); r++) {
    ids.push_back(ids_[rows[r]]);
    speakers.push_back(speakers_[rows[r]]);
    v.row(r) = vectors_.row(rows[r]);
  }
  return EmbeddingSet(std::move(ids), std::move(speakers), std::move(v));
}

EmbeddingSet EmbeddingSet::WithVectors(Matrix vectors) const {
  return EmbeddingSet(ids_, speakers_, std::move(vectors));
}

bool EmbeddingSet::operator==(const EmbeddingSet &other) const {
  return ids_ == other.ids_ && speakers_ == other.speakers_ &&
         vectors_.rows() == other.vectors_.rows() &&
         vectors_.cols() == other.vectors_.cols() &&
         vectors_ == other.vectors_;
}

std::ifstream OpenForRead(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  return is;
}

std::ofstream OpenForWrite(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  return os;
}

namespace {

void CheckWritten(std::ostream &os, const std::string &path) {
  os.flush();
  if (!os) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

}  // namespace

EmbeddingSet ReadEmbeddings(std::istream &is) {
  std::vector<std::string> ids, speakers;
  std::vector<double> values;
  int dim = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    if (fields.size() < 3)
      throw Error(ErrorKind::kParse, where + ": expected <utt> <spk> <v1> ...");
    int n = static_cast<int>(fields.size()) - 2;
    if (dim < 0) dim = n;
    if (n != dim)
      throw Error(ErrorKind::kParse, where + ": dimension " + std::to_string(n) +
                                         " differs from " + std::to_string(dim));
    for (int i = 0; i < n; i++) values.push_back(ParseDouble(fields[i + 2], where));
    ids.emplace_back(fields[0]);
    speakers.emplace_back(fields[1]);
  }
  if (ids.empty()) throw Error(ErrorKind::kParse, "no embeddings in input");
  Matrix v = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                      Eigen::RowMajor>>(values.data(),
                                                        ids.size(), dim);
  return EmbeddingSet(std::move(ids), std::move(speakers), std::move(v));
}

void WriteEmbeddings(const EmbeddingSet &set, std::ostream &os) {
  for (int k = 0; k < set.Size(); k++) {
    os << set.ids()[k] << ' ' << set.speakers()[k];
    for (int i = 0; i < set.Dim(); i++)
      os << ' ' << FormatDouble(set.vectors()(k, i));
    os << '\n';
  }
}

EmbeddingSet LoadEmbeddings(const std::string &path) {
  auto is = OpenForRead(path);
  return ReadEmbeddings(is);
}

void SaveEmbeddings(const EmbeddingSet &set, const std::string &path) {
  auto os = OpenForWrite(path);
  WriteEmbeddings(set, os);
  CheckWritten(os, path);
}

TrialList ReadTrials(std::istream &is, const EmbeddingSet *set) {
  TrialList trials;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 2 && fields.size() != 3)
      throw Error(ErrorKind::kParse, where + ": expected <enroll> <test> [label]");
    Trial t{std::string(fields[0]), std::string(fields[1]), std::nullopt};
    if (fields.size() == 3) {
      if (fields[2] == "target")
        t.label = TrialLabel::kSame;
      else if (fields[2] == "nontarget")
        t.label = TrialLabel::kDifferent;
      else
        throw Error(ErrorKind::kParse, where + ": bad label '" +
                                           std::string(fields[2]) + "'");
    }
    if (set != nullptr) {
      for (const auto &id : {t.enroll_id, t.test_id})
        if (set->IndexOf(id) < 0)
          throw Error(ErrorKind::kMissingReference,
                      where + ": unknown utterance id '" + id + "'");
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

void WriteTrials(const TrialList &trials, std::ostream &os) {
  for (const auto &t : trials) {
    os << t.enroll_id << ' ' << t.test_id;
    if (t.label)
      os << (*t.label == TrialLabel::kSame ? " target" : " nontarget");
    os << '\n';
  }
}

TrialList LoadTrials(const std::string &path, const EmbeddingSet *set) {
  auto is = OpenForRead(path);
  return ReadTrials(is, set);
}

void SaveTrials(const TrialList &trials, const std::string &path) {
  auto os = OpenForWrite(path);
  WriteTrials(trials, os);
  CheckWritten(os, path);
}

ScoreSet ReadScores(std::istream &is) {
  ScoreSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 3)
      throw Error(ErrorKind::kParse, where + ": expected <enroll> <test> <score>");
    out.trials.push_back(
        Trial{std::string(fields[0]), std::string(fields[1]), std::nullopt});
    out.scores.push_back(ParseDouble(fields[2], where));
  }
  return out;
}

void WriteScores(const ScoreSet &scores, std::ostream &os) {
  if (scores.trials.size() != scores.scores.size())
    throw Error(ErrorKind::kShape, "score set has mismatched trial/score counts");
  for (size_t k = 0; k < scores.scores.size(); k++)
    os << scores.trials[k].enroll_id << ' ' << scores.trials[k].test_id << ' '
       << FormatDouble(scores.scores[k]) << '\n';
}

ScoreSet LoadScores(const std::string &path) {
  auto is = OpenForRead(path);
  return ReadScores(is);
}

void SaveScores(const ScoreSet &scores, const std::string &path) {
  auto os = OpenForWrite(path);
  WriteScores(scores, os);
  CheckWritten(os, path);
}

void AttachLabels(const TrialList &trials, ScoreSet *scores) {
  if (trials.size() != scores->trials.size())
    throw Error(ErrorKind::kShape, "trial list has " +
                                       std::to_string(trials.size()) +
                                       " entries but score file has " +
                                       std::to_string(scores->trials.size()));
  for (size_t k = 0; k < trials.size(); k++) {
    auto &st = scores->trials[k];
    if (st.enroll_id != trials[k].enroll_id || st.test_id != trials[k].test_id)
      throw Error(ErrorKind::kMissingReference,
                  "score line " + std::to_string(k + 1) +
                      " does not match the trial list");
    st.label = trials[k].label;
  }
}

}  // namespace jbhybrid
