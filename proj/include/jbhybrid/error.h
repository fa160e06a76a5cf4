// include/jbhybrid/error.h

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

#ifndef JBHYBRID_ERROR_H_
#define JBHYBRID_ERROR_H_

#include <stdexcept>
#include <string>

namespace jbhybrid {

/// Failure categories raised across the toolkit.  The CLI maps kUsage to
/// exit status 1 and everything else to 2.
enum class ErrorKind {
  kUsage,
  kParse,
  kDuplicateId,
  kMissingReference,
  kIo,
  kShape,
  kConfig,
  kInsufficientClasses,
  kDegenerateScatter,
  kUnidentifiable,
  kIllConditioned,
  kNotNsd,
  kZeroVector,
  kDegenerateBatch,
  kDegenerateCorpus,
  kDegenerateLabels,
  kInvalidCost,
  kNumeric,
};

const char *ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace jbhybrid

#endif  // JBHYBRID_ERROR_H_
