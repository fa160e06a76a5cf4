// src/log.cc

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

#include "jbhybrid/log.h"

#include <iostream>
#include <utility>

namespace jbhybrid {

namespace {
LogSink &Sink() {
  static LogSink sink;
  return sink;
}
bool g_verbose = false;
}  // namespace

LogSink SetWarningSink(LogSink sink) { return std::exchange(Sink(), std::move(sink)); }

void Warn(const std::string &message) {
  if (Sink())
    Sink()(message);
  else
    std::cerr << "WARNING: " << message << '\n';
}

void Info(const std::string &message) {
  if (g_verbose) std::cerr << "LOG: " << message << '\n';
}

void SetVerbose(bool verbose) { g_verbose = verbose; }

}  // namespace jbhybrid
