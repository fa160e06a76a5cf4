// include/jbhybrid/log.h

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

#ifndef JBHYBRID_LOG_H_
#define JBHYBRID_LOG_H_

#include <functional>
#include <string>

namespace jbhybrid {

using LogSink = std::function<void(const std::string &)>;

// Warnings go to stderr unless a sink is installed.  Returns the old sink.
LogSink SetWarningSink(LogSink sink);
void Warn(const std::string &message);
void Info(const std::string &message);
void SetVerbose(bool verbose);

}  // namespace jbhybrid

#endif  // JBHYBRID_LOG_H_
