// pxv/log.h

// Copyright 2026  The pxv Authors

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

#ifndef PXV_LOG_H_
#define PXV_LOG_H_

#include <functional>
#include <string>

namespace pxv::log {

enum class Level { kWarning, kInfo, kDebug };

using Sink = std::function<void(Level, const std::string&)>;

/// Replaces the process-wide sink (default: stderr, warnings only).
/// Returns the previous sink.
Sink set_sink(Sink sink);
void set_verbose(bool verbose);

void warn(const std::string& message);
void info(const std::string& message);

}  // namespace pxv::log

#endif  // PXV_LOG_H_
