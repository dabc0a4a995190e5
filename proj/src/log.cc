// src/log.cc

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

#include "pxv/log.h"

#include <iostream>
#include <mutex>
#include <utility>

namespace pxv::log {
namespace {

std::mutex g_mutex;
bool g_verbose = false;

void default_sink(Level level, const std::string& message) {
  if (level == Level::kWarning) {
    std::cerr << "WARNING: " << message << '\n';
  } else if (g_verbose) {
    std::cerr << "INFO: " << message << '\n';
  }
}

Sink& sink() {
  static Sink s = default_sink;
  return s;
}

void emit(Level level, const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  sink()(level, message);
}

}  // namespace

Sink set_sink(Sink s) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (!s) s = default_sink;
  return std::exchange(sink(), std::move(s));
}

void set_verbose(bool verbose) {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_verbose = verbose;
}

void warn(const std::string& message) { emit(Level::kWarning, message); }
void info(const std::string& message) { emit(Level::kInfo, message); }

}  // namespace pxv::log
