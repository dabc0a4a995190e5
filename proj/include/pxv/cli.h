// pxv/cli.h

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

// The pxv command line:
//
//   pxv [--config FILE] [--seed N] [--verbose] <command>
//
//   synth     generate the synthetic training (and evaluation) corpus
//   train     train a baseline, pv or mt-n network
//   extract   write embeddings for the training and/or evaluation archive
//   backend   train LDA + PLDA on training embeddings
//   score     score the trial list
//   eval      compute EER / minDCF from scores
//
// Exit codes: 0 success, 2 configuration or usage error, 3 I/O failure or
// artifact mismatch, 4 degenerate data for a metric.

#ifndef PXV_CLI_H_
#define PXV_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace pxv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitMetric = 4;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace pxv

#endif  // PXV_CLI_H_
