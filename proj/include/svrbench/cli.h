// include/svrbench/cli.h

// Copyright 2026  SVRBench Authors

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

#ifndef SVRBENCH_CLI_H_
#define SVRBENCH_CLI_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "svrbench/metrics.h"

namespace svrbench {

// Runs one subcommand; args excludes the program name.  Returns 0 on
// success, 1 on usage errors, 2 on data/format errors, and 3 on numerical
// failures, with a one-line diagnostic on `err`.
int RunCommand(const std::vector<std::string> &args, std::ostream &out,
               std::ostream &err);

// Experiment summary: one row per method, one (EER %, minDCF) column pair
// per enrollment mode.  EER prints as a percentage with one decimal,
// minDCF with two.  Throws MissingCell when a requested cell is absent.
std::string FormatSummaryTable(
    const std::vector<std::string> &methods,
    const std::vector<std::string> &modes,
    const std::map<std::pair<std::string, std::string>, MetricsReport>
        &cells);

}  // namespace svrbench

#endif  // SVRBENCH_CLI_H_
