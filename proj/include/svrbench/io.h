// include/svrbench/io.h

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

#ifndef SVRBENCH_IO_H_
#define SVRBENCH_IO_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "svrbench/types.h"

namespace svrbench {

// Text formats (UTF-8, LF line endings, single-space separated fields):
//
//   EVEC    line 1: "# evec v1 dim=<d>", then one embedding per line:
//           "<utterance_id> <speaker_id|-> <v1> ... <vd>".
//           "-" marks an unknown speaker.
//   TRIALS  "<enroll_utt> <test_utt>[ <target|nontarget>]"
//   SCORES  "<enroll_utt> <test_utt> <score>"
//
// Floats are written with 17 significant digits, which round-trips IEEE
// doubles exactly; loading what was saved reproduces the values bit for bit.

EmbeddingSet LoadEmbeddings(std::istream &in,
                            const std::string &name = "<stream>");
EmbeddingSet LoadEmbeddingsFile(const std::string &path);
void SaveEmbeddings(const EmbeddingSet &set, std::ostream &out);
void SaveEmbeddingsFile(const EmbeddingSet &set, const std::string &path);

std::vector<Trial> LoadTrials(std::istream &in,
                              const std::string &name = "<stream>");
std::vector<Trial> LoadTrialsFile(const std::string &path);
void SaveTrials(const std::vector<Trial> &trials, std::ostream &out);
void SaveTrialsFile(const std::vector<Trial> &trials,
                    const std::string &path);

ScoreSet LoadScores(std::istream &in, const std::string &name = "<stream>");
ScoreSet LoadScoresFile(const std::string &path);
void SaveScores(const ScoreSet &scores, std::ostream &out);
void SaveScoresFile(const ScoreSet &scores, const std::string &path);

// "%.17g" formatting used by every writer in the project.
std::string FormatFloat17(double value);

// Parses a decimal or scientific-notation float; the whole token must be
// consumed.  Throws FormatError mentioning `context`.
double ParseFloat(const std::string &token, const std::string &context);

// Writes via a temporary file in the same directory followed by a rename,
// so readers never observe a partially written file.
void AtomicWriteFile(const std::string &path,
                     const std::function<void(std::ostream &)> &writer);

}  // namespace svrbench

#endif  // SVRBENCH_IO_H_
