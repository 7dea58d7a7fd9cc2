// src/io.cc

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

#include "svrbench/io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace svrbench {

namespace {

std::vector<std::string> SplitFields(const std::string &line) {
  std::vector<std::string> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) i++;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') i++;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// Strips a trailing '\r' so CRLF inputs still parse.
std::string Chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string At(const std::string &name, size_t line_no) {
  return name + ":" + std::to_string(line_no);
}

std::ifstream OpenForRead(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string FormatFloat17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double ParseFloat(const std::string &token, const std::string &context) {
  errno = 0;
  char *end = nullptr;
  double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty())
    throw FormatError(context + ": bad float '" + token + "'");
  // strtod reports ERANGE for subnormal results too; only overflow is a
  // parse error (underflow returns the closest representable value).
  if (errno == ERANGE && (value == HUGE_VAL || value == -HUGE_VAL))
    throw FormatError(context + ": float out of range '" + token + "'");
  return value;
}

EmbeddingSet LoadEmbeddings(std::istream &in, const std::string &name) {
  std::string line;
  if (!std::getline(in, line))
    throw FormatError(name + ": empty input, expected an EVEC header");
  line = Chomp(line);

  int dim = 0;
  {
    std::vector<std::string> fields = SplitFields(line);
    if (fields.size() != 4 || fields[0] != "#" || fields[1] != "evec" ||
        fields[2] != "v1" || fields[3].rfind("dim=", 0) != 0)
      throw FormatError(At(name, 1) + ": bad EVEC header '" + line + "'");
    std::string dim_str = fields[3].substr(4);
    char *end = nullptr;
    long parsed = std::strtol(dim_str.c_str(), &end, 10);
    if (end != dim_str.c_str() + dim_str.size() || dim_str.empty() ||
        parsed < 1)
      throw FormatError(At(name, 1) + ": bad dim '" + dim_str + "'");
    dim = static_cast<int>(parsed);
  }

  std::vector<Embedding> items;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    line_no++;
    line = Chomp(line);
    std::vector<std::string> fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() != static_cast<size_t>(dim) + 2)
      throw FormatError(At(name, line_no) + ": expected " +
                        std::to_string(dim + 2) + " fields, got " +
                        std::to_string(fields.size()));
    Embedding e;
    e.utterance_id = fields[0];
    if (fields[1] != "-") e.speaker_id = fields[1];
    e.vector.resize(dim);
    for (int i = 0; i < dim; i++)
      e.vector[i] = ParseFloat(fields[i + 2], At(name, line_no));
    items.push_back(std::move(e));
  }
  // The set constructor enforces finiteness and utterance-id uniqueness;
  // rewrap its complaints so callers see which file was at fault.
  try {
    return EmbeddingSet(dim, std::move(items));
  } catch (const DataError &e) {
    throw FormatError(name + ": " + e.what());
  }
}

EmbeddingSet LoadEmbeddingsFile(const std::string &path) {
  std::ifstream in = OpenForRead(path);
  return LoadEmbeddings(in, path);
}

void SaveEmbeddings(const EmbeddingSet &set, std::ostream &out) {
  out << "# evec v1 dim=" << set.Dim() << "\n";
  for (const Embedding &e : set.Items()) {
    out << e.utterance_id << ' '
        << (e.speaker_id.has_value() ? *e.speaker_id : std::string("-"));
    for (int i = 0; i < e.vector.size(); i++)
      out << ' ' << FormatFloat17(e.vector[i]);
    out << '\n';
  }
}

void SaveEmbeddingsFile(const EmbeddingSet &set, const std::string &path) {
  AtomicWriteFile(path, [&](std::ostream &out) { SaveEmbeddings(set, out); });
}

std::vector<Trial> LoadTrials(std::istream &in, const std::string &name) {
  std::vector<Trial> trials;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    line = Chomp(line);
    std::vector<std::string> fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2 || fields.size() > 3)
      throw FormatError(At(name, line_no) +
                        ": expected 2 or 3 fields, got " +
                        std::to_string(fields.size()));
    Trial t;
    t.enroll_utt = fields[0];
    t.test_utt = fields[1];
    if (fields.size() == 3) {
      if (fields[2] == "target")
        t.label = TrialLabel::kTarget;
      else if (fields[2] == "nontarget")
        t.label = TrialLabel::kNontarget;
      else
        throw FormatError(At(name, line_no) + ": unknown label '" +
                          fields[2] + "'");
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

std::vector<Trial> LoadTrialsFile(const std::string &path) {
  std::ifstream in = OpenForRead(path);
  return LoadTrials(in, path);
}

void SaveTrials(const std::vector<Trial> &trials, std::ostream &out) {
  for (const Trial &t : trials) {
    out << t.enroll_utt << ' ' << t.test_utt;
    if (t.label.has_value())
      out << ' '
          << (*t.label == TrialLabel::kTarget ? "target" : "nontarget");
    out << '\n';
  }
}

void SaveTrialsFile(const std::vector<Trial> &trials,
                    const std::string &path) {
  AtomicWriteFile(path, [&](std::ostream &out) { SaveTrials(trials, out); });
}

ScoreSet LoadScores(std::istream &in, const std::string &name) {
  std::vector<ScoreEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    line = Chomp(line);
    std::vector<std::string> fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() != 3)
      throw FormatError(At(name, line_no) + ": expected 3 fields, got " +
                        std::to_string(fields.size()));
    ScoreEntry e;
    e.enroll_utt = fields[0];
    e.test_utt = fields[1];
    e.score = ParseFloat(fields[2], At(name, line_no));
    entries.push_back(std::move(e));
  }
  return ScoreSet(std::move(entries));
}

ScoreSet LoadScoresFile(const std::string &path) {
  std::ifstream in = OpenForRead(path);
  return LoadScores(in, path);
}

void SaveScores(const ScoreSet &scores, std::ostream &out) {
  for (const ScoreEntry &e : scores.Entries())
    out << e.enroll_utt << ' ' << e.test_utt << ' '
        << FormatFloat17(e.score) << '\n';
}

void SaveScoresFile(const ScoreSet &scores, const std::string &path) {
  AtomicWriteFile(path, [&](std::ostream &out) { SaveScores(scores, out); });
}

void AtomicWriteFile(const std::string &path,
                     const std::function<void(std::ostream &)> &writer) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + tmp.string() +
                                "' for writing");
    writer(out);
    out.flush();
    if (!out) throw FormatError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

}  // namespace svrbench
