// src/corpus.cc

// Copyright 2026  The childtts Authors

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

#include "childtts/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "childtts/common.h"
#include "json.hpp"

namespace childtts::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

const char *SplitTagName(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kTest: return "test";
    case SplitTag::kSynth: return "synth";
  }
  return "?";
}

double CorpusManifest::TotalHours() const {
  double seconds = 0.0;
  for (const auto &r : records) seconds += r.duration_s;
  return seconds / 3600.0;
}

fs::path CorpusManifest::ResolveAudio(const UtteranceRecord &r) const {
  fs::path p(r.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::vector<std::string> CorpusManifest::Speakers() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto &r : records)
    if (seen.insert(r.speaker_id).second) out.push_back(r.speaker_id);
  return out;
}

namespace {

bool SupportedRate(int sr) { return sr == 16000 || sr == 22050 || sr == 24000; }

void ValidateRecord(const UtteranceRecord &r, const std::string &where) {
  if (r.id.empty()) Fail(ErrorKind::kValidation, where + ": empty id");
  if (!(r.duration_s > 0.0))
    Fail(ErrorKind::kValidation,
         where + ": utterance '" + r.id + "' has non-positive duration_s");
  if (!SupportedRate(r.sample_rate))
    Fail(ErrorKind::kValidation, where + ": utterance '" + r.id +
                                     "' has unsupported sample_rate " +
                                     std::to_string(r.sample_rate));
  if (r.speaker_id.empty())
    Fail(ErrorKind::kValidation, where + ": utterance '" + r.id + "' has empty speaker");
  try {
    NormalizeText(r.transcript);
  } catch (const Error &) {
    Fail(ErrorKind::kValidation,
         where + ": utterance '" + r.id + "' transcript is empty after normalization");
  }
}

const std::array<const char *, 6> kManifestKeys = {
    "audio_path", "duration_s", "id", "sample_rate", "speaker", "text"};

}  // namespace

void ValidateManifest(const CorpusManifest &m) {
  std::unordered_set<std::string> ids;
  for (size_t i = 0; i < m.records.size(); ++i) {
    const auto &r = m.records[i];
    ValidateRecord(r, "record " + std::to_string(i + 1));
    if (!ids.insert(r.id).second)
      Fail(ErrorKind::kValidation, "duplicate utterance id '" + r.id + "'");
  }
}

CorpusManifest LoadManifest(const fs::path &path, const LoadOptions &opts) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "manifest not found: " + path.string());
  CorpusManifest m;
  m.split_tag = opts.split_tag;
  m.base_dir = path.parent_path();
  std::unordered_set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      Fail(ErrorKind::kValidation, where + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object() || j.size() != kManifestKeys.size())
      Fail(ErrorKind::kValidation, where + ": expected an object with exactly " +
                                       std::to_string(kManifestKeys.size()) + " keys");
    for (const char *k : kManifestKeys)
      if (!j.contains(k)) Fail(ErrorKind::kValidation, where + ": missing key '" + k + "'");
    UtteranceRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.audio_path = j.at("audio_path").get<std::string>();
      r.transcript = j.at("text").get<std::string>();
      r.speaker_id = j.at("speaker").get<std::string>();
      r.duration_s = j.at("duration_s").get<double>();
      r.sample_rate = j.at("sample_rate").get<int>();
    } catch (const json::exception &e) {
      Fail(ErrorKind::kValidation, where + ": bad field type (" + e.what() + ")");
    }
    ValidateRecord(r, where);
    if (!ids.insert(r.id).second)
      Fail(ErrorKind::kValidation, where + ": duplicate utterance id '" + r.id + "'");
    if (opts.check_audio && !fs::exists(m.ResolveAudio(r))) {
      if (opts.missing_audio == MissingAudioPolicy::kError)
        Fail(ErrorKind::kIo, where + ": audio file missing for '" + r.id +
                                 "': " + m.ResolveAudio(r).string());
      std::cerr << "WARNING: " << where << ": dropping '" << r.id
                << "', audio file missing\n";
      continue;
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

std::string SerializeManifest(const CorpusManifest &m) {
  std::string out;
  for (const auto &r : m.records) {
    json j = {{"id", r.id},
              {"audio_path", r.audio_path},
              {"text", r.transcript},
              {"speaker", r.speaker_id},
              {"duration_s", r.duration_s},
              {"sample_rate", r.sample_rate}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

void SaveManifest(const CorpusManifest &m, const fs::path &path) {
  WriteFileAtomic(path, SerializeManifest(m));
}

// ---------------------------------------------------------------------------
// Text normalization.
//
// Rule table, applied left to right in one pass:
//   A-Z                       -> a-z
//   a-z ' . , ?               -> kept
//   digit run (value 0..9999) -> cardinal words, e.g. "24" -> "twenty four"
//   digit run + st|nd|rd|th   -> ordinal words, e.g. "21st" -> "twenty first"
//   digit run next to '.'/',' followed by a digit, or > 9999 -> error
//   - / _ and whitespace      -> space
//   anything else             -> dropped
// then whitespace runs collapse to one space and ends are trimmed.

namespace {

const char *kOnes[] = {"zero",    "one",     "two",       "three",    "four",
                       "five",    "six",     "seven",     "eight",    "nine",
                       "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
                       "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
const char *kTens[] = {"",      "",      "twenty",  "thirty", "forty",
                       "fifty", "sixty", "seventy", "eighty", "ninety"};

std::string BelowHundred(int n) {
  if (n < 20) return kOnes[n];
  std::string s = kTens[n / 10];
  if (n % 10) s += std::string(" ") + kOnes[n % 10];
  return s;
}

bool IsAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::string CardinalWords(int n) {
  Require(n >= 0 && n <= 9999, "number out of range 0..9999: " + std::to_string(n));
  if (n == 0) return "zero";
  std::string s;
  auto append = [&s](const std::string &w) {
    if (!s.empty()) s += ' ';
    s += w;
  };
  if (n >= 1000) append(std::string(kOnes[n / 1000]) + " thousand");
  if (n % 1000 >= 100) append(std::string(kOnes[(n % 1000) / 100]) + " hundred");
  if (n % 100) append(BelowHundred(n % 100));
  return s;
}

std::string OrdinalWords(int n) {
  std::string s = CardinalWords(n);
  size_t pos = s.find_last_of(' ');
  std::string head = pos == std::string::npos ? "" : s.substr(0, pos + 1);
  std::string last = pos == std::string::npos ? s : s.substr(pos + 1);
  static const std::map<std::string, std::string> kIrregular = {
      {"one", "first"},  {"two", "second"}, {"three", "third"},
      {"five", "fifth"}, {"eight", "eighth"}, {"nine", "ninth"},
      {"twelve", "twelfth"}};
  auto it = kIrregular.find(last);
  if (it != kIrregular.end()) {
    last = it->second;
  } else if (last.back() == 'y') {
    last = last.substr(0, last.size() - 1) + "ieth";
  } else {
    last += "th";
  }
  return head + last;
}

std::string NormalizeText(const std::string &raw) {
  std::string out;
  out.reserve(raw.size());
  const size_t n = raw.size();
  for (size_t i = 0; i < n;) {
    char c = raw[i];
    if (IsDigit(c)) {
      size_t j = i;
      while (j < n && IsDigit(raw[j])) ++j;
      if (j + 1 < n && (raw[j] == '.' || raw[j] == ',') && IsDigit(raw[j + 1]))
        Fail(ErrorKind::kInvalidArgument,
             "unsupported number format near '" + raw.substr(i, j + 2 - i) + "'");
      if (i > 0 && (raw[i - 1] == '.' || raw[i - 1] == ',') && i > 1 &&
          IsDigit(raw[i - 2]))
        Fail(ErrorKind::kInvalidArgument, "unsupported number format");
      std::string digits = raw.substr(i, j - i);
      size_t nz = digits.find_first_not_of('0');
      std::string significant = nz == std::string::npos ? "0" : digits.substr(nz);
      if (significant.size() > 4)
        Fail(ErrorKind::kInvalidArgument, "number out of range 0..9999: " + digits);
      int value = std::stoi(significant);
      bool ordinal = false;
      if (j + 1 < n) {
        std::string suf = {static_cast<char>(std::tolower(raw[j])),
                           static_cast<char>(std::tolower(raw[j + 1]))};
        bool ends = j + 2 >= n || !IsAlpha(raw[j + 2]);
        if (ends && (suf == "st" || suf == "nd" || suf == "rd" || suf == "th")) {
          ordinal = true;
          j += 2;
        }
      }
      out += ' ';
      out += ordinal ? OrdinalWords(value) : CardinalWords(value);
      out += ' ';
      i = j;
      continue;
    }
    if (c >= 'A' && c <= 'Z') {
      out += static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || c == '\'' || c == '.' || c == ',' || c == '?') {
      out += c;
    } else if (c == '-' || c == '/' || c == '_' || c == ' ' || c == '\t' ||
               c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      out += ' ';
    }
    ++i;
  }
  std::string collapsed;
  collapsed.reserve(out.size());
  for (char c : out) {
    if (c == ' ' && (collapsed.empty() || collapsed.back() == ' ')) continue;
    collapsed += c;
  }
  while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
  if (std::none_of(collapsed.begin(), collapsed.end(),
                   [](char ch) { return ch >= 'a' && ch <= 'z'; }))
    Fail(ErrorKind::kInvalidArgument, "text is empty after normalization: '" + raw + "'");
  return collapsed;
}

// ---------------------------------------------------------------------------
// Grapheme tokenset: id 0 is space, then ' , . ? and a..z.

namespace {

constexpr std::string_view kGraphemes = " ',.?abcdefghijklmnopqrstuvwxyz";

void CheckTokenset(const std::string &tokenset_id) {
  if (tokenset_id != kGraphemeTokenset)
    Fail(ErrorKind::kInvalidArgument, "unknown tokenset '" + tokenset_id + "'");
}

}  // namespace

int VocabSize(const std::string &tokenset_id) {
  CheckTokenset(tokenset_id);
  return static_cast<int>(kGraphemes.size());
}

TokenSequence Tokenize(const std::string &text, const std::string &tokenset_id) {
  CheckTokenset(tokenset_id);
  Require(!text.empty(), "cannot tokenize empty text");
  TokenSequence seq;
  seq.tokenset_id = tokenset_id;
  seq.token_ids.reserve(text.size());
  for (char c : text) {
    size_t pos = kGraphemes.find(c);
    if (pos == std::string_view::npos)
      Fail(ErrorKind::kInvalidArgument,
           std::string("character '") + c + "' is not in the grapheme tokenset");
    seq.token_ids.push_back(static_cast<int>(pos));
  }
  return seq;
}

std::string Detokenize(const TokenSequence &tokens) {
  CheckTokenset(tokens.tokenset_id);
  std::string out;
  for (int id : tokens.token_ids) {
    Require(id >= 0 && id < static_cast<int>(kGraphemes.size()),
            "token id out of range: " + std::to_string(id));
    out += kGraphemes[static_cast<size_t>(id)];
  }
  return out;
}

// ---------------------------------------------------------------------------

std::pair<CorpusManifest, CorpusManifest> SplitCorpus(const CorpusManifest &m,
                                                      double train_hours,
                                                      uint64_t seed) {
  const double total = m.TotalHours();
  if (!(train_hours > 0.0) || !(train_hours < total))
    Fail(ErrorKind::kInvalidArgument,
         "insufficient data: train_hours must be in (0, total_hours=" +
             std::to_string(total) + ")");
  if (m.Speakers().size() < 2)
    Fail(ErrorKind::kInvalidArgument, "insufficient data: need at least 2 speakers");

  std::vector<size_t> order(m.records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::map<std::string, int> count;
  for (const auto &r : m.records) ++count[r.speaker_id];

  const double budget_s = train_hours * 3600.0;
  std::vector<bool> in_train(m.records.size(), false);
  double train_s = 0.0;
  std::set<std::string> seeded;
  for (size_t idx : order) {
    const auto &r = m.records[idx];
    if (count[r.speaker_id] >= 2 && seeded.insert(r.speaker_id).second) {
      in_train[idx] = true;
      train_s += r.duration_s;
    }
  }
  if (train_s > budget_s)
    Fail(ErrorKind::kInvalidArgument,
         "insufficient data: one utterance per speaker already exceeds train_hours");
  size_t last_added = order.size();
  for (size_t idx : order) {
    if (train_s >= budget_s) break;
    if (in_train[idx]) continue;
    in_train[idx] = true;
    train_s += m.records[idx].duration_s;
    last_added = idx;
  }
  if (std::all_of(in_train.begin(), in_train.end(), [](bool b) { return b; })) {
    if (last_added == order.size())
      Fail(ErrorKind::kInvalidArgument, "insufficient data: test split would be empty");
    in_train[last_added] = false;
  }

  CorpusManifest train, test;
  train.split_tag = SplitTag::kTrain;
  test.split_tag = SplitTag::kTest;
  train.base_dir = test.base_dir = m.base_dir;
  for (size_t i = 0; i < m.records.size(); ++i)
    (in_train[i] ? train : test).records.push_back(m.records[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace childtts::corpus
