// childtts/corpus.h

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

#ifndef CHILDTTS_CORPUS_H_
#define CHILDTTS_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace childtts::corpus {

struct UtteranceRecord {
  std::string id;
  std::string audio_path;  // as written in the manifest
  std::string transcript;  // raw text
  std::string speaker_id;
  double duration_s = 0.0;
  int sample_rate = 0;
};

enum class SplitTag { kTrain, kTest, kSynth };

const char *SplitTagName(SplitTag tag);

struct CorpusManifest {
  std::vector<UtteranceRecord> records;
  SplitTag split_tag = SplitTag::kTrain;
  // Directory relative audio paths are resolved against.
  std::filesystem::path base_dir;

  double TotalHours() const;
  std::filesystem::path ResolveAudio(const UtteranceRecord &r) const;
  // Distinct speakers in first-appearance order.
  std::vector<std::string> Speakers() const;
};

enum class MissingAudioPolicy { kError, kWarnAndDrop };

struct LoadOptions {
  SplitTag split_tag = SplitTag::kTrain;
  MissingAudioPolicy missing_audio = MissingAudioPolicy::kError;
  bool check_audio = true;
};

/// Reads a JSON-lines manifest.  Every line is one object with exactly the
/// keys {"id","audio_path","text","speaker","duration_s","sample_rate"}.
/// Errors name the 1-based line number of the offending record.
CorpusManifest LoadManifest(const std::filesystem::path &path,
                            const LoadOptions &opts = {});

// Canonical serialization: one compact object per line, keys in sorted
// order, trailing newline.  Loading and re-serializing a canonical file is
// byte-identical.
std::string SerializeManifest(const CorpusManifest &m);
void SaveManifest(const CorpusManifest &m, const std::filesystem::path &path);

// Throws if any record breaks the record/manifest invariants.
void ValidateManifest(const CorpusManifest &m);

// Lowercases, expands integers 0..9999 and ordinals to words, maps hyphen,
// slash, underscore and control whitespace to space, drops every other
// character outside the grapheme set, collapses whitespace.  Throws when
// the result has no letters.
std::string NormalizeText(const std::string &raw);

// Number words for 0..9999, no "and" ("one hundred five").
std::string CardinalWords(int n);
std::string OrdinalWords(int n);

inline constexpr const char *kGraphemeTokenset = "grapheme";

struct TokenSequence {
  std::vector<int> token_ids;
  std::string tokenset_id;
};

int VocabSize(const std::string &tokenset_id);
TokenSequence Tokenize(const std::string &normalized_text,
                       const std::string &tokenset_id = kGraphemeTokenset);
std::string Detokenize(const TokenSequence &tokens);

/// Shuffles records with `seed`, seeds the train side with one utterance of
/// every speaker that has at least two, then adds utterances greedily in
/// shuffled order until `train_hours` is reached.  Both halves keep the
/// input's record order.
std::pair<CorpusManifest, CorpusManifest> SplitCorpus(const CorpusManifest &m,
                                                      double train_hours,
                                                      uint64_t seed);

}  // namespace childtts::corpus

#endif  // CHILDTTS_CORPUS_H_
