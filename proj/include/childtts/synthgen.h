// childtts/synthgen.h

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


#ifndef CHILDTTS_SYNTHGEN_H_
#define CHILDTTS_SYNTHGEN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "childtts/corpus.h"
#include "childtts/vocoder.h"

namespace childtts::synthgen {

struct SentenceList {
  std::vector<std::string> sentences;
  std::string source_tag;  // e.g. "harvard", "lj"

  // Non-empty, and every sentence survives corpus::NormalizeText.
  void Validate() const;
};

// One sentence per line, UTF-8; blank lines are skipped.
SentenceList LoadSentenceList(const std::filesystem::path &path, const std::string &source_tag);

struct Demographics {
  int n_speakers = 0;
  double hours = 0.0;
  int n_utterances = 0;
  double per_speaker_minutes = 0.0;  // hours * 60 / n_speakers

  double PerSpeakerHours() const { return per_speaker_minutes / 60.0; }
};

Demographics MakeDemographics(int n_speakers, double hours, int n_utterances);
Demographics ComputeDemographics(const corpus::CorpusManifest &m);
std::string DemographicsToJson(const Demographics &d);

struct GenerationJob {
  std::filesystem::path checkpoint;
  std::vector<std::string> speakers;
  SentenceList sentences;
  vocoder::VocoderSpec vocoder;
  std::vector<int> output_rates = {22050};
  uint64_t seed = 1;
  double pace = 1.0;
  double pitch_shift_hz = 0.0;
  // The job fails when more than this fraction of the items fail.
  double max_failure_fraction = 0.0;
};

struct GenerationResult {
  std::map<int, corpus::CorpusManifest> manifests;  // by sample rate
  Demographics demographics;                        // of the native-rate set
  std::vector<vocoder::ItemFailure> failures;       // index = speaker_pos * n_sentences + k
  int native_rate = 0;
};

/// One utterance per (speaker, sentence) pair, in job speaker order then
/// sentence order; item i is vocoded with seed + i.  Writes
///   <out>/<sr>/<speaker>/<speaker>_<kkkk>.wav, <out>/<sr>/manifest.jsonl,
///   <out>/<sr>/demographics.json
/// at the model's native rate (the mel sample rate) and at every other
/// requested rate by resampling the native files.  An external vocoder sees
/// each utterance under its id, e.g. `<speaker>_0003`.
GenerationResult GenerateDataset(const GenerationJob &job, const std::filesystem::path &out_dir);

/// Resamples every file of `m` into `out_dir`, keeping relative paths, and
/// writes `out_dir/manifest.jsonl`.  The source files are not modified.
corpus::CorpusManifest ConvertDatasetRate(const corpus::CorpusManifest &m, int target_sr,
                                          const std::filesystem::path &out_dir);

// Speakers by total audio, most first; ties by label.
std::vector<std::pair<std::string, double>> RankSpeakersByData(const corpus::CorpusManifest &m);
std::vector<std::string> SelectTopSpeakers(const corpus::CorpusManifest &m, int k);

}  // namespace childtts::synthgen

#endif  // CHILDTTS_SYNTHGEN_H_
