// src/synthgen.cc

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


#include "childtts/synthgen.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

#include "childtts/acoustic.h"
#include "childtts/trainer.h"

namespace childtts::synthgen {

namespace fs = std::filesystem;

void SentenceList::Validate() const {
  if (sentences.empty()) Fail(ErrorKind::kValidation, "sentence list '" + source_tag + "' is empty");
  for (size_t i = 0; i < sentences.size(); ++i) {
    try {
      corpus::NormalizeText(sentences[i]);
    } catch (const Error &e) {
      Fail(ErrorKind::kValidation, "sentence " + std::to_string(i + 1) + " of '" + source_tag +
                                       "' does not normalize: " + e.what());
    }
  }
}

SentenceList LoadSentenceList(const fs::path &path, const std::string &source_tag) {
  if (!fs::exists(path)) Fail(ErrorKind::kIo, "sentence list not found: " + path.string());
  std::istringstream in(ReadFileBytes(path));
  SentenceList list;
  list.source_tag = source_tag;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    list.sentences.push_back(line);
  }
  list.Validate();
  return list;
}

Demographics MakeDemographics(int n_speakers, double hours, int n_utterances) {
  Require(n_speakers > 0, "demographics: need at least one speaker");
  Require(hours >= 0.0 && n_utterances >= 0, "demographics: negative totals");
  return {n_speakers, hours, n_utterances, hours * 60.0 / n_speakers};
}

Demographics ComputeDemographics(const corpus::CorpusManifest &m) {
  Require(!m.records.empty(), "demographics: empty manifest");
  std::set<std::string> speakers;
  double seconds = 0.0;
  for (const auto &r : m.records) {
    speakers.insert(r.speaker_id);
    seconds += r.duration_s;
  }
  return MakeDemographics(static_cast<int>(speakers.size()), seconds / 3600.0,
                          static_cast<int>(m.records.size()));
}

std::string DemographicsToJson(const Demographics &d) {
  return nlohmann::json{{"n_speakers", d.n_speakers},
                        {"hours", d.hours},
                        {"n_utterances", d.n_utterances},
                        {"per_speaker_minutes", d.per_speaker_minutes}}
             .dump(2) + "\n";
}

namespace {

void WriteSet(const corpus::CorpusManifest &m, const fs::path &dir) {
  corpus::SaveManifest(m, dir / "manifest.jsonl");
  WriteFileAtomic(dir / "demographics.json", DemographicsToJson(ComputeDemographics(m)));
}

}  // namespace

GenerationResult GenerateDataset(const GenerationJob &job, const fs::path &out_dir) {
  job.sentences.Validate();
  job.vocoder.Validate();
  Require(!job.speakers.empty(), "generation job: no speakers");
  Require(job.pace > 0.0, "generation job: pace must be positive");
  Require(job.max_failure_fraction >= 0.0 && job.max_failure_fraction <= 1.0,
          "generation job: max_failure_fraction must be in [0, 1]");
  for (int sr : job.output_rates)
    if (sr != 16000 && sr != 22050)
      Fail(ErrorKind::kValidation, "generation job: output rate " + std::to_string(sr) +
                                       " not supported (16000, 22050)");

  const trainer::CheckpointBundle ckpt = trainer::LoadCheckpoint(job.checkpoint);
  const acoustic::AcousticModelState &model = ckpt.model;
  for (const auto &spk : job.speakers)
    if (!model.speakers.Contains(spk))
      Fail(ErrorKind::kValidation, "speaker '" + spk + "' is not in checkpoint " +
                                       job.checkpoint.string());

  GenerationResult result;
  result.native_rate = model.mel_cfg.sample_rate;
  const fs::path native_dir = out_dir / std::to_string(result.native_rate);
  corpus::CorpusManifest native;
  native.split_tag = corpus::SplitTag::kSynth;
  native.base_dir = native_dir;

  const int n_sent = static_cast<int>(job.sentences.sentences.size());
  for (size_t s = 0; s < job.speakers.size(); ++s) {
    const std::string &spk = job.speakers[s];
    for (int k = 0; k < n_sent; ++k) {
      const int index = static_cast<int>(s) * n_sent + k;
      const std::string &text = job.sentences.sentences[k];
      char id[256];
      std::snprintf(id, sizeof(id), "%s_%04d", spk.c_str(), k);
      try {
        const auto tokens = corpus::Tokenize(corpus::NormalizeText(text));
        const auto inf = acoustic::ForwardInfer(model, tokens, spk, job.pace, job.pitch_shift_hz);
        const dsp::Waveform w = vocoder::Render(inf.mel, job.vocoder, job.seed + index, id);
        const std::string rel = spk + "/" + id + ".wav";
        dsp::WriteWav(w, native_dir / rel);
        native.records.push_back({id, rel, text, spk, w.DurationSeconds(), w.sample_rate});
      } catch (const Error &e) {
        result.failures.push_back({index, std::string(id) + ": " + e.what()});
      }
    }
  }
  const int total = static_cast<int>(job.speakers.size()) * n_sent;
  if (static_cast<double>(result.failures.size()) > job.max_failure_fraction * total) {
    std::string msg = std::to_string(result.failures.size()) + " of " + std::to_string(total) +
                      " utterances failed:";
    for (const auto &f : result.failures) msg += "\n  " + f.message;
    Fail(ErrorKind::kRuntime, msg);
  }
  Require(!native.records.empty(), "generation job produced no utterances");
  WriteSet(native, native_dir);
  result.demographics = ComputeDemographics(native);
  result.manifests[result.native_rate] = native;
  for (int sr : job.output_rates) {
    if (sr == result.native_rate) continue;
    result.manifests[sr] = ConvertDatasetRate(native, sr, out_dir / std::to_string(sr));
  }
  return result;
}

corpus::CorpusManifest ConvertDatasetRate(const corpus::CorpusManifest &m, int target_sr,
                                          const fs::path &out_dir) {
  if (target_sr != 16000 && target_sr != 22050)
    Fail(ErrorKind::kInvalidArgument,
         "convert: target rate " + std::to_string(target_sr) + " not supported (16000, 22050)");
  Require(!m.records.empty(), "convert: empty manifest");
  if (!m.base_dir.empty() && fs::exists(out_dir) && fs::exists(m.base_dir) &&
      fs::equivalent(out_dir, m.base_dir))
    Fail(ErrorKind::kInvalidArgument, "convert: output directory is the source directory");
  corpus::CorpusManifest out = m;
  out.base_dir = out_dir;
  for (auto &r : out.records) {
    const fs::path src = m.ResolveAudio(r);
    fs::path rel = r.audio_path;
    if (rel.is_absolute()) rel = fs::path(r.speaker_id) / rel.filename();
    dsp::Waveform w = dsp::ReadWav(src);
    if (w.sample_rate != target_sr) w = dsp::Resample(w, target_sr);
    dsp::WriteWav(w, out_dir / rel);
    r.audio_path = rel.generic_string();
    r.sample_rate = target_sr;
    r.duration_s = w.DurationSeconds();
  }
  WriteSet(out, out_dir);
  return out;
}

std::vector<std::pair<std::string, double>> RankSpeakersByData(const corpus::CorpusManifest &m) {
  std::map<std::string, double> hours;
  for (const auto &r : m.records) hours[r.speaker_id] += r.duration_s / 3600.0;
  std::vector<std::pair<std::string, double>> ranked(hours.begin(), hours.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  return ranked;
}

std::vector<std::string> SelectTopSpeakers(const corpus::CorpusManifest &m, int k) {
  const auto ranked = RankSpeakersByData(m);
  Require(k >= 1 && k <= static_cast<int>(ranked.size()),
          "select speakers: k=" + std::to_string(k) + " but corpus has " +
              std::to_string(ranked.size()) + " speakers");
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

}  // namespace childtts::synthgen
