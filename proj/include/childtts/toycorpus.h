// childtts/toycorpus.h

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

#ifndef CHILDTTS_TOYCORPUS_H_
#define CHILDTTS_TOYCORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "childtts/dsp.h"

// Procedural speech-like corpus with known alignments.  Each letter is a
// harmonic stack on the speaker's F0 shaped by three letter-specific
// formants; spaces are near-silent.  Child voices use higher F0 and
// formants scaled up by 15%.

namespace childtts::toy {

struct ToySpeaker {
  std::string label;
  double f0_hz = 120.0;
  double formant_scale = 1.0;
};

std::vector<ToySpeaker> DefaultAdultSpeakers();  // F0 100, 130, 160, 190 Hz
std::vector<ToySpeaker> DefaultChildSpeakers();  // F0 260, 320, 380, 440 Hz

struct ToyCorpusCfg {
  std::vector<ToySpeaker> adults = DefaultAdultSpeakers();
  std::vector<ToySpeaker> children = DefaultChildSpeakers();
  int utterances_per_speaker = 50;
  int sample_rate = 22050;
  int hop_length = 256;
  int min_frames_per_token = 4;
  int max_frames_per_token = 8;
  int min_chars = 10;
  int max_chars = 14;
  int n_eval_sentences = 10;
  uint64_t seed = 1;
};

struct ToyUtterance {
  std::string text;
  std::vector<int> durations;  // frames per character
  dsp::Waveform audio;
};

// Random transcript of lowercase words, between min_chars and max_chars
// characters, no leading/trailing space.
std::string RandomToyText(uint64_t seed, int min_chars, int max_chars);

// Audio for `text` with one duration (in hops) per character; length is
// sum(durations) * hop_length samples.
ToyUtterance SynthesizeToyUtterance(const ToySpeaker &spk, const std::string &text,
                                    const std::vector<int> &durations, int sample_rate,
                                    int hop_length, uint64_t seed);

struct ToyCorpusFiles {
  std::filesystem::path adult_manifest;  // <out>/adult.jsonl
  std::filesystem::path child_manifest;  // <out>/child.jsonl
  std::filesystem::path alignments;      // <out>/alignments.jsonl
  std::filesystem::path sentences;       // <out>/sentences.txt
};

/// Writes WAVs under <out>/{adult,child}/<speaker>/, both manifests, the
/// known per-character durations ({"id", "durations"} per line) and a list
/// of held-out sentences for synthesis.  Deterministic given cfg.seed.
ToyCorpusFiles WriteToyCorpus(const ToyCorpusCfg &cfg, const std::filesystem::path &out);

}  // namespace childtts::toy

#endif  // CHILDTTS_TOYCORPUS_H_
