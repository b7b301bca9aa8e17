// src/toycorpus.cc

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

#include "childtts/toycorpus.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"

#include "childtts/corpus.h"

namespace childtts::toy {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxHarmonicHz = 5000.0;

struct Formants {
  double f[3];
};

// Letter formants spread over F1 300-900, F2 900-2400, F3 2400-3000 Hz.
Formants LetterFormants(char c) {
  const int k = c - 'a';
  return {{300.0 + (k * 37) % 600, 900.0 + (k * 173) % 1500, 2400.0 + (k * 97) % 600}};
}

std::vector<double> HarmonicAmplitudes(char c, const ToySpeaker &spk, double f0, int n_harm) {
  std::vector<double> amp(n_harm, 0.0);
  if (c < 'a' || c > 'z') return amp;
  const Formants fm = LetterFormants(c);
  const double bw[3] = {120.0, 180.0, 240.0}, gain[3] = {1.0, 0.6, 0.3};
  for (int h = 0; h < n_harm; ++h) {
    const double fh = f0 * (h + 1);
    double a = 0.01;
    for (int k = 0; k < 3; ++k) {
      const double d = (fh - fm.f[k] * spk.formant_scale) / (bw[k] * spk.formant_scale);
      a += gain[k] * std::exp(-0.5 * d * d);
    }
    amp[h] = a;
  }
  return amp;
}

}  // namespace

std::vector<ToySpeaker> DefaultAdultSpeakers() {
  return {{"adult_a", 100.0, 1.0}, {"adult_b", 130.0, 1.0},
          {"adult_c", 160.0, 1.0}, {"adult_d", 190.0, 1.0}};
}

std::vector<ToySpeaker> DefaultChildSpeakers() {
  return {{"child_a", 260.0, 1.15}, {"child_b", 320.0, 1.15},
          {"child_c", 380.0, 1.15}, {"child_d", 440.0, 1.15}};
}

std::string RandomToyText(uint64_t seed, int min_chars, int max_chars) {
  Require(min_chars >= 1 && max_chars >= min_chars, "RandomToyText: bad length bounds");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len_dist(min_chars, max_chars);
  std::uniform_int_distribution<int> word_len(2, 5);
  std::uniform_int_distribution<int> letter(0, 25);
  const int target = len_dist(rng);
  std::string text;
  while (static_cast<int>(text.size()) < target) {
    if (!text.empty()) text += ' ';
    const int n = std::min(word_len(rng), std::max(1, target - static_cast<int>(text.size())));
    for (int i = 0; i < n; ++i) text += static_cast<char>('a' + letter(rng));
  }
  return text;
}

ToyUtterance SynthesizeToyUtterance(const ToySpeaker &spk, const std::string &text,
                                    const std::vector<int> &durations, int sample_rate,
                                    int hop_length, uint64_t seed) {
  Require(text.size() == durations.size(), "toy utterance: one duration per character");
  Require(spk.f0_hz > 0.0 && spk.f0_hz * 2 < sample_rate / 2.0, "toy utterance: bad F0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double f0_base = spk.f0_hz * (1.0 + 0.04 * (unit(rng) - 0.5));
  const double vib_phase = 2 * kPi * unit(rng);
  const int n_harm = std::max(1, static_cast<int>(kMaxHarmonicHz / (f0_base * 1.03)));

  std::vector<std::vector<double>> amps;
  for (char c : text) amps.push_back(HarmonicAmplitudes(c, spk, f0_base, n_harm));

  std::vector<int> start(text.size() + 1, 0);
  for (size_t t = 0; t < text.size(); ++t) {
    Require(durations[t] >= 1, "toy utterance: durations must be positive");
    start[t + 1] = start[t] + durations[t] * hop_length;
  }
  const int n = start.back();
  std::vector<double> y(n, 0.0);
  std::vector<double> phase(n_harm, 0.0), a(n_harm);
  const int ramp = hop_length / 2;
  size_t tok = 0;
  for (int i = 0; i < n; ++i) {
    while (i >= start[tok + 1]) ++tok;
    // Crossfade the harmonic envelope over the last `ramp` samples of a token.
    const int to_end = start[tok + 1] - i;
    const bool fade = tok + 1 < text.size() && to_end <= ramp;
    const double w = fade ? 0.5 * (1.0 - static_cast<double>(to_end) / ramp) : 0.0;
    const double tsec = static_cast<double>(i) / sample_rate;
    const double f0 = f0_base * (1.0 + 0.02 * std::sin(2 * kPi * 3.0 * tsec + vib_phase));
    double s = 0.0;
    for (int h = 0; h < n_harm; ++h) {
      a[h] = (1.0 - w) * amps[tok][h] + (fade ? w * amps[tok + 1][h] : 0.0);
      phase[h] += 2 * kPi * f0 * (h + 1) / sample_rate;
      if (phase[h] > 2 * kPi) phase[h] -= 2 * kPi;
      s += a[h] * std::sin(phase[h]);
    }
    y[i] = s + 1e-3 * noise(rng);
  }
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  ToyUtterance u;
  u.text = text;
  u.durations = durations;
  u.audio.sample_rate = sample_rate;
  u.audio.samples.resize(n);
  const double g = peak > 0.0 ? 0.5 / peak : 1.0;
  for (int i = 0; i < n; ++i) u.audio.samples[i] = static_cast<float>(y[i] * g);
  return u;
}

ToyCorpusFiles WriteToyCorpus(const ToyCorpusCfg &cfg, const fs::path &out) {
  Require(cfg.utterances_per_speaker >= 2, "toy corpus: need at least 2 utterances per speaker");
  Require(!cfg.adults.empty() && !cfg.children.empty(), "toy corpus: need adult and child voices");
  fs::create_directories(out);
  ToyCorpusFiles files{out / "adult.jsonl", out / "child.jsonl", out / "alignments.jsonl",
                       out / "sentences.txt"};
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> frames(cfg.min_frames_per_token, cfg.max_frames_per_token);
  std::string align_lines;

  auto write_group = [&](const std::vector<ToySpeaker> &voices, const std::string &group,
                         const fs::path &manifest_path) {
    corpus::CorpusManifest m;
    for (const auto &spk : voices) {
      for (int u = 0; u < cfg.utterances_per_speaker; ++u) {
        char id[128];
        std::snprintf(id, sizeof(id), "%s_%04d", spk.label.c_str(), u);
        const std::string text = RandomToyText(rng(), cfg.min_chars, cfg.max_chars);
        std::vector<int> durs;
        for (size_t k = 0; k < text.size(); ++k) durs.push_back(frames(rng));
        const ToyUtterance utt =
            SynthesizeToyUtterance(spk, text, durs, cfg.sample_rate, cfg.hop_length, rng());
        const std::string rel = group + "/" + spk.label + "/" + id + ".wav";
        dsp::WriteWav(utt.audio, out / rel);
        m.records.push_back({id, rel, text, spk.label, utt.audio.DurationSeconds(),
                             cfg.sample_rate});
        align_lines += nlohmann::json{{"id", id}, {"durations", durs}}.dump() + "\n";
      }
    }
    corpus::SaveManifest(m, manifest_path);
  };
  write_group(cfg.adults, "adult", files.adult_manifest);
  write_group(cfg.children, "child", files.child_manifest);
  WriteFileAtomic(files.alignments, align_lines);

  std::string sentences;
  for (int i = 0; i < cfg.n_eval_sentences; ++i)
    sentences += RandomToyText(rng(), cfg.min_chars, cfg.max_chars) + "\n";
  WriteFileAtomic(files.sentences, sentences);
  return files;
}

}  // namespace childtts::toy
