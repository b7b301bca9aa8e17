// src/vocoder.cc

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


#include "childtts/vocoder.h"

#include <cstdio>

#include "childtts/subprocess.h"

namespace childtts::vocoder {

namespace fs = std::filesystem;

const char *VocoderKindName(VocoderKind k) {
  return k == VocoderKind::kGriffinLim ? "griffinlim" : "external";
}

VocoderKind ParseVocoderKind(const std::string &name) {
  if (name == "griffinlim") return VocoderKind::kGriffinLim;
  if (name == "external") return VocoderKind::kExternal;
  Fail(ErrorKind::kValidation, "unknown vocoder kind '" + name + "' (griffinlim, external)");
}

void VocoderSpec::Validate() const {
  if (kind == VocoderKind::kGriffinLim) {
    if (griffinlim_iterations < 1)
      Fail(ErrorKind::kValidation, "vocoder: griffinlim_iterations must be >= 1");
    return;
  }
  if (external.command.empty())
    Fail(ErrorKind::kValidation, "vocoder: external kind needs a command");
  if (external.exchange_dir.empty())
    Fail(ErrorKind::kValidation, "vocoder: external kind needs an exchange directory");
  if (!(external.timeout_s > 0.0))
    Fail(ErrorKind::kValidation, "vocoder: timeout must be positive");
}

namespace {

dsp::Waveform RenderExternal(const dsp::MelSpectrogram &m, const ExternalVocoder &ext,
                             uint64_t seed, const std::string &id) {
  fs::create_directories(ext.exchange_dir);
  const fs::path mel_path = ext.exchange_dir / (id + ".melb");
  const fs::path ids_path = ext.exchange_dir / (id + ".ids");
  const fs::path wav_path = ext.exchange_dir / (id + ".wav");
  fs::remove(wav_path);
  WriteFileAtomic(mel_path, dsp::EncodeMelBlock(m));
  WriteFileAtomic(ids_path, id + "\n");
  const std::string cmd = ExpandCommand(
      ext.command,
      {{"dir", ext.exchange_dir.string()}, {"ids", ids_path.string()}, {"seed", std::to_string(seed)}});
  const CommandResult r = RunCommand(cmd, ext.timeout_s);
  if (r.timed_out || r.exit_code != 0)
    Fail(ErrorKind::kRuntime, "external vocoder failed for " + id + ": " + DescribeFailure(r, ext.timeout_s));
  if (!fs::exists(wav_path))
    Fail(ErrorKind::kRuntime, "external vocoder wrote no output for " + id + " (expected " +
                                  wav_path.string() + ")" +
                                  (r.output.empty() ? "" : "; output:\n" + r.output));
  dsp::Waveform w = dsp::ReadWav(wav_path);
  if (w.sample_rate != m.cfg.sample_rate)
    Fail(ErrorKind::kRuntime, "external vocoder output " + wav_path.string() + " is at " +
                                  std::to_string(w.sample_rate) + " Hz, mel is at " +
                                  std::to_string(m.cfg.sample_rate) + " Hz");
  const long expected = static_cast<long>(m.NumFrames()) * m.cfg.hop_length;
  const long got = static_cast<long>(w.samples.size());
  if (std::labs(got - expected) > m.cfg.hop_length)
    Fail(ErrorKind::kRuntime, "external vocoder output " + wav_path.string() + " has " +
                                  std::to_string(got) + " samples, expected " +
                                  std::to_string(expected) + " +- " +
                                  std::to_string(m.cfg.hop_length));
  return w;
}

dsp::Waveform RenderItem(const dsp::MelSpectrogram &m, const VocoderSpec &spec, uint64_t seed,
                         const std::string &id) {
  spec.Validate();
  m.cfg.Validate();
  Require(m.values.cols() == m.cfg.n_mels, "vocoder: mel has " + std::to_string(m.values.cols()) +
                                               " bands, its config says " +
                                               std::to_string(m.cfg.n_mels));
  Require(m.NumFrames() > 0, "vocoder: empty mel spectrogram");
  if (spec.kind == VocoderKind::kGriffinLim)
    return dsp::GriffinLim(m, spec.griffinlim_iterations, seed).waveform;
  return RenderExternal(m, spec.external, seed, id);
}

std::string ItemId(int index) {
  char b[32];
  std::snprintf(b, sizeof(b), "item_%05d", index);
  return b;
}

}  // namespace

dsp::Waveform Render(const dsp::MelSpectrogram &m, const VocoderSpec &spec, uint64_t seed,
                     const std::string &item_id) {
  Require(!item_id.empty() && item_id.find('/') == std::string::npos,
          "vocoder item id must be a non-empty file name");
  return RenderItem(m, spec, seed, item_id);
}

std::string BatchRenderResult::Report() const {
  if (failures.empty()) return "all " + std::to_string(waveforms.size()) + " items rendered";
  std::string s = std::to_string(failures.size()) + " of " + std::to_string(waveforms.size()) +
                  " items failed:";
  for (const auto &f : failures) s += "\n  [" + std::to_string(f.index) + "] " + f.message;
  return s;
}

BatchRenderResult BatchRender(const std::vector<dsp::MelSpectrogram> &mels,
                              const VocoderSpec &spec, uint64_t seed, bool stop_on_error) {
  spec.Validate();
  BatchRenderResult out;
  out.waveforms.resize(mels.size());
  for (size_t i = 0; i < mels.size(); ++i) {
    try {
      out.waveforms[i] = RenderItem(mels[i], spec, seed + i, ItemId(static_cast<int>(i)));
    } catch (const Error &e) {
      if (stop_on_error) throw;
      out.failures.push_back({static_cast<int>(i), e.what()});
    }
  }
  return out;
}

}  // namespace childtts::vocoder
