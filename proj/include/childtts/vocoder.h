// childtts/vocoder.h

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


#ifndef CHILDTTS_VOCODER_H_
#define CHILDTTS_VOCODER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "childtts/dsp.h"

namespace childtts::vocoder {

enum class VocoderKind { kGriffinLim, kExternal };

const char *VocoderKindName(VocoderKind k);  // "griffinlim", "external"
VocoderKind ParseVocoderKind(const std::string &name);

/// External vocoder adapter.  For every item the mel is written to
/// `<exchange_dir>/<id>.melb` (see dsp::EncodeMelBlock) and the ids file
/// `<exchange_dir>/<id>.ids` lists the single id.  The command template may
/// use {dir}, {ids} and {seed}; the adapter must write `<exchange_dir>/<id>.wav`
/// (mono PCM16 at the mel sample rate).
struct ExternalVocoder {
  std::string command;
  std::filesystem::path exchange_dir;
  double timeout_s = 600.0;

  bool operator==(const ExternalVocoder &) const = default;
};

struct VocoderSpec {
  VocoderKind kind = VocoderKind::kGriffinLim;
  int griffinlim_iterations = 60;
  ExternalVocoder external;  // used only when kind == kExternal

  void Validate() const;
  bool operator==(const VocoderSpec &) const = default;
};

// Output length is n_frames * hop (griffinlim) or within one hop of it
// (external).  `item_id` names the exchange files of an external vocoder.
dsp::Waveform Render(const dsp::MelSpectrogram &m, const VocoderSpec &spec, uint64_t seed,
                     const std::string &item_id = "item_00000");

struct ItemFailure {
  int index = 0;
  std::string message;
};

struct BatchRenderResult {
  std::vector<std::optional<dsp::Waveform>> waveforms;  // empty where the item failed
  std::vector<ItemFailure> failures;

  bool ok() const { return failures.empty(); }
  std::string Report() const;
};

/// Item i is rendered with seed + i, exactly as Render would.  With
/// stop_on_error the first failure is rethrown; otherwise every failure is
/// collected and the remaining items still run.
BatchRenderResult BatchRender(const std::vector<dsp::MelSpectrogram> &mels,
                              const VocoderSpec &spec, uint64_t seed,
                              bool stop_on_error = false);

}  // namespace childtts::vocoder

#endif  // CHILDTTS_VOCODER_H_
