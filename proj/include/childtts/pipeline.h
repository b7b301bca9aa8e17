// childtts/pipeline.h

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


#ifndef CHILDTTS_PIPELINE_H_
#define CHILDTTS_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "childtts/acoustic.h"
#include "childtts/dsp.h"
#include "childtts/evalharness.h"
#include "childtts/jsonio.h"
#include "childtts/trainer.h"
#include "childtts/vocoder.h"

// Configuration and stage drivers behind the command-line tool.  Stages
// run in the order prepare -> pretrain -> finetune -> synthesize ->
// evaluate -> report, each reading its predecessors' artifacts under
// out_dir.

namespace childtts::pipeline {

inline constexpr const char *kStageOrder =
    "prepare -> pretrain -> finetune -> synthesize -> evaluate -> report";

struct SynthesizeCfg {
  std::vector<std::string> speakers;  // empty: every speaker of the finetune corpus
  std::filesystem::path sentences;
  std::string source_tag = "sentences";
  std::vector<int> output_rates = {22050, 16000};
  double pace = 1.0;
  double pitch_shift_hz = 0.0;
  double max_failure_fraction = 0.0;
};

enum class SetSource { kSynthesized, kPretrain, kFinetune, kManifest };

struct EvalSet {
  std::string name;
  SetSource source = SetSource::kSynthesized;
  std::filesystem::path manifest;  // kManifest only
  int rate = 0;                    // kSynthesized only; 0 = native rate
};

struct EvaluateCfg {
  int sample_size = 120;
  std::vector<EvalSet> sets;
  std::string similarity_set_a;  // empty: no similarity analysis
  std::string similarity_set_b;
  int max_speakers_a = 6;
  int max_speakers_b = 6;
  eval::AdapterSpec mos, asr, embedding;
};

struct RunConfig {
  uint64_t seed = 1;
  std::filesystem::path out_dir = "run";
  std::filesystem::path pretrain_manifest;
  std::filesystem::path finetune_manifest;
  dsp::MelCfg mel;
  dsp::F0Cfg f0;
  acoustic::ModelCfg model;
  trainer::TrainCfg pretrain;
  trainer::TrainCfg finetune;
  vocoder::VocoderSpec vocoder;
  SynthesizeCfg synthesize;
  EvaluateCfg evaluate;
};

/// Parses and validates a configuration document.  Unknown keys, wrong
/// types and invalid values raise kValidation errors naming the key path.
/// Relative paths are resolved against `base_dir`.  The top-level seed
/// drives model init, both training stages, synthesis and evaluation
/// sampling.
RunConfig ParseRunConfig(const Json &doc, const std::filesystem::path &base_dir);
Json RunConfigToJson(const RunConfig &c);

/// Applies "a.b.c=value" overrides to a document.  The value is parsed as
/// JSON when possible and taken as a string otherwise.  Intermediate
/// objects must exist.
void ApplyOverride(Json *doc, const std::string &assignment);

struct CommandOptions {
  std::filesystem::path config;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
};

// Reads the config file, applies overrides, --seed and --out-dir.
RunConfig LoadRunConfig(const CommandOptions &opts);

/// Each command writes its artifacts under out_dir/<stage>/ together with
/// run.json (command, config hash, seed, version, wall time, resolved
/// config, artifacts).
void CmdPrepare(const RunConfig &c);
void CmdPretrain(const RunConfig &c);
void CmdFinetune(const RunConfig &c);
void CmdSynthesize(const RunConfig &c);
void CmdEvaluate(const RunConfig &c);
void CmdReport(const RunConfig &c);

// 2 config, 3 I/O, 4 missing upstream artifact, 5 runtime.
int ExitCodeFor(ErrorKind kind);

}  // namespace childtts::pipeline

#endif  // CHILDTTS_PIPELINE_H_
