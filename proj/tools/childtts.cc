// tools/childtts.cc

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


// Command-line driver: childtts <command> --config run.json [options]

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "childtts/pipeline.h"
#include "childtts/toycorpus.h"

namespace fs = std::filesystem;
using namespace childtts;

namespace {

// Config for the procedural corpus written by `toy-corpus`; paths are
// relative to the corpus directory.
nlohmann::json ToyConfig() {
  return {
      {"seed", 1},
      {"out_dir", "run"},
      {"corpus", {{"pretrain_manifest", "adult.jsonl"}, {"finetune_manifest", "child.jsonl"}}},
      {"model",
       {{"d_model", 32}, {"speaker_embed_dim", 32}, {"ff_dim", 64}, {"n_heads", 2}, {"max_speakers", 8}}},
      {"pretrain", {{"base_lr", 3e-3}, {"warmup_steps", 100}, {"max_steps", 500}, {"batch_size", 4}}},
      {"finetune", {{"base_lr", 3e-3}, {"warmup_steps", 100}, {"max_steps", 300}, {"batch_size", 4}}},
      {"vocoder", {{"kind", "griffinlim"}, {"griffinlim_iterations", 32}}},
      {"synthesize",
       {{"speakers", {"child_a", "child_b"}},
        {"sentences", "sentences.txt"},
        {"source_tag", "toy"},
        {"output_rates", {22050, 16000}}}},
      {"evaluate",
       {{"sample_size", 120},
        {"sets",
         {{{"name", "synthetic child"}, {"source", "synthesized"}, {"rate", 16000}},
          {{"name", "real child"}, {"source", "finetune"}},
          {{"name", "adult"}, {"source", "pretrain"}}}},
        {"similarity", {{"set_a", "synthetic child"}, {"set_b", "real child"}}}}},
  };
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Child speech synthesis by transfer learning: prepare, train, synthesize, evaluate"};
  app.require_subcommand(1);
  pipeline::CommandOptions opts;
  std::string config, out_dir;
  uint64_t seed = 0;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config,-c", config, "JSON run configuration")->required();
    sub->add_option("--set", opts.overrides, "Override a config value: key.path=value (repeatable)");
    sub->add_option("--seed", seed, "Override the top-level seed");
    sub->add_option("--out-dir", out_dir, "Override out_dir");
  };
  struct Stage {
    const char *name, *help;
    void (*fn)(const pipeline::RunConfig &);
  };
  const Stage stages[] = {
      {"prepare", "Validate manifests and build the feature cache", pipeline::CmdPrepare},
      {"pretrain", "Train from scratch on the pretraining corpus", pipeline::CmdPretrain},
      {"finetune", "Continue training on the finetuning corpus", pipeline::CmdFinetune},
      {"synthesize", "Generate a synthetic dataset", pipeline::CmdSynthesize},
      {"evaluate", "Score naturalness, intelligibility and speaker similarity", pipeline::CmdEvaluate},
      {"report", "Write report tables and plot data", pipeline::CmdReport},
  };
  std::vector<std::pair<CLI::App *, const Stage *>> subs;
  for (const auto &s : stages) {
    CLI::App *sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    subs.emplace_back(sub, &s);
  }

  CLI::App *toy = app.add_subcommand("toy-corpus", "Write the procedural toy corpus and a matching config");
  std::string toy_out;
  toy::ToyCorpusCfg toy_cfg;
  toy->add_option("--out", toy_out, "Output directory")->required();
  toy->add_option("--utterances", toy_cfg.utterances_per_speaker, "Utterances per voice");
  toy->add_option("--seed", toy_cfg.seed, "Corpus seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (toy->parsed()) {
      const auto files = toy::WriteToyCorpus(toy_cfg, toy_out);
      WriteFileAtomic(fs::path(toy_out) / "config.json", ToyConfig().dump(2) + "\n");
      std::cout << "wrote " << files.adult_manifest.string() << ", " << files.child_manifest.string()
                << " and " << (fs::path(toy_out) / "config.json").string() << "\n";
      return 0;
    }
    for (const auto &[sub, stage] : subs) {
      if (!sub->parsed()) continue;
      opts.config = config;
      if (sub->count("--seed")) opts.seed = seed;
      if (sub->count("--out-dir")) opts.out_dir = out_dir;
      const pipeline::RunConfig cfg = pipeline::LoadRunConfig(opts);
      stage->fn(cfg);
      std::cout << stage->name << ": done (" << (cfg.out_dir / stage->name).string() << ")\n";
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return pipeline::ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
