// src/pipeline.cc

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


#include "childtts/pipeline.h"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "childtts/corpus.h"
#include "childtts/synthgen.h"

namespace childtts::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr const char *kVersion = "childtts 1.0.0";

fs::path Resolve(const fs::path &base, const std::string &p) {
  if (p.empty()) return {};
  fs::path x(p);
  return (x.is_absolute() ? x : base / x).lexically_normal();
}

const char *SetSourceName(SetSource s) {
  switch (s) {
    case SetSource::kSynthesized: return "synthesized";
    case SetSource::kPretrain: return "pretrain";
    case SetSource::kFinetune: return "finetune";
    case SetSource::kManifest: return "manifest";
  }
  return "?";
}

SetSource ParseSetSource(const std::string &s, const std::string &key) {
  if (s == "synthesized") return SetSource::kSynthesized;
  if (s == "pretrain") return SetSource::kPretrain;
  if (s == "finetune") return SetSource::kFinetune;
  if (s == "manifest") return SetSource::kManifest;
  Fail(ErrorKind::kValidation, "config: " + key + " must be one of synthesized, pretrain, finetune, manifest");
}

void ParseTrain(const Json &j, const std::string &key, trainer::TrainCfg *c) {
  if (j.is_object() && j.contains("seed"))
    Fail(ErrorKind::kValidation, "config: " + key + ".seed is not allowed; use the top-level seed");
  FromJson(j, key, c);
}

void ParseAdapter(const Json &j, const std::string &key, const fs::path &base, eval::AdapterSpec *a) {
  StrictObject o(j, key);
  std::string dir;
  o.Get("command", &a->command);
  o.Get("exchange_dir", &dir);
  o.Get("timeout_s", &a->timeout_s);
  o.Finish();
  a->exchange_dir = Resolve(base, dir);
}

Json AdapterToJson(const eval::AdapterSpec &a) {
  return {{"command", a.command}, {"exchange_dir", a.exchange_dir.string()}, {"timeout_s", a.timeout_s}};
}

// Runs a validator and reports any failure as a configuration error.
template <typename F>
void Check(const std::string &section, F f) {
  try {
    f();
  } catch (const Error &e) {
    Fail(ErrorKind::kValidation, "config: " + section + ": " + e.what());
  }
}

void Validate(const RunConfig &c) {
  if (c.pretrain_manifest.empty()) Fail(ErrorKind::kValidation, "config: corpus.pretrain_manifest is required");
  if (c.finetune_manifest.empty()) Fail(ErrorKind::kValidation, "config: corpus.finetune_manifest is required");
  Check("mel", [&] { c.mel.Validate(); });
  if (!(c.f0.fmin > 0.0 && c.f0.fmin < c.f0.fmax))
    Fail(ErrorKind::kValidation, "config: f0 needs 0 < fmin < fmax");
  if (!(c.f0.voicing_threshold > 0.0 && c.f0.voicing_threshold < 1.0))
    Fail(ErrorKind::kValidation, "config: f0.voicing_threshold must be in (0, 1)");
  Check("model", [&] { c.model.Validate(); });
  if (c.model.n_mels != c.mel.n_mels)
    Fail(ErrorKind::kValidation, "config: model.n_mels (" + std::to_string(c.model.n_mels) +
                                     ") must equal mel.n_mels (" + std::to_string(c.mel.n_mels) + ")");
  const int vocab = corpus::VocabSize(corpus::kGraphemeTokenset);
  if (c.model.vocab_size != vocab)
    Fail(ErrorKind::kValidation, "config: model.vocab_size must be " + std::to_string(vocab) +
                                     " for the grapheme token set");
  Check("pretrain", [&] { c.pretrain.Validate(); });
  Check("finetune", [&] { c.finetune.Validate(); });
  Check("vocoder", [&] { c.vocoder.Validate(); });
  const auto &s = c.synthesize;
  if (s.sentences.empty()) Fail(ErrorKind::kValidation, "config: synthesize.sentences is required");
  if (s.output_rates.empty()) Fail(ErrorKind::kValidation, "config: synthesize.output_rates is empty");
  for (int r : s.output_rates)
    if (r != 16000 && r != 22050)
      Fail(ErrorKind::kValidation, "config: synthesize.output_rates entries must be 16000 or 22050");
  if (!(s.pace > 0.0)) Fail(ErrorKind::kValidation, "config: synthesize.pace must be positive");
  if (!(s.max_failure_fraction >= 0.0 && s.max_failure_fraction <= 1.0))
    Fail(ErrorKind::kValidation, "config: synthesize.max_failure_fraction must be in [0, 1]");
  const auto &e = c.evaluate;
  if (e.sample_size < 2) Fail(ErrorKind::kValidation, "config: evaluate.sample_size must be at least 2");
  std::set<std::string> names;
  for (const auto &set : e.sets) {
    if (set.name.empty()) Fail(ErrorKind::kValidation, "config: evaluate.sets entries need a name");
    if (!names.insert(set.name).second)
      Fail(ErrorKind::kValidation, "config: duplicate evaluate set name '" + set.name + "'");
    if (set.source == SetSource::kManifest && set.manifest.empty())
      Fail(ErrorKind::kValidation, "config: evaluate set '" + set.name + "' needs a manifest");
    if (set.rate != 0 && set.rate != 16000 && set.rate != 22050)
      Fail(ErrorKind::kValidation, "config: evaluate set '" + set.name + "' has unsupported rate");
  }
  if (e.similarity_set_a.empty() != e.similarity_set_b.empty())
    Fail(ErrorKind::kValidation, "config: evaluate.similarity needs both set_a and set_b");
  for (const auto &n : {e.similarity_set_a, e.similarity_set_b})
    if (!n.empty() && !names.count(n))
      Fail(ErrorKind::kValidation, "config: evaluate.similarity refers to unknown set '" + n + "'");
  if (e.max_speakers_a < 1 || e.max_speakers_b < 1)
    Fail(ErrorKind::kValidation, "config: evaluate.similarity set sizes must be positive");
  for (const auto *a : {&e.mos, &e.asr, &e.embedding})
    if (!(a->timeout_s > 0.0)) Fail(ErrorKind::kValidation, "config: adapter timeout must be positive");
}

}  // namespace

RunConfig ParseRunConfig(const Json &doc, const fs::path &base_dir) {
  RunConfig c;
  StrictObject o(doc, "");
  std::string s;
  o.Get("seed", &c.seed);
  s = c.out_dir.string();
  o.Get("out_dir", &s);
  c.out_dir = Resolve(base_dir, s);
  if (const Json *j = o.Child("corpus")) {
    StrictObject co(*j, "corpus");
    std::string pre, fine;
    co.Get("pretrain_manifest", &pre);
    co.Get("finetune_manifest", &fine);
    co.Finish();
    c.pretrain_manifest = Resolve(base_dir, pre);
    c.finetune_manifest = Resolve(base_dir, fine);
  }
  if (const Json *j = o.Child("mel")) FromJson(*j, "mel", &c.mel);
  if (const Json *j = o.Child("f0")) FromJson(*j, "f0", &c.f0);
  if (const Json *j = o.Child("model")) FromJson(*j, "model", &c.model);
  if (const Json *j = o.Child("pretrain")) ParseTrain(*j, "pretrain", &c.pretrain);
  if (const Json *j = o.Child("finetune")) ParseTrain(*j, "finetune", &c.finetune);
  c.pretrain.seed = c.finetune.seed = c.seed;

  if (const Json *j = o.Child("vocoder")) {
    StrictObject vo(*j, "vocoder");
    std::string kind = vocoder::VocoderKindName(c.vocoder.kind);
    vo.Get("kind", &kind);
    c.vocoder.kind = vocoder::ParseVocoderKind(kind);
    vo.Get("griffinlim_iterations", &c.vocoder.griffinlim_iterations);
    if (const Json *x = vo.Child("external")) {
      StrictObject xo(*x, "vocoder.external");
      std::string dir;
      xo.Get("command", &c.vocoder.external.command);
      xo.Get("exchange_dir", &dir);
      xo.Get("timeout_s", &c.vocoder.external.timeout_s);
      xo.Finish();
      c.vocoder.external.exchange_dir = Resolve(base_dir, dir);
    }
    vo.Finish();
  }
  if (c.vocoder.external.exchange_dir.empty())
    c.vocoder.external.exchange_dir = c.out_dir / "synthesize" / "exchange";

  if (const Json *j = o.Child("synthesize")) {
    StrictObject so(*j, "synthesize");
    std::string sentences;
    so.Get("speakers", &c.synthesize.speakers);
    so.Get("sentences", &sentences);
    so.Get("source_tag", &c.synthesize.source_tag);
    so.Get("output_rates", &c.synthesize.output_rates);
    so.Get("pace", &c.synthesize.pace);
    so.Get("pitch_shift_hz", &c.synthesize.pitch_shift_hz);
    so.Get("max_failure_fraction", &c.synthesize.max_failure_fraction);
    so.Finish();
    c.synthesize.sentences = Resolve(base_dir, sentences);
  }

  auto &e = c.evaluate;
  bool have_sets = false;
  if (const Json *j = o.Child("evaluate")) {
    StrictObject eo(*j, "evaluate");
    eo.Get("sample_size", &e.sample_size);
    if (const Json *sets = eo.Child("sets")) {
      if (!sets->is_array()) Fail(ErrorKind::kValidation, "config: evaluate.sets must be an array");
      have_sets = true;
      for (size_t i = 0; i < sets->size(); ++i) {
        const std::string key = "evaluate.sets[" + std::to_string(i) + "]";
        StrictObject so((*sets)[i], key);
        EvalSet set;
        std::string source = "synthesized", manifest;
        so.Get("name", &set.name);
        so.Get("source", &source);
        so.Get("manifest", &manifest);
        so.Get("rate", &set.rate);
        so.Finish();
        set.source = ParseSetSource(source, key + ".source");
        set.manifest = Resolve(base_dir, manifest);
        e.sets.push_back(set);
      }
    }
    if (const Json *sim = eo.Child("similarity")) {
      StrictObject so(*sim, "evaluate.similarity");
      so.Get("set_a", &e.similarity_set_a);
      so.Get("set_b", &e.similarity_set_b);
      so.Get("max_speakers_a", &e.max_speakers_a);
      so.Get("max_speakers_b", &e.max_speakers_b);
      so.Finish();
    }
    if (const Json *ad = eo.Child("adapters")) {
      StrictObject ao(*ad, "evaluate.adapters");
      if (const Json *x = ao.Child("mos")) ParseAdapter(*x, "evaluate.adapters.mos", base_dir, &e.mos);
      if (const Json *x = ao.Child("asr")) ParseAdapter(*x, "evaluate.adapters.asr", base_dir, &e.asr);
      if (const Json *x = ao.Child("embedding"))
        ParseAdapter(*x, "evaluate.adapters.embedding", base_dir, &e.embedding);
      ao.Finish();
    }
    eo.Finish();
  }
  if (!have_sets) {
    e.sets = {{"synthetic child", SetSource::kSynthesized, {}, 0},
              {"real child", SetSource::kFinetune, {}, 0}};
    if (e.similarity_set_a.empty() && e.similarity_set_b.empty()) {
      e.similarity_set_a = "synthetic child";
      e.similarity_set_b = "real child";
    }
  }
  for (auto [a, name] : {std::pair{&e.mos, "mos"}, {&e.asr, "asr"}, {&e.embedding, "embedding"}})
    if (a->exchange_dir.empty()) a->exchange_dir = c.out_dir / "evaluate" / "exchange" / name;
  o.Finish();
  Validate(c);
  return c;
}

Json RunConfigToJson(const RunConfig &c) {
  Json pre = ToJson(c.pretrain), fine = ToJson(c.finetune);
  pre.erase("seed");
  fine.erase("seed");
  Json sets = Json::array();
  for (const auto &s : c.evaluate.sets)
    sets.push_back({{"name", s.name},
                    {"source", SetSourceName(s.source)},
                    {"manifest", s.manifest.string()},
                    {"rate", s.rate}});
  return {
      {"seed", c.seed},
      {"out_dir", c.out_dir.string()},
      {"corpus",
       {{"pretrain_manifest", c.pretrain_manifest.string()},
        {"finetune_manifest", c.finetune_manifest.string()}}},
      {"mel", ToJson(c.mel)},
      {"f0", ToJson(c.f0)},
      {"model", ToJson(c.model)},
      {"pretrain", pre},
      {"finetune", fine},
      {"vocoder",
       {{"kind", vocoder::VocoderKindName(c.vocoder.kind)},
        {"griffinlim_iterations", c.vocoder.griffinlim_iterations},
        {"external",
         {{"command", c.vocoder.external.command},
          {"exchange_dir", c.vocoder.external.exchange_dir.string()},
          {"timeout_s", c.vocoder.external.timeout_s}}}}},
      {"synthesize",
       {{"speakers", c.synthesize.speakers},
        {"sentences", c.synthesize.sentences.string()},
        {"source_tag", c.synthesize.source_tag},
        {"output_rates", c.synthesize.output_rates},
        {"pace", c.synthesize.pace},
        {"pitch_shift_hz", c.synthesize.pitch_shift_hz},
        {"max_failure_fraction", c.synthesize.max_failure_fraction}}},
      {"evaluate",
       {{"sample_size", c.evaluate.sample_size},
        {"sets", sets},
        {"similarity",
         {{"set_a", c.evaluate.similarity_set_a},
          {"set_b", c.evaluate.similarity_set_b},
          {"max_speakers_a", c.evaluate.max_speakers_a},
          {"max_speakers_b", c.evaluate.max_speakers_b}}},
        {"adapters",
         {{"mos", AdapterToJson(c.evaluate.mos)},
          {"asr", AdapterToJson(c.evaluate.asr)},
          {"embedding", AdapterToJson(c.evaluate.embedding)}}}}},
  };
}

void ApplyOverride(Json *doc, const std::string &assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    Fail(ErrorKind::kValidation, "override '" + assignment + "' is not of the form key.path=value");
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::exception &) {
    value = text;
  }
  Json *node = doc;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) Fail(ErrorKind::kValidation, "override '" + assignment + "' has an empty key");
    if (!node->is_object())
      Fail(ErrorKind::kValidation, "override '" + assignment + "': '" + path.substr(0, start - 1) +
                                       "' is not an object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = Json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig LoadRunConfig(const CommandOptions &opts) {
  if (opts.config.empty()) Fail(ErrorKind::kValidation, "no configuration file given (--config)");
  if (!fs::exists(opts.config)) Fail(ErrorKind::kIo, "configuration file not found: " + opts.config.string());
  Json doc;
  try {
    doc = Json::parse(ReadFileBytes(opts.config));
  } catch (const Json::exception &e) {
    Fail(ErrorKind::kValidation, "configuration " + opts.config.string() + " is not valid JSON: " + e.what());
  }
  for (const auto &o : opts.overrides) ApplyOverride(&doc, o);
  if (opts.seed) doc["seed"] = *opts.seed;
  if (opts.out_dir) doc["out_dir"] = fs::absolute(*opts.out_dir).string();
  return ParseRunConfig(doc, fs::absolute(opts.config).parent_path());
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return 2;
    case ErrorKind::kIo: return 3;
    case ErrorKind::kMissingArtifact: return 4;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kRuntime: return 5;
  }
  return 5;
}

// ---- stages ---------------------------------------------------------------

namespace {

struct Layout {
  fs::path root;
  fs::path Stage(const char *s) const { return root / s; }
  fs::path PreparedPretrain() const { return root / "prepare" / "pretrain.jsonl"; }
  fs::path PreparedFinetune() const { return root / "prepare" / "finetune.jsonl"; }
  fs::path FeatureCache() const { return root / "features"; }
  fs::path PretrainCkpt() const { return root / "pretrain" / "checkpoint.ckpt"; }
  fs::path FinetuneCkpt() const { return root / "finetune" / "checkpoint.ckpt"; }
  fs::path Synthesized(int sr) const { return root / "synthesize" / std::to_string(sr) / "manifest.jsonl"; }
  fs::path Evaluation() const { return root / "evaluate" / "evaluation.json"; }
};

void NeedArtifact(const fs::path &p, const std::string &stage, const std::string &producer) {
  if (!fs::exists(p))
    Fail(ErrorKind::kMissingArtifact, stage + " needs " + p.string() + ", produced by " + producer +
                                          "; run the stages in order: " + kStageOrder);
}

class RunRecord {
 public:
  RunRecord(const RunConfig &c, std::string command)
      : command_(std::move(command)), config_(RunConfigToJson(c)), seed_(c.seed),
        start_(std::chrono::steady_clock::now()) {}

  Json &details() { return details_; }
  void Artifact(const std::string &name, const fs::path &p) { artifacts_[name] = p.string(); }

  void Write(const fs::path &dir) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json j{{"command", command_},
           {"config_hash", Sha256Hex(config_.dump())},
           {"seed", seed_},
           {"version", kVersion},
           {"wall_time_s", wall},
           {"config", config_},
           {"artifacts", artifacts_},
           {"details", details_}};
    WriteFileAtomic(dir / "run.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  Json config_;
  uint64_t seed_;
  std::chrono::steady_clock::time_point start_;
  Json artifacts_ = Json::object();
  Json details_ = Json::object();
};

corpus::CorpusManifest Absolutize(corpus::CorpusManifest m) {
  for (auto &r : m.records) r.audio_path = fs::absolute(m.ResolveAudio(r)).lexically_normal().string();
  return m;
}

std::vector<acoustic::TrainingExample> Features(const RunConfig &c, const corpus::CorpusManifest &m,
                                                trainer::FeatureCacheStats *stats = nullptr) {
  return trainer::LoadExamples(m, c.mel, c.f0, Layout{c.out_dir}.FeatureCache(), stats);
}

Json LossJson(const acoustic::LossComponents &l) {
  return {{"mel_mse", l.mel_mse}, {"duration", l.duration}, {"pitch", l.pitch}, {"align", l.align},
          {"total", l.total}};
}

void RequireSameModel(const RunConfig &c, const trainer::CheckpointBundle &b, const fs::path &p) {
  acoustic::ModelCfg expect = c.model;
  expect.max_speakers = b.model.cfg.max_speakers;  // the table grows as speakers are added
  if (!(expect == b.model.cfg) || !(c.mel == b.model.mel_cfg))
    Fail(ErrorKind::kValidation, "config: model or mel section differs from checkpoint " + p.string());
}

}  // namespace

void CmdPrepare(const RunConfig &c) {
  const Layout L{c.out_dir};
  RunRecord rec(c, "prepare");
  Json &d = rec.details();
  for (auto [src, dst, name] : {std::tuple{c.pretrain_manifest, L.PreparedPretrain(), "pretrain"},
                                {c.finetune_manifest, L.PreparedFinetune(), "finetune"}}) {
    if (!fs::exists(src)) Fail(ErrorKind::kIo, std::string(name) + " manifest not found: " + src.string());
    const corpus::CorpusManifest m = Absolutize(corpus::LoadManifest(src));
    trainer::FeatureCacheStats stats;
    Features(c, m, &stats);
    corpus::SaveManifest(m, dst);
    rec.Artifact(std::string(name) + "_manifest", dst);
    d[name] = {{"utterances", m.records.size()},
               {"speakers", m.Speakers()},
               {"hours", m.TotalHours()},
               {"features_built", stats.built},
               {"features_reused", stats.reused}};
  }
  rec.Artifact("feature_cache", L.FeatureCache());
  rec.Write(L.Stage("prepare"));
}

void CmdPretrain(const RunConfig &c) {
  const Layout L{c.out_dir};
  NeedArtifact(L.PreparedPretrain(), "pretrain", "prepare");
  RunRecord rec(c, "pretrain");
  const corpus::CorpusManifest m = corpus::LoadManifest(L.PreparedPretrain());
  const auto data = Features(c, m);
  const fs::path dir = L.Stage("pretrain");
  auto save_step = [&](const trainer::CheckpointBundle &b) {
    char name[64];
    std::snprintf(name, sizeof(name), "step_%06d.ckpt", b.step);
    trainer::SaveCheckpoint(b, dir / name);
  };
  const auto res = trainer::Pretrain(data, c.model, c.mel, c.pretrain, trainer::CorpusFingerprint(m), save_step);
  trainer::SaveCheckpoint(res.bundle, L.PretrainCkpt());
  WriteFileAtomic(dir / "loss.csv", res.curve.ToCsv());
  rec.Artifact("checkpoint", L.PretrainCkpt());
  rec.Artifact("loss_curve", dir / "loss.csv");
  rec.details() = {{"steps", res.bundle.step},
                   {"parameters", nn::CountParameters(res.bundle.model.params)},
                   {"final_loss", LossJson(res.curve.rows().back().losses)}};
  rec.Write(dir);
}

void CmdFinetune(const RunConfig &c) {
  const Layout L{c.out_dir};
  NeedArtifact(L.PretrainCkpt(), "finetune", "pretrain");
  NeedArtifact(L.PreparedFinetune(), "finetune", "prepare");
  RunRecord rec(c, "finetune");
  const trainer::CheckpointBundle start = trainer::LoadCheckpoint(L.PretrainCkpt());
  RequireSameModel(c, start, L.PretrainCkpt());
  const corpus::CorpusManifest m = corpus::LoadManifest(L.PreparedFinetune());
  const auto data = Features(c, m);
  const fs::path dir = L.Stage("finetune");
  auto save_step = [&](const trainer::CheckpointBundle &b) {
    char name[64];
    std::snprintf(name, sizeof(name), "step_%06d.ckpt", b.step);
    trainer::SaveCheckpoint(b, dir / name);
  };
  const auto res = trainer::Finetune(start, data, c.finetune, trainer::CorpusFingerprint(m), save_step);
  trainer::SaveCheckpoint(res.bundle, L.FinetuneCkpt());
  WriteFileAtomic(dir / "loss.csv", res.curve.ToCsv());
  rec.Artifact("checkpoint", L.FinetuneCkpt());
  rec.Artifact("loss_curve", dir / "loss.csv");
  const fs::path pre_curve = L.Stage("pretrain") / "loss.csv";
  if (fs::exists(pre_curve)) {
    trainer::LossCurve all = trainer::LossCurve::FromCsv(ReadFileBytes(pre_curve));
    all.Extend(res.curve);
    WriteFileAtomic(dir / "curve_all.csv", all.ToCsv());
    rec.Artifact("combined_loss_curve", dir / "curve_all.csv");
  }
  rec.details() = {{"start_step", start.step},
                   {"steps", res.bundle.step},
                   {"speakers", res.bundle.model.speakers.Labels()},
                   {"final_loss", LossJson(res.curve.rows().back().losses)}};
  rec.Write(dir);
}

void CmdSynthesize(const RunConfig &c) {
  const Layout L{c.out_dir};
  NeedArtifact(L.FinetuneCkpt(), "synthesize", "finetune");
  RunRecord rec(c, "synthesize");
  synthgen::GenerationJob job;
  job.checkpoint = L.FinetuneCkpt();
  job.speakers = c.synthesize.speakers;
  if (job.speakers.empty()) {
    NeedArtifact(L.PreparedFinetune(), "synthesize", "prepare");
    job.speakers = corpus::LoadManifest(L.PreparedFinetune(), {.check_audio = false}).Speakers();
  }
  job.sentences = synthgen::LoadSentenceList(c.synthesize.sentences, c.synthesize.source_tag);
  job.vocoder = c.vocoder;
  job.output_rates = c.synthesize.output_rates;
  job.seed = c.seed;
  job.pace = c.synthesize.pace;
  job.pitch_shift_hz = c.synthesize.pitch_shift_hz;
  job.max_failure_fraction = c.synthesize.max_failure_fraction;
  const fs::path dir = L.Stage("synthesize");
  const auto res = synthgen::GenerateDataset(job, dir);
  Json failures = Json::array();
  for (const auto &f : res.failures) failures.push_back({{"index", f.index}, {"message", f.message}});
  for (const auto &[sr, m] : res.manifests) rec.Artifact("manifest_" + std::to_string(sr), L.Synthesized(sr));
  const auto &dm = res.demographics;
  rec.details() = {{"native_rate", res.native_rate},
                   {"speakers", job.speakers},
                   {"sentences", job.sentences.sentences.size()},
                   {"demographics",
                    {{"n_speakers", dm.n_speakers},
                     {"hours", dm.hours},
                     {"n_utterances", dm.n_utterances},
                     {"per_speaker_minutes", dm.per_speaker_minutes}}},
                   {"failures", failures}};
  rec.Write(dir);
}

void CmdEvaluate(const RunConfig &c) {
  const Layout L{c.out_dir};
  const auto &e = c.evaluate;
  // Every input must exist before any adapter runs.
  std::vector<fs::path> manifests;
  for (const auto &set : e.sets) {
    fs::path p;
    switch (set.source) {
      case SetSource::kSynthesized: {
        int sr = set.rate;
        if (sr == 0) sr = c.mel.sample_rate;
        p = L.Synthesized(sr);
        NeedArtifact(p, "evaluate", "synthesize");
        break;
      }
      case SetSource::kPretrain:
        p = L.PreparedPretrain();
        NeedArtifact(p, "evaluate", "prepare");
        break;
      case SetSource::kFinetune:
        p = L.PreparedFinetune();
        NeedArtifact(p, "evaluate", "prepare");
        break;
      case SetSource::kManifest:
        p = set.manifest;
        if (!fs::exists(p)) Fail(ErrorKind::kIo, "evaluate set '" + set.name + "' manifest not found: " + p.string());
        break;
    }
    manifests.push_back(p);
  }
  RunRecord rec(c, "evaluate");
  Json out{{"sample_seed", c.seed}, {"sample_size", e.sample_size}, {"sets", Json::array()}};
  std::map<std::string, eval::SpeakerVectors> speaker_vectors;
  std::vector<eval::ProjectionPoint> points;
  std::vector<std::vector<double>> point_vectors;

  for (size_t s = 0; s < e.sets.size(); ++s) {
    const auto &set = e.sets[s];
    const corpus::CorpusManifest full = corpus::LoadManifest(manifests[s]);
    corpus::CorpusManifest m = full;
    m.records.clear();
    for (int i : eval::SampleIndices(static_cast<int>(full.records.size()), e.sample_size, c.seed))
      m.records.push_back(full.records[i]);
    const auto items = eval::ItemsFromManifest(m);

    const auto mos = eval::RunMosAdapter(items, e.mos);
    std::vector<double> scores;
    Json per_mos = Json::object();
    for (const auto &it : items)
      if (auto f = mos.values.find(it.id); f != mos.values.end()) {
        scores.push_back(f->second);
        per_mos[it.id] = f->second;
      }
    if (scores.size() < 2)
      Fail(ErrorKind::kRuntime, "evaluate set '" + set.name + "': fewer than 2 MOS scores");
    const eval::MosReport mr = eval::AggregateMos(scores);

    const auto asr = eval::RunAsrAdapter(items, e.asr);
    std::vector<eval::WerPair> pairs;
    for (const auto &it : items)
      if (auto f = asr.values.find(it.id); f != asr.values.end())
        pairs.push_back({it.id, *it.reference, f->second});
    if (pairs.empty()) Fail(ErrorKind::kRuntime, "evaluate set '" + set.name + "': no ASR hypotheses");
    const eval::WerReport wr = eval::CorpusWer(pairs);
    Json per_wer = Json::array();
    for (const auto &u : wr.per_utterance)
      per_wer.push_back({{"id", u.id},
                         {"substitutions", u.substitutions},
                         {"insertions", u.insertions},
                         {"deletions", u.deletions},
                         {"n_ref_words", u.n_ref_words},
                         {"wer", u.wer}});

    const auto emb = eval::RunEmbeddingAdapter(items, e.embedding);
    std::map<std::string, eval::EmbeddingSet> by_speaker;
    for (size_t i = 0; i < items.size(); ++i) {
      auto f = emb.values.find(items[i].id);
      if (f == emb.values.end()) continue;
      auto &es = by_speaker[m.records[i].speaker_id];
      es.speaker = m.records[i].speaker_id;
      es.encoder_tag = e.embedding.external() ? "external" : "builtin";
      es.vectors.push_back(f->second);
      points.push_back({m.records[i].speaker_id, set.name, 0.0, 0.0});
      point_vectors.push_back(f->second);
    }
    Json spk_json = Json::object();
    for (const auto &[label, es] : by_speaker) {
      speaker_vectors[set.name][label] = eval::AverageEmbeddings(es);
      spk_json[label] = speaker_vectors[set.name][label];
    }

    auto failures = [](const std::map<std::string, std::string> &f) {
      Json j = Json::object();
      for (const auto &[id, msg] : f) j[id] = msg;
      return j;
    };
    out["sets"].push_back(
        {{"name", set.name},
         {"manifest", manifests[s].string()},
         {"n_items", items.size()},
         {"mos", {{"mean", mr.mean}, {"ci95", mr.ci95}, {"n", mr.n}, {"scores", per_mos}}},
         {"mos_failures", failures(mos.failures)},
         {"wer",
          {{"wer", wr.wer},
           {"substitutions", wr.substitutions},
           {"insertions", wr.insertions},
           {"deletions", wr.deletions},
           {"n_ref_words", wr.n_ref_words},
           {"per_utterance", per_wer}}},
         {"asr_failures", failures(asr.failures)},
         {"embedding_failures", failures(emb.failures)},
         {"speaker_embeddings", spk_json}});
  }

  out["similarity"] = nullptr;
  if (!e.similarity_set_a.empty()) {
    auto take = [](const eval::SpeakerVectors &v, int k) {
      eval::SpeakerVectors r;
      for (const auto &[label, vec] : v) {
        if (static_cast<int>(r.size()) == k) break;
        r[label] = vec;
      }
      return r;
    };
    const auto sim = eval::CrossSimilarity(take(speaker_vectors[e.similarity_set_a], e.max_speakers_a),
                                           take(speaker_vectors[e.similarity_set_b], e.max_speakers_b));
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < sim.matrix.rows(); ++i)
      rows.emplace_back(sim.matrix.row(i).begin(), sim.matrix.row(i).end());
    out["similarity"] = {{"set_a", e.similarity_set_a},
                         {"set_b", e.similarity_set_b},
                         {"row_labels", sim.row_labels},
                         {"col_labels", sim.col_labels},
                         {"matrix", rows},
                         {"min", sim.summary.min},
                         {"max", sim.summary.max},
                         {"mean", sim.summary.mean}};
  }

  Json proj = Json::array();
  if (point_vectors.size() >= 3) {
    const Matrix xy = eval::Project2d(point_vectors);
    for (size_t i = 0; i < points.size(); ++i)
      proj.push_back({{"label", points[i].label}, {"set", points[i].set}, {"x", xy(i, 0)}, {"y", xy(i, 1)}});
  }
  out["projection"] = proj;

  const fs::path dir = L.Stage("evaluate");
  WriteFileAtomic(L.Evaluation(), out.dump(2) + "\n");
  rec.Artifact("evaluation", L.Evaluation());
  Json summary = Json::object();
  for (const auto &s : out["sets"])
    summary[s["name"].get<std::string>()] = {{"mos", s["mos"]["mean"]}, {"wer", s["wer"]["wer"]}};
  rec.details() = summary;
  rec.Write(dir);
}

void CmdReport(const RunConfig &c) {
  const Layout L{c.out_dir};
  NeedArtifact(L.Evaluation(), "report", "evaluate");
  RunRecord rec(c, "report");
  Json ev;
  try {
    ev = Json::parse(ReadFileBytes(L.Evaluation()));
    eval::ReportInputs in;
    in.sample_seed = ev.at("sample_seed").get<uint64_t>();
    in.sample_size = ev.at("sample_size").get<int>();
    for (const auto &s : ev.at("sets")) {
      const std::string name = s.at("name");
      eval::MosRow mr{name, {}};
      mr.report.mean = s.at("mos").at("mean");
      mr.report.ci95 = s.at("mos").at("ci95");
      mr.report.n = s.at("mos").at("n");
      in.mos.push_back(mr);
      eval::WerRow wr{name, {}};
      const auto &w = s.at("wer");
      wr.report.wer = w.at("wer");
      wr.report.substitutions = w.at("substitutions");
      wr.report.insertions = w.at("insertions");
      wr.report.deletions = w.at("deletions");
      wr.report.n_ref_words = w.at("n_ref_words");
      in.wer.push_back(wr);
    }
    if (!ev.at("similarity").is_null()) {
      const auto &s = ev["similarity"];
      eval::SpeakerSimReport r;
      r.row_labels = s.at("row_labels").get<std::vector<std::string>>();
      r.col_labels = s.at("col_labels").get<std::vector<std::string>>();
      const auto rows = s.at("matrix").get<std::vector<std::vector<double>>>();
      r.matrix.resize(r.row_labels.size(), r.col_labels.size());
      for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) r.matrix(i, j) = rows[i][j];
      r.summary = {s.at("min"), s.at("max"), s.at("mean")};
      in.similarity = r;
    }
    for (const auto &p : ev.at("projection"))
      in.projection.push_back({p.at("label"), p.at("set"), p.at("x"), p.at("y")});
    const auto files = eval::RenderReport(in, L.Stage("report"));
    rec.Artifact("mos_table", files.mos_csv);
    rec.Artifact("wer_table", files.wer_csv);
    rec.Artifact("similarity_table", files.similarity_summary_csv);
    rec.Artifact("similarity_matrix", files.similarity_csv);
    rec.Artifact("projection", files.projection_csv);
    rec.Artifact("summary", files.summary_md);
  } catch (const Json::exception &x) {
    Fail(ErrorKind::kIo, "corrupt evaluation file " + L.Evaluation().string() + ": " + x.what());
  }
  rec.Write(L.Stage("report"));
}

}  // namespace childtts::pipeline
