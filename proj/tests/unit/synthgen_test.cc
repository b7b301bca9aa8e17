// tests/unit/synthgen_test.cc

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

#include "json.hpp"
#include "doctest.h"

#include "childtts/synthgen.h"
#include "childtts/trainer.h"
#include "test_util.h"

using namespace childtts;
using namespace childtts::synthgen;
using testing::ErrorKindOf;
using testing::Kind;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CHILDTTS_FIXTURES;

fs::path TinyCheckpoint(const fs::path &dir) {
  acoustic::ModelCfg m = testing::TinyModelCfg();
  m.vocab_size = corpus::VocabSize(corpus::kGraphemeTokenset);
  std::vector<acoustic::TrainingExample> data;
  for (int i = 0; i < 3; ++i) data.push_back(testing::RandomExample(m, 4, 9, i ? "kid_b" : "kid_a", i));
  trainer::TrainCfg t;
  t.max_steps = 2;
  t.batch_size = 2;
  t.warmup_steps = 2;
  const auto res = trainer::Pretrain(data, m, testing::TinyMelCfg(), t, "fp");
  const fs::path p = dir / "tiny.ckpt";
  trainer::SaveCheckpoint(res.bundle, p);
  return p;
}

GenerationJob Job(const fs::path &ckpt) {
  GenerationJob job;
  job.checkpoint = ckpt;
  job.speakers = {"kid_b", "kid_a"};
  job.sentences = {{"the cat sat", "a dog ran fast", "hello there"}, "unit"};
  job.vocoder.griffinlim_iterations = 4;
  job.output_rates = {22050, 16000};
  job.seed = 11;
  return job;
}

corpus::CorpusManifest Records(const std::vector<std::pair<std::string, double>> &spk_secs) {
  corpus::CorpusManifest m;
  int i = 0;
  for (const auto &[s, secs] : spk_secs)
    m.records.push_back({"u" + std::to_string(i++), "x.wav", "hi", s, secs, 16000});
  return m;
}

}  // namespace

TEST_CASE("demographics arithmetic") {
  const Demographics d = MakeDemographics(40, 29.02, 100);
  CHECK(d.per_speaker_minutes == doctest::Approx(29.02 * 60.0 / 40.0));
  CHECK(MakeDemographics(2, 47.61, 1).PerSpeakerHours() == doctest::Approx(23.805));
  const Demographics c = ComputeDemographics(Records({{"a", 1800}, {"b", 1800}, {"a", 3600}}));
  CHECK(c.n_speakers == 2);
  CHECK(c.n_utterances == 3);
  CHECK(c.hours == doctest::Approx(2.0));
  CHECK(c.per_speaker_minutes == doctest::Approx(60.0));
  const auto j = nlohmann::json::parse(DemographicsToJson(c));
  CHECK(j.at("n_speakers") == 2);
  CHECK(ErrorKindOf([] { MakeDemographics(0, 1.0, 1); }) == Kind(ErrorKind::kInvalidArgument));
}

TEST_CASE("speaker ranking") {
  const auto m = Records({{"c", 10}, {"a", 5}, {"b", 5}, {"a", 5}, {"d", 1}});
  const auto r = RankSpeakersByData(m);
  REQUIRE(r.size() == 4);
  CHECK(r[0].first == "a");  // 10 s, tie with c broken by label
  CHECK(r[1].first == "c");
  CHECK(r[2].first == "b");
  CHECK(SelectTopSpeakers(m, 2) == std::vector<std::string>{"a", "c"});
  CHECK(ErrorKindOf([&] { SelectTopSpeakers(m, 5); }) == Kind(ErrorKind::kInvalidArgument));
}

TEST_CASE("sentence lists") {
  const fs::path dir = testing::TempDir("sent");
  WriteFileAtomic(dir / "s.txt", "first one\n\n  \nsecond one\n");
  const SentenceList s = LoadSentenceList(dir / "s.txt", "tag");
  CHECK(s.sentences == std::vector<std::string>{"first one", "second one"});
  CHECK(s.source_tag == "tag");
  CHECK(ErrorKindOf([&] { LoadSentenceList(dir / "none.txt", "x"); }) == Kind(ErrorKind::kIo));
  SentenceList bad{{"ok", "###"}, "x"};
  CHECK(ErrorKindOf([&] { bad.Validate(); }) == Kind(ErrorKind::kValidation));
  fs::remove_all(dir);
}

TEST_CASE("generate dataset at two rates") {
  const fs::path dir = testing::TempDir("gen");
  const GenerationJob job = Job(TinyCheckpoint(dir));
  const GenerationResult r = GenerateDataset(job, dir / "out");
  CHECK(r.native_rate == 22050);
  CHECK(r.failures.empty());
  REQUIRE(r.manifests.size() == 2);
  for (const auto &[sr, m] : r.manifests) {
    CHECK(m.records.size() == 6);
    CHECK(m.records[0].speaker_id == "kid_b");
    CHECK(m.records[0].audio_path == "kid_b/kid_b_0000.wav");
    CHECK(m.records[5].audio_path == "kid_a/kid_a_0002.wav");
    CHECK(m.records[1].transcript == "a dog ran fast");
    CHECK(m.split_tag == corpus::SplitTag::kSynth);
    const dsp::Waveform w = dsp::ReadWav(dir / "out" / std::to_string(sr) / m.records[0].audio_path);
    CHECK(w.sample_rate == sr);
    CHECK(fs::exists(dir / "out" / std::to_string(sr) / "demographics.json"));
    CHECK(fs::exists(dir / "out" / std::to_string(sr) / "manifest.jsonl"));
  }
  CHECK(r.demographics.n_speakers == 2);
  CHECK(r.demographics.n_utterances == 6);

  // Same seed, same audio.
  const GenerationResult again = GenerateDataset(job, dir / "again");
  CHECK(ReadFileBytes(dir / "out/22050/kid_a/kid_a_0001.wav") ==
        ReadFileBytes(dir / "again/22050/kid_a/kid_a_0001.wav"));

  // Conversion keeps relative paths and refuses to overwrite the source.
  const auto conv = ConvertDatasetRate(r.manifests.at(22050), 16000, dir / "conv");
  CHECK(conv.records[3].audio_path == r.manifests.at(22050).records[3].audio_path);
  CHECK(dsp::ReadWav(dir / "conv" / conv.records[3].audio_path).sample_rate == 16000);
  CHECK(ErrorKindOf([&] { ConvertDatasetRate(r.manifests.at(22050), 16000, dir / "out" / "22050"); }) ==
        Kind(ErrorKind::kInvalidArgument));
  fs::remove_all(dir);
}

TEST_CASE("generation job errors and partial failures") {
  const fs::path dir = testing::TempDir("genfail");
  GenerationJob job = Job(TinyCheckpoint(dir));
  job.speakers = {"kid_a", "adult_x"};
  CHECK(ErrorKindOf([&] { GenerateDataset(job, dir / "o1"); }) == Kind(ErrorKind::kValidation));
  job = Job(job.checkpoint);
  job.output_rates = {8000};
  CHECK(ErrorKindOf([&] { GenerateDataset(job, dir / "o2"); }) == Kind(ErrorKind::kValidation));
  job = Job(dir / "missing.ckpt");
  CHECK(ErrorKindOf([&] { GenerateDataset(job, dir / "o3"); }) == Kind(ErrorKind::kMissingArtifact));

  job = Job(TinyCheckpoint(dir));
  job.output_rates = {22050};
  job.vocoder.kind = vocoder::VocoderKind::kExternal;
  job.vocoder.external.command =
      "python3 '" + (kFixtures / "mock_vocoder.py").string() + "' {dir} {ids} --fail-id kid_a_0001";
  job.vocoder.external.exchange_dir = dir / "xchg";
  CHECK(ErrorKindOf([&] { GenerateDataset(job, dir / "o4"); }) == Kind(ErrorKind::kRuntime));
  job.max_failure_fraction = 0.2;
  const GenerationResult r = GenerateDataset(job, dir / "o5");
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].index == 4);
  CHECK(r.failures[0].message.find("kid_a_0001") != std::string::npos);
  CHECK(r.manifests.at(22050).records.size() == 5);
  fs::remove_all(dir);
}
