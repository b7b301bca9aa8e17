// tests/unit/trainer_test.cc

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

#include <cmath>

#include "doctest.h"

#include "childtts/toycorpus.h"
#include "childtts/trainer.h"
#include "test_util.h"

using namespace childtts;
using namespace childtts::trainer;
using testing::ErrorKindOf;
using testing::Kind;
namespace fs = std::filesystem;

namespace {

LossCurve CurveOf(const std::vector<double> &totals, int first_step = 1) {
  LossCurve c;
  for (size_t i = 0; i < totals.size(); ++i) {
    LossRow r;
    r.step = first_step + static_cast<int>(i);
    r.losses.total = totals[i];
    r.losses.mel_mse = totals[i] / 3.0;
    c.Append(r);
  }
  return c;
}

std::vector<acoustic::TrainingExample> TinyData(const acoustic::ModelCfg &m) {
  std::vector<acoustic::TrainingExample> data;
  for (int i = 0; i < 5; ++i)
    data.push_back(testing::RandomExample(m, 3 + i % 2, 7 + i, i % 2 ? "b" : "a", 40 + i));
  return data;
}

TrainCfg TinyTrain(int steps) {
  TrainCfg t;
  t.base_lr = 1e-2;
  t.warmup_steps = 4;
  t.batch_size = 2;
  t.max_steps = steps;
  t.seed = 3;
  return t;
}

}  // namespace

TEST_CASE("learning rate schedule") {
  TrainCfg c;
  c.base_lr = 0.1;
  c.warmup_steps = 100;
  CHECK(LrAtStep(100, c) == doctest::Approx(0.1));
  CHECK(LrAtStep(50, c) == doctest::Approx(0.05));
  CHECK(LrAtStep(400, c) == doctest::Approx(0.05));
  CHECK(LrAtStep(1, c) == doctest::Approx(0.1 * 10.0 * std::pow(100.0, -1.5)));
  for (int s = 1; s < 300; ++s) CHECK(LrAtStep(s, c) <= LrAtStep(100, c) + 1e-15);
}

TEST_CASE("loss curve csv is exact") {
  LossCurve c = CurveOf({1.0 / 3.0, std::acos(-1.0), 1e-300, 12345.678901234567});
  const LossCurve r = LossCurve::FromCsv(c.ToCsv());
  REQUIRE(r.rows().size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(r.rows()[i].step == c.rows()[i].step);
    CHECK(r.rows()[i].losses.total == c.rows()[i].losses.total);
  }
  CHECK(ErrorKindOf([&] { c.Append(c.rows().back()); }) == Kind(ErrorKind::kInvalidArgument));
  CHECK(ErrorKindOf([] { LossCurve::FromCsv("nope\n1,2\n"); }) == Kind(ErrorKind::kValidation));
  LossCurve joined = CurveOf({3, 2});
  joined.Extend(CurveOf({1}, 3));
  CHECK(joined.rows().size() == 3);
  CHECK(CurveValues(joined, CurveMetric::kMelMse)[0] == doctest::Approx(1.0));
}

TEST_CASE("smoothing and early stop") {
  const std::vector<double> x{4, 2, 6, 8};
  CHECK(Smooth(x, 2) == std::vector<double>{4, 3, 4, 7});
  CHECK(Smooth(x, 1) == x);
  // Falls steadily for 100 rows, then flat.
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(100.0 - i);
  for (int i = 0; i < 200; ++i) v.push_back(1.0);
  const LossCurve c = CurveOf(v);
  const auto stop = FirstEarlyStopStep(c, 60);
  REQUIRE(stop.has_value());
  CHECK(*stop > 100);
  CHECK(*stop <= 300);
  CHECK(EarlyStopCheck(c, 60));
  std::vector<double> falling;
  for (int i = 0; i < 300; ++i) falling.push_back(1000.0 * std::pow(0.98, i));
  CHECK(!FirstEarlyStopStep(CurveOf(falling), 60).has_value());
}

TEST_CASE("checkpoint round trip and corruption") {
  const acoustic::ModelCfg m = testing::TinyModelCfg();
  const auto res = Pretrain(TinyData(m), m, testing::TinyMelCfg(), TinyTrain(3), "fp");
  const std::string bytes = EncodeCheckpoint(res.bundle);
  const CheckpointBundle b = DecodeCheckpoint(bytes);
  CHECK(b.step == 3);
  CHECK(b.corpus_fingerprint == "fp");
  CHECK(b.train_cfg == res.bundle.train_cfg);
  CHECK(b.model.cfg == m);
  CHECK(b.model.params == res.bundle.model.params);
  CHECK(b.optimizer.v == res.bundle.optimizer.v);
  CHECK(b.model.speakers.Labels() == std::vector<std::string>{"a", "b"});
  CHECK(EncodeCheckpoint(b) == bytes);

  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  CHECK(ErrorKindOf([&] { DecodeCheckpoint(flipped); }) == Kind(ErrorKind::kIo));
  CHECK(ErrorKindOf([&] { DecodeCheckpoint(bytes.substr(0, bytes.size() - 9)); }) ==
        Kind(ErrorKind::kIo));
  CHECK(ErrorKindOf([&] { DecodeCheckpoint("NOTACKPT" + bytes.substr(8)); }) == Kind(ErrorKind::kIo));
  CHECK(ErrorKindOf([] { LoadCheckpoint("/nonexistent/x.ckpt"); }) ==
        Kind(ErrorKind::kMissingArtifact));
}

TEST_CASE("training callbacks, finetune and input checks") {
  const acoustic::ModelCfg m = testing::TinyModelCfg();
  const auto data = TinyData(m);
  TrainCfg t = TinyTrain(6);
  t.checkpoint_every = 2;
  std::vector<int> seen;
  const auto pre = Pretrain(data, m, testing::TinyMelCfg(), t, "fp",
                            [&](const CheckpointBundle &b) { seen.push_back(b.step); });
  CHECK(seen == std::vector<int>{2, 4, 6});
  CHECK(pre.curve.rows().size() == 6);
  for (const auto &r : pre.curve.rows()) CHECK(r.lr == doctest::Approx(LrAtStep(r.step, t)));

  auto child = data;
  for (auto &ex : child) ex.speaker = "kid";
  const auto ft = Finetune(pre.bundle, child, TinyTrain(4), "fp2");
  CHECK(ft.bundle.step == 10);
  CHECK(ft.curve.rows().front().step == 7);
  CHECK(ft.bundle.model.speakers.Contains("kid"));
  CHECK(ft.bundle.corpus_fingerprint == "fp2");

  CHECK(ErrorKindOf([&] { Pretrain({}, m, testing::TinyMelCfg(), t, "fp"); }) ==
        Kind(ErrorKind::kInvalidArgument));
  CHECK(ErrorKindOf([&] { Train(pre.bundle, child, t, 1); }) == Kind(ErrorKind::kInvalidArgument));
  TrainCfg bad = t;
  bad.batch_size = 0;
  CHECK(ErrorKindOf([&] { bad.Validate(); }) != -1);
}

TEST_CASE("feature cache") {
  const fs::path dir = testing::TempDir("trainer");
  toy::ToyCorpusCfg tc;
  tc.utterances_per_speaker = 2;
  tc.adults.resize(1);
  tc.children.resize(1);
  const auto files = toy::WriteToyCorpus(tc, dir / "toy");
  const auto man = corpus::LoadManifest(files.adult_manifest);
  dsp::MelCfg mc;
  FeatureCacheStats s1, s2;
  const auto a = LoadExamples(man, mc, {}, dir / "cache", &s1);
  const auto b = LoadExamples(man, mc, {}, dir / "cache", &s2);
  CHECK(s1.built == 2);
  CHECK(s1.reused == 0);
  CHECK(s2.reused == 2);
  REQUIRE(a.size() == 2);
  CHECK(a[0].mel == b[0].mel);
  CHECK(a[0].pitch.f0_hz == b[0].pitch.f0_hz);
  CHECK(a[0].mel.rows() == mc.NumFrames(static_cast<size_t>(man.records[0].duration_s * 22050 + 0.5)));
  CHECK(CorpusFingerprint(man) == CorpusFingerprint(corpus::LoadManifest(files.adult_manifest)));
  CHECK(CorpusFingerprint(man) != CorpusFingerprint(corpus::LoadManifest(files.child_manifest)));
  fs::remove_all(dir);
}
