// tests/unit/acoustic_test.cc

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

#include "doctest.h"

#include "childtts/acoustic.h"
#include "test_util.h"

using namespace childtts;
using namespace childtts::acoustic;
using testing::ErrorKindOf;
using testing::Kind;

namespace {

// (2V + S) d + (Le + Ld)(4d^2 + 9d + 4 d ff + ff) + 2(6d^2 + 7d + 1) + 5d
//   + 2 n_mels d + n_mels
size_t ClosedFormCount(const ModelCfg &c, int n_speaker_rows) {
  const size_t d = c.d_model, ff = c.ff_dim, V = c.vocab_size, S = n_speaker_rows,
               L = c.n_enc_layers + c.n_dec_layers, M = c.n_mels;
  return (2 * V + S) * d + L * (4 * d * d + 9 * d + 4 * d * ff + ff) + 2 * (6 * d * d + 7 * d + 1) +
         5 * d + 2 * M * d + M;
}

}  // namespace

TEST_CASE("parameter count closed form") {
  const ModelCfg tiny = testing::TinyModelCfg();
  CHECK(nn::CountParameters(InitModel(tiny, 1, testing::TinyMelCfg()).params) == ClosedFormCount(tiny, 2));
  CHECK(ClosedFormCount(tiny, 2) == 4656);
  ModelCfg c;
  c.vocab_size = 31;
  c.d_model = 32;
  c.speaker_embed_dim = 32;
  c.ff_dim = 64;
  c.n_heads = 2;
  c.n_enc_layers = 3;
  c.n_dec_layers = 1;
  c.max_speakers = 5;
  CHECK(nn::CountParameters(InitModel(c, 1).params) == ClosedFormCount(c, 5));
}

TEST_CASE("config validation") {
  ModelCfg c = testing::TinyModelCfg();
  c.n_heads = 3;
  CHECK(ErrorKindOf([&] { c.Validate(); }) != -1);
  c = testing::TinyModelCfg();
  c.dropout = 1.0;
  CHECK(ErrorKindOf([&] { c.Validate(); }) != -1);
  c = testing::TinyModelCfg();
  c.n_mels = 7;
  CHECK(ErrorKindOf([&] { InitModel(c, 1, testing::TinyMelCfg()); }) != -1);
}

TEST_CASE("init is seeded") {
  const ModelCfg c = testing::TinyModelCfg();
  const auto a = InitModel(c, 5, testing::TinyMelCfg());
  CHECK(a.params == InitModel(c, 5, testing::TinyMelCfg()).params);
  CHECK(a.params != InitModel(c, 6, testing::TinyMelCfg()).params);
  CHECK(a.seed_lineage == std::vector<uint64_t>{5});
  CHECK(a.params.at("align.token").cwiseAbs().maxCoeff() <= 0.1);
}

TEST_CASE("add speakers") {
  const ModelCfg c = testing::TinyModelCfg();
  auto s = AddSpeakers(InitModel(c, 5, testing::TinyMelCfg()), {"x", "y"}, 1);
  CHECK(s.speakers.Labels() == std::vector<std::string>{"x", "y"});
  const Matrix before = s.params.at(kSpeakerEmbedding);
  s = AddSpeakers(s, {"z"}, 2);
  const Matrix &after = s.params.at(kSpeakerEmbedding);
  CHECK(after.rows() == 3);
  CHECK(after.topRows(2) == before.topRows(2));
  const Matrix mean = before.topRows(2).colwise().mean();
  CHECK((after.row(2) - mean).cwiseAbs().maxCoeff() < 0.1);
  CHECK(s.speakers.Row("z") == 2);
  CHECK(s.seed_lineage == std::vector<uint64_t>{5, 1, 2});
  CHECK(ErrorKindOf([&] { AddSpeakers(s, {"x"}, 3); }) == Kind(ErrorKind::kInvalidArgument));
}

TEST_CASE("length regulator") {
  Matrix reps(2, 3);
  reps << 1, 2, 3, 4, 5, 6;
  const Matrix out = LengthRegulate(reps, {{1, 2}});
  CHECK(out.rows() == 3);
  CHECK(out.row(2) == reps.row(1));
  CHECK(ErrorKindOf([&] { LengthRegulate(reps, {{1}}); }) == Kind(ErrorKind::kInvalidArgument));
}

TEST_CASE("training pass") {
  const ModelCfg c = testing::TinyModelCfg();
  const auto s = AddSpeakers(InitModel(c, 5, testing::TinyMelCfg()), {"x", "y"}, 1);
  const auto ex = testing::RandomExample(c, 4, 10, "y", 3);
  const auto out = ForwardTrain(s, ex);
  CHECK(out.pred_mel.rows() == 10);
  CHECK(out.durations.TotalFrames() == 10);
  const auto &l = out.losses;
  CHECK(l.total == doctest::Approx(l.mel_mse + l.duration + l.pitch + l.align));
  ForwardOptions w;
  w.weights = {2.0, 0.5, 0.0, 3.0};
  const auto &lw = ForwardTrain(s, ex, w).losses;
  CHECK(lw.total == doctest::Approx(2.0 * l.mel_mse + 0.5 * l.duration + 3.0 * l.align));

  ModelCfg cd = c;
  cd.dropout = 0.2;
  auto sd = s;
  sd.cfg = cd;
  ForwardOptions dr;
  dr.apply_dropout = true;
  dr.dropout_seed = 1;
  const double d1 = ForwardTrain(sd, ex, dr).losses.total;
  CHECK(ForwardTrain(sd, ex, dr).losses.total == d1);
  dr.dropout_seed = 2;
  CHECK(ForwardTrain(sd, ex, dr).losses.total != d1);
  CHECK(ForwardTrain(sd, ex).losses.total == l.total);

  auto unknown = ex;
  unknown.speaker = "nobody";
  CHECK(ErrorKindOf([&] { ForwardTrain(s, unknown); }) == Kind(ErrorKind::kInvalidArgument));
}

TEST_CASE("inference pace and pitch shift") {
  const ModelCfg c = testing::TinyModelCfg();
  const auto s = AddSpeakers(InitModel(c, 5, testing::TinyMelCfg()), {"x", "y"}, 1);
  corpus::TokenSequence toks{{1, 2, 3, 4, 5}, corpus::kGraphemeTokenset};
  const auto a = ForwardInfer(s, toks, "x");
  CHECK(a.mel.NumFrames() == a.durations.TotalFrames());
  CHECK(a.mel.values.cols() == c.n_mels);
  for (int d : a.durations.durations) CHECK(d >= 1);
  const auto slow = ForwardInfer(s, toks, "x", 0.5);
  for (size_t i = 0; i < a.durations.durations.size(); ++i)
    CHECK(slow.durations.durations[i] >= a.durations.durations[i]);
  const auto up = ForwardInfer(s, toks, "x", 1.0, 50.0);
  for (size_t i = 0; i < a.pitch_hz.size(); ++i) CHECK(up.pitch_hz[i] == doctest::Approx(a.pitch_hz[i] + 50.0));
  CHECK(ForwardInfer(s, toks, "x").mel.values == a.mel.values);
  CHECK(ErrorKindOf([&] { ForwardInfer(s, toks, "z"); }) == Kind(ErrorKind::kInvalidArgument));
  CHECK(ErrorKindOf([&] { ForwardInfer(s, toks, "x", 0.0); }) == Kind(ErrorKind::kInvalidArgument));
  CHECK(NormalizePitch(c, 300.0) == doctest::Approx(1.0));
}
