// tests/unit/vocoder_test.cc

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

#include <chrono>

#include "doctest.h"

#include "childtts/subprocess.h"
#include "childtts/vocoder.h"
#include "test_util.h"

using namespace childtts;
using namespace childtts::vocoder;
using testing::ErrorKindOf;
using testing::Kind;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CHILDTTS_FIXTURES;

dsp::MelSpectrogram SineMel(double hz, int n) {
  return dsp::ComputeMelSpectrogram({testing::Sine(hz, 22050, n), 22050}, dsp::MelCfg{});
}

VocoderSpec External(const fs::path &dir, const std::string &extra = "") {
  VocoderSpec s;
  s.kind = VocoderKind::kExternal;
  s.external.command = "python3 '" + (kFixtures / "mock_vocoder.py").string() + "' {dir} {ids}" + extra;
  s.external.exchange_dir = dir;
  s.external.timeout_s = 60;
  return s;
}

}  // namespace

TEST_CASE("command expansion and execution") {
  CHECK(ExpandCommand("run {a} {b}", {{"a", "x y"}, {"b", "it's"}}) == "run 'x y' 'it'\\''s'");
  CHECK(ErrorKindOf([] { ExpandCommand("run {c}", {{"a", "1"}}); }) == Kind(ErrorKind::kValidation));

  const CommandResult ok = RunCommand("echo out; echo err >&2", 10);
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("out") != std::string::npos);
  CHECK(ok.output.find("err") != std::string::npos);
  const CommandResult bad = RunCommand("exit 7", 10);
  CHECK(bad.exit_code == 7);
  CHECK(DescribeFailure(bad, 10).find("exit 7") != std::string::npos);
  const auto t0 = std::chrono::steady_clock::now();
  const CommandResult slow = RunCommand("sleep 20", 0.5);
  CHECK(slow.timed_out);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 5.0);
  CHECK(RunCommand("kill -9 $$", 10).exit_code == -9);
  // Only the tail of long output is kept.
  CHECK(RunCommand("head -c 200000 /dev/zero | tr '\\0' x", 10).output.size() <= 65536);
}

TEST_CASE("kinds and spec validation") {
  CHECK(std::string(VocoderKindName(ParseVocoderKind("external"))) == "external");
  CHECK(ParseVocoderKind("griffinlim") == VocoderKind::kGriffinLim);
  CHECK(ErrorKindOf([] { ParseVocoderKind("wavenet"); }) == Kind(ErrorKind::kValidation));
  VocoderSpec s;
  s.kind = VocoderKind::kExternal;
  CHECK(ErrorKindOf([&] { s.Validate(); }) == Kind(ErrorKind::kValidation));
  s = {};
  s.griffinlim_iterations = 0;
  CHECK(ErrorKindOf([&] { s.Validate(); }) == Kind(ErrorKind::kValidation));
}

TEST_CASE("griffin-lim render and batch seeds") {
  VocoderSpec s;
  s.griffinlim_iterations = 8;
  const auto m = SineMel(300.0, 6000);
  const dsp::Waveform w = Render(m, s, 4);
  CHECK(w.sample_rate == 22050);
  CHECK(w.samples.size() == static_cast<size_t>(m.NumFrames() * 256));
  const auto batch = BatchRender({m, m}, s, 3);
  CHECK(batch.ok());
  CHECK(batch.waveforms[1]->samples == w.samples);
  CHECK(batch.waveforms[0]->samples != w.samples);
}

TEST_CASE("external vocoder through the exchange directory") {
  const fs::path dir = testing::TempDir("voc");
  const auto m = SineMel(300.0, 6000);
  const dsp::Waveform w = Render(m, External(dir), 1);
  CHECK(w.samples.size() == static_cast<size_t>(m.NumFrames() * 256));
  CHECK(testing::DominantFrequency(w.samples, 22050, 1000.0) == doctest::Approx(220.0).epsilon(0.02));
  CHECK(fs::exists(dir / "item_00000.melb"));

  // Whole-command failure carries the adapter's diagnostics.
  try {
    Render(m, External(dir, " --exit 1"), 1);
    FAIL("expected a failure");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kRuntime);
    CHECK(std::string(e.what()).find("forced failure") != std::string::npos);
  }
  // Wrong output length is rejected.
  CHECK(ErrorKindOf([&] { Render(m, External(dir, " --short"), 1); }) == Kind(ErrorKind::kRuntime));

  // One failing item: the rest still render, or the first failure is rethrown.
  const auto batch = BatchRender({m, m, m}, External(dir, " --fail-id item_00001"), 1);
  CHECK(!batch.ok());
  REQUIRE(batch.failures.size() == 1);
  CHECK(batch.failures[0].index == 1);
  CHECK(batch.waveforms[0].has_value());
  CHECK(!batch.waveforms[1].has_value());
  CHECK(batch.waveforms[2].has_value());
  CHECK(batch.Report().find("cannot render item_00001") != std::string::npos);
  CHECK(ErrorKindOf([&] { BatchRender({m, m, m}, External(dir, " --fail-id item_00001"), 1, true); }) ==
        Kind(ErrorKind::kRuntime));
  fs::remove_all(dir);
}
