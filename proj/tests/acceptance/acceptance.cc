// tests/acceptance/acceptance.cc

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

// Acceptance suite.  Prints one line per criterion:
//   [PASS] <n> <name>: <measurements>
//   [FAIL] <n> <name>: <measurements>
// and exits non-zero when any criterion fails.  Usage:
//   acceptance [--only N] [--cli PATH]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "childtts/acoustic.h"
#include "childtts/aligner.h"
#include "childtts/autodiff.h"
#include "childtts/corpus.h"
#include "childtts/dsp.h"
#include "childtts/evalharness.h"
#include "childtts/subprocess.h"
#include "childtts/synthgen.h"
#include "childtts/toycorpus.h"
#include "childtts/trainer.h"
#include "test_util.h"

#ifndef CHILDTTS_CLI_PATH
#define CHILDTTS_CLI_PATH "childtts"
#endif

namespace {

using namespace childtts;
namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1 --------------------------------------------------------------------

Outcome GradientCheck() {
  const auto t0 = std::chrono::steady_clock::now();
  const acoustic::ModelCfg cfg = testing::TinyModelCfg();
  acoustic::AcousticModelState s = acoustic::InitModel(cfg, 7, testing::TinyMelCfg());
  s = acoustic::AddSpeakers(s, {"spk0", "spk1"}, 3);
  double worst = 0.0;
  std::string where;
  size_t n = 0;
  int case_id = 0;
  for (const auto &[spk, tokens, frames] :
       std::vector<std::tuple<std::string, int, int>>{{"spk0", 4, 9}, {"spk1", 5, 13}}) {
    const acoustic::TrainingExample ex = testing::RandomExample(cfg, tokens, frames, spk, 11 + case_id++);
    nn::ParameterSet g = nn::ZerosLike(s.params);
    acoustic::ForwardTrain(s, ex, {}, &g);
    const auto r = testing::FiniteDifferenceCheck(s.params, g, [&](const nn::ParameterSet &p) {
      acoustic::AcousticModelState t = s;
      t.params = p;
      return acoustic::ForwardTrain(t, ex).losses.total;
    });
    n += r.n_checked;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      where = r.worst;
    }
  }
  const double secs = Seconds(t0);
  const size_t n_params = nn::CountParameters(s.params);
  return {worst < 1e-4 && secs < 60.0 && n == 2 * n_params,
          "max rel err " + Fmt("%.2e", worst) + " over " + std::to_string(n_params) +
              " params x 2 examples in " + Fmt("%.1f", secs) + " s" +
              (where.empty() ? "" : " (worst " + where + ")")};
}

// ---- 2 --------------------------------------------------------------------

// Every monotonic path from token 0 at frame 0 to token N-1 at frame T-1.
void EnumeratePaths(int n_tokens, int n_frames, std::vector<int> &cur,
                    const std::function<void(const std::vector<int> &)> &visit) {
  const int f = static_cast<int>(cur.size());
  if (f == n_frames) {
    if (cur.back() == n_tokens - 1) visit(cur);
    return;
  }
  for (int step = 0; step <= 1; ++step) {
    const int tok = cur.back() + step;
    if (tok >= n_tokens) continue;
    cur.push_back(tok);
    EnumeratePaths(n_tokens, n_frames, cur, visit);
    cur.pop_back();
  }
}

Outcome AlignmentOracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nt(1, 4);
  std::normal_distribution<double> nd(0.0, 2.0);
  int cases = 0, viterbi_ok = 0, loss_ok = 0;
  double max_loss_err = 0.0;
  while (cases < 600) {
    const int n = nt(rng);
    const int t = std::uniform_int_distribution<int>(n, 6)(rng);
    Matrix logits(n, t);
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = nd(rng);
    const Matrix lp = aligner::LogSoftmaxOverTokens(logits);

    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> best_path;
    std::vector<double> scores;
    std::vector<int> start{0};
    EnumeratePaths(n, t, start, [&](const std::vector<int> &p) {
      double s = 0.0;
      for (int j = 0; j < t; ++j) s += lp(p[j], j);
      scores.push_back(s);
      if (s > best) {
        best = s;
        best_path = p;
      }
    });
    // Sum of exp(scores), accumulated directly in long double.
    long double total = 0.0L;
    for (double s : scores) total += std::exp(static_cast<long double>(s));
    const double oracle_loss = -static_cast<double>(std::log(total));

    const aligner::MonotonicPath vp = aligner::ExtractMonotonicPathFromLogProbs(lp);
    double vscore = 0.0;
    for (int j = 0; j < t; ++j) vscore += lp(vp.token_index_per_frame[j], j);
    // Equal to the brute-force best path, or an exact tie with it.
    if (vp.token_index_per_frame == best_path || std::abs(vscore - best) < 1e-12) ++viterbi_ok;
    const double err = std::abs(aligner::ForwardSumLossFromLogProbs(lp).loss - oracle_loss);
    max_loss_err = std::max(max_loss_err, err);
    if (err <= 1e-9) ++loss_ok;
    ++cases;
  }
  return {viterbi_ok == cases && loss_ok == cases,
          std::to_string(cases) + " posteriors up to 4x6; viterbi " + std::to_string(viterbi_ok) +
              "/" + std::to_string(cases) + ", forward-sum " + std::to_string(loss_ok) + "/" +
              std::to_string(cases) + " (max |err| " + Fmt("%.1e", max_loss_err) + ")"};
}

// ---- 3 --------------------------------------------------------------------

// Minimum edit cost over every alignment path, enumerated without memoisation.
int ExhaustiveEditDistance(const std::vector<std::string> &r, const std::vector<std::string> &h,
                           size_t i, size_t j) {
  if (i == r.size()) return static_cast<int>(h.size() - j);
  if (j == h.size()) return static_cast<int>(r.size() - i);
  const int sub = ExhaustiveEditDistance(r, h, i + 1, j + 1) + (r[i] == h[j] ? 0 : 1);
  const int del = ExhaustiveEditDistance(r, h, i + 1, j) + 1;
  const int ins = ExhaustiveEditDistance(r, h, i, j + 1) + 1;
  return std::min({sub, del, ins});
}

Outcome WerOracle() {
  std::mt19937_64 rng(99);
  const std::vector<std::string> alphabet{"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<int> letter(0, 4), ref_len(1, 8), hyp_len(0, 8);
  int ok = 0;
  const int n_pairs = 200;
  for (int k = 0; k < n_pairs; ++k) {
    std::vector<std::string> r(ref_len(rng)), h(hyp_len(rng));
    for (auto &w : r) w = alphabet[letter(rng)];
    for (auto &w : h) w = alphabet[letter(rng)];
    auto join = [](const std::vector<std::string> &v) {
      std::string s;
      for (const auto &w : v) s += (s.empty() ? "" : " ") + w;
      return s;
    };
    const eval::WerReport rep = eval::Wer(join(r), join(h));
    const int dist = ExhaustiveEditDistance(r, h, 0, 0);
    const double expect = 100.0 * dist / static_cast<double>(r.size());
    if (rep.substitutions + rep.insertions + rep.deletions == dist &&
        rep.n_ref_words == static_cast<int>(r.size()) && std::abs(rep.wer - expect) < 1e-9 &&
        static_cast<int>(h.size()) == static_cast<int>(r.size()) - rep.deletions + rep.insertions)
      ++ok;
  }
  const double fixed = eval::Wer("a b c", "a c").wer;
  return {ok == n_pairs && std::abs(fixed - 100.0 / 3.0) <= 1e-6,
          std::to_string(ok) + "/" + std::to_string(n_pairs) + " pairs match; wer(\"a b c\", \"a c\") = " +
              Fmt("%.6f", fixed)};
}

// ---- 4 --------------------------------------------------------------------

Outcome Counting() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ntok(1, 12), dur(1, 9), dim(1, 5);
  std::normal_distribution<double> nd;
  int ok = 0;
  const int n_cases = 1000;
  for (int k = 0; k < n_cases; ++k) {
    const int n = ntok(rng), d = dim(rng);
    aligner::DurationTargets dt;
    int sum = 0;
    for (int i = 0; i < n; ++i) {
      dt.durations.push_back(dur(rng));
      sum += dt.durations.back();
    }
    Matrix reps(n, d);
    for (Eigen::Index i = 0; i < reps.size(); ++i) reps.data()[i] = nd(rng);
    const Matrix out = acoustic::LengthRegulate(reps, dt);
    bool good = out.rows() == sum && out.cols() == d && dt.TotalFrames() == sum;
    int row = 0;
    for (int i = 0; good && i < n; ++i)
      for (int r = 0; r < dt.durations[i]; ++r, ++row)
        good = good && out.row(row) == reps.row(i);
    const aligner::MonotonicPath p = aligner::DurationsToPath(dt);
    good = good && static_cast<int>(p.token_index_per_frame.size()) == sum &&
           aligner::PathToDurations(p, n).durations == dt.durations;
    if (good) ++ok;
  }
  return {ok == n_cases, std::to_string(ok) + "/" + std::to_string(n_cases) + " cases exact"};
}

// ---- 5 --------------------------------------------------------------------

double MedianVoicedF0(const dsp::Waveform &w, const dsp::MelCfg &mc) {
  const dsp::PitchContour pc = dsp::ExtractF0(w, dsp::F0Cfg{}, mc);
  std::vector<double> v;
  for (size_t i = 0; i < pc.f0_hz.size(); ++i)
    if (pc.voiced[i]) v.push_back(pc.f0_hz[i]);
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

struct ToyRun {
  trainer::TrainResult pre, ft;
};

Outcome TransferBenchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = testing::TempDir("bench");
  toy::ToyCorpusCfg tc;  // 4 adult + 4 child voices, 50 utterances each
  const toy::ToyCorpusFiles files = toy::WriteToyCorpus(tc, dir);
  const auto am = corpus::LoadManifest(files.adult_manifest);
  const auto cm = corpus::LoadManifest(files.child_manifest);
  const dsp::MelCfg mc;
  const dsp::F0Cfg fc;
  const auto adult = trainer::LoadExamples(am, mc, fc);
  const auto child = trainer::LoadExamples(cm, mc, fc);

  acoustic::ModelCfg m;
  m.d_model = 32;
  m.speaker_embed_dim = 32;
  m.ff_dim = 64;
  m.n_heads = 2;
  m.max_speakers = 8;
  trainer::TrainCfg t;
  t.base_lr = 3e-3;
  t.warmup_steps = 100;
  t.batch_size = 4;
  t.seed = 1;
  t.max_steps = 500;
  const auto pre = trainer::Pretrain(adult, m, mc, t, trainer::CorpusFingerprint(am));
  t.max_steps = 300;
  const auto ft = trainer::Finetune(pre.bundle, child, t, trainer::CorpusFingerprint(cm));

  // (a) smoothed pretrain loss, end vs step 10.
  const auto sp = trainer::Smooth(trainer::CurveValues(pre.curve));
  const double s10 = sp[9], s_end = sp.back();
  const bool a = s_end < 0.7 * s10;

  // (b) smoothed loss over the joined curve: the finetune segment peaks above
  // the last pretrain value, then ends below that peak.
  trainer::LossCurve all = pre.curve;
  all.Extend(ft.curve);
  const auto s = trainer::Smooth(trainer::CurveValues(all));
  const size_t n_pre = pre.curve.rows().size();
  const double pre_last = s[n_pre - 1];
  size_t peak_i = n_pre;
  for (size_t i = n_pre; i < s.size(); ++i)
    if (s[i] > s[peak_i]) peak_i = i;
  const double peak = s[peak_i], ft_end = s.back();
  const bool b = peak > pre_last && ft_end < peak && peak_i + 1 < s.size();

  // (c) same sentence, child voice after finetune vs adult voice before it.
  const corpus::TokenSequence toks = corpus::Tokenize(toy::RandomToyText(77, 10, 14));
  const std::string child_spk = tc.children.front().label, adult_spk = tc.adults.front().label;
  const auto ci = acoustic::ForwardInfer(ft.bundle.model, toks, child_spk);
  const auto ai = acoustic::ForwardInfer(pre.bundle.model, toks, adult_spk);
  const double f_child = MedianVoicedF0(dsp::GriffinLim(ci.mel, 60, 1).waveform, mc);
  const double f_adult = MedianVoicedF0(dsp::GriffinLim(ai.mel, 60, 1).waveform, mc);
  const bool c = f_child >= f_adult + 20.0;
  const double secs = Seconds(t0);
  fs::remove_all(dir);

  std::string detail = std::string("(a) ") + (a ? "ok" : "no") + " smoothed " + Fmt("%.2f", s10) +
                       " at step 10 -> " + Fmt("%.2f", s_end) + " at step " +
                       std::to_string(pre.curve.rows().back().step) + "; (b) " + (b ? "ok" : "no") +
                       " " + Fmt("%.2f", pre_last) + " -> peak " + Fmt("%.2f", peak) + " at step " +
                       std::to_string(all.rows()[peak_i].step) + " -> " + Fmt("%.2f", ft_end) +
                       " at step " + std::to_string(all.rows().back().step) + "; (c) " +
                       (c ? "ok" : "no") + " median F0 " + child_spk + " " + Fmt("%.1f", f_child) +
                       " Hz vs " + adult_spk + " " + Fmt("%.1f", f_adult) + " Hz; " +
                       Fmt("%.0f", secs) + " s";
  return {a && b && c && secs < 900.0, detail};
}

// ---- 6 --------------------------------------------------------------------

Outcome DeterminismAndResume() {
  acoustic::ModelCfg m = testing::TinyModelCfg();
  m.dropout = 0.1;
  m.max_speakers = 3;
  const dsp::MelCfg mc = testing::TinyMelCfg();
  std::vector<acoustic::TrainingExample> data;
  for (int i = 0; i < 7; ++i)
    data.push_back(testing::RandomExample(m, 3 + i % 3, 8 + i, i % 2 ? "s1" : "s0", 100 + i));
  trainer::TrainCfg t;
  t.base_lr = 1e-2;
  t.warmup_steps = 5;
  t.batch_size = 3;
  t.seed = 42;
  const int K = 7, N = 20;
  t.max_steps = N;

  const auto run1 = trainer::Pretrain(data, m, mc, t, "fp");
  const auto run2 = trainer::Pretrain(data, m, mc, t, "fp");
  const bool same = run1.curve.ToCsv() == run2.curve.ToCsv() &&
                    trainer::EncodeCheckpoint(run1.bundle) == trainer::EncodeCheckpoint(run2.bundle);

  trainer::TrainCfg tk = t;
  tk.max_steps = K;
  const auto part = trainer::Pretrain(data, m, mc, tk, "fp");
  const trainer::CheckpointBundle restored =
      trainer::DecodeCheckpoint(trainer::EncodeCheckpoint(part.bundle));
  const auto rest = trainer::Train(restored, data, t, N - K);
  trainer::LossCurve joined = part.curve;
  joined.Extend(rest.curve);
  const bool resumed = joined.ToCsv() == run1.curve.ToCsv() &&
                       rest.bundle.model.params == run1.bundle.model.params &&
                       rest.bundle.optimizer.m == run1.bundle.optimizer.m &&
                       rest.bundle.optimizer.v == run1.bundle.optimizer.v &&
                       rest.bundle.step == run1.bundle.step;
  return {same && resumed, std::string("repeat run ") + (same ? "bit-identical" : "differs") +
                               "; resume at " + std::to_string(K) + " to " + std::to_string(N) +
                               " " + (resumed ? "bit-identical" : "differs")};
}

// ---- 7 --------------------------------------------------------------------

Outcome EvaluationMath() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> mos(1.0, 5.0);
  double worst_ci = 0.0;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> x(2 + k * 7);
    for (auto &v : x) v = mos(rng);
    // Closed form through raw moments: var = (sum x^2 - n mean^2) / (n - 1).
    const double n = static_cast<double>(x.size());
    long double s1 = 0, s2 = 0;
    for (double v : x) {
      s1 += v;
      s2 += static_cast<long double>(v) * v;
    }
    const double mean = static_cast<double>(s1 / n);
    const double var = static_cast<double>((s2 - n * static_cast<long double>(mean) * mean) / (n - 1));
    const double ci = 1.96 * std::sqrt(var) / std::sqrt(n);
    const auto rep = eval::AggregateMos(x);
    worst_ci = std::max({worst_ci, std::abs(rep.ci95 - ci), std::abs(rep.mean - mean)});
  }

  const int dim = 16;
  auto rand_vec = [&] {
    std::vector<double> v(dim);
    for (auto &e : v) e = nd(rng);
    return v;
  };
  auto cosine = [](const std::vector<double> &a, const std::vector<double> &b) {
    double ab = 0, aa = 0, bb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
  };
  double worst_cos = 0.0;
  eval::SpeakerVectors A, B;
  for (int i = 0; i < 5; ++i) A["a" + std::to_string(i)] = rand_vec();
  for (int i = 0; i < 4; ++i) B["b" + std::to_string(i)] = rand_vec();
  for (int i = 0; i < 50; ++i) {
    const auto u = rand_vec(), v = rand_vec();
    worst_cos = std::max(worst_cos, std::abs(eval::CosineSimilarity(u, v) - cosine(u, v)));
  }
  const auto cross = eval::CrossSimilarity(A, B);
  int r = 0;
  double sum = 0.0, lo = 1e9, hi = -1e9;
  for (const auto &[la, va] : A) {
    int c = 0;
    for (const auto &[lb, vb] : B) {
      const double e = cosine(va, vb);
      worst_cos = std::max(worst_cos, std::abs(cross.matrix(r, c) - e));
      sum += e;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      ++c;
    }
    ++r;
  }
  worst_cos = std::max({worst_cos, std::abs(cross.summary.mean - sum / (A.size() * B.size())),
                        std::abs(cross.summary.min - lo), std::abs(cross.summary.max - hi)});
  const auto self = eval::CrossSimilarity(A, A);
  double worst_diag = 0.0;
  for (Eigen::Index i = 0; i < self.matrix.rows(); ++i)
    worst_diag = std::max(worst_diag, std::abs(self.matrix(i, i) - 1.0));

  // Points on a random plane in 32 dimensions.
  const int D = 32, n_pts = 12;
  Matrix basis(D, 2);
  for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = nd(rng);
  basis.col(0).normalize();
  basis.col(1) -= basis.col(0) * basis.col(0).dot(basis.col(1));
  basis.col(1).normalize();
  Vector offset(D);
  for (int i = 0; i < D; ++i) offset(i) = nd(rng);
  std::vector<std::array<double, 2>> plane(n_pts);
  std::vector<std::vector<double>> pts(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    plane[i] = {3.0 * nd(rng), nd(rng)};
    Vector p = offset + basis.col(0) * plane[i][0] + basis.col(1) * plane[i][1];
    pts[i].assign(p.data(), p.data() + D);
  }
  const Matrix proj = eval::Project2d(pts);
  double worst_dist = 0.0;
  for (int i = 0; i < n_pts; ++i)
    for (int j = i + 1; j < n_pts; ++j) {
      const double d0 = std::hypot(plane[i][0] - plane[j][0], plane[i][1] - plane[j][1]);
      const double d1 = std::hypot(proj(i, 0) - proj(j, 0), proj(i, 1) - proj(j, 1));
      worst_dist = std::max(worst_dist, std::abs(d0 - d1));
    }
  return {worst_ci <= 1e-9 && worst_cos <= 1e-9 && worst_diag <= 1e-9 && worst_dist <= 1e-6,
          "MOS ci95 err " + Fmt("%.1e", worst_ci) + " on 20 sets; cosine err " +
              Fmt("%.1e", worst_cos) + "; self diagonal err " + Fmt("%.1e", worst_diag) +
              "; planted-plane distance err " + Fmt("%.1e", worst_dist)};
}

// ---- 8 --------------------------------------------------------------------

Outcome DemographicsCheck() {
  const auto a = synthgen::MakeDemographics(40, 29.02, 1);
  const auto b = synthgen::MakeDemographics(2, 47.61, 1);
  // Same arithmetic through a manifest of per-speaker records.
  corpus::CorpusManifest m;
  for (int s = 0; s < 40; ++s)
    m.records.push_back({"u" + std::to_string(s), "x.wav", "a", "spk" + std::to_string(s),
                         29.02 * 3600.0 / 40.0, 22050});
  const auto c = synthgen::ComputeDemographics(m);
  const bool ok = std::abs(a.per_speaker_minutes - 43.53) <= 0.01 &&
                  std::abs(b.PerSpeakerHours() - 23.8) <= 0.01 &&
                  std::abs(c.per_speaker_minutes - 43.53) <= 0.01 && c.n_speakers == 40;
  return {ok, "40 speakers / 29.02 h -> " + Fmt("%.2f", a.per_speaker_minutes) +
                  " min/speaker; 2 speakers / 47.61 h -> " + Fmt("%.3f", b.PerSpeakerHours()) +
                  " h/speaker; from manifest " + Fmt("%.2f", c.per_speaker_minutes) + " min"};
}

// ---- 9 --------------------------------------------------------------------

Outcome DspCheck() {
  const dsp::MelCfg mc;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(mc.win_length, 50000);
  int frames_ok = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = len(rng);
    dsp::Waveform w{std::vector<float>(n, 0.0f), mc.sample_rate};
    for (auto &v : w.samples) v = std::uniform_real_distribution<float>(-0.3f, 0.3f)(rng);
    const int expect = (n + mc.hop_length - 1) / mc.hop_length;
    if (dsp::ComputeMelSpectrogram(w, mc).NumFrames() == expect && mc.NumFrames(n) == expect)
      ++frames_ok;
  }

  // 440 Hz at 16 kHz -> 22.05 kHz -> mel -> Griffin-Lim.
  const dsp::Waveform src{testing::Sine(440.0, 16000, 16000), 16000};
  const dsp::Waveform up = dsp::Resample(src, mc.sample_rate);
  const auto mel = dsp::ComputeMelSpectrogram(up, mc);
  const auto gl = dsp::GriffinLim(mel, 60, 1).waveform;
  const std::vector<float> mid(gl.samples.begin() + 2048, gl.samples.begin() + 2048 + 8192);
  const double f = testing::DominantFrequency(mid, gl.sample_rate, 2000.0);
  const double step = (dsp::HzToMel(mc.fmax) - dsp::HzToMel(mc.fmin)) / (mc.n_mels + 1);
  const double band = dsp::MelToHz(dsp::HzToMel(440.0) + step) - 440.0;
  const bool sine_ok = std::abs(f - 440.0) <= band;

  const dsp::Waveform silence{std::vector<float>(5000, 0.0f), mc.sample_rate};
  const auto sm = dsp::ComputeMelSpectrogram(silence, mc);
  const double floor = std::log(dsp::kLogFloor);
  const bool silence_ok = sm.NumFrames() > 0 && (sm.values.array() == floor).all();

  return {frames_ok == 50 && sine_ok && silence_ok,
          "frame count " + std::to_string(frames_ok) + "/50; sine " + Fmt("%.1f", f) +
              " Hz (band width " + Fmt("%.1f", band) + " Hz); silence " +
              (silence_ok ? "at" : "not at") + " log floor " + Fmt("%.4f", floor)};
}

// ---- 10 -------------------------------------------------------------------

Outcome EndToEnd(const std::string &cli) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = testing::TempDir("e2e");
  auto q = [](const fs::path &p) { return "'" + p.string() + "'"; };
  const std::string config = q(dir / "config.json");
  // Short schedules keep the run fast; every stage still executes in full.
  const std::string sets =
      " --set pretrain.max_steps=60 --set finetune.max_steps=40 --set vocoder.griffinlim_iterations=16";
  const std::vector<std::pair<std::string, std::string>> steps{
      {"toy-corpus", q(cli) + " toy-corpus --out " + q(dir) + " --utterances 6"},
      {"prepare", q(cli) + " prepare -c " + config + sets},
      {"pretrain", q(cli) + " pretrain -c " + config + sets},
      {"finetune", q(cli) + " finetune -c " + config + sets},
      {"synthesize", q(cli) + " synthesize -c " + config + sets},
      {"evaluate", q(cli) + " evaluate -c " + config + sets},
      {"report", q(cli) + " report -c " + config + sets}};
  for (const auto &[name, cmd] : steps) {
    const CommandResult r = RunCommand(cmd, 900.0);
    if (r.exit_code != 0)
      return {false, name + " exited " + std::to_string(r.exit_code) + ": " + r.output.substr(0, 400)};
  }
  const fs::path run = dir / "run";
  std::vector<std::string> missing;
  for (const char *f : {"mos.csv", "wer.csv", "similarity_summary.csv", "similarity.csv",
                        "projection.csv", "summary.md", "run.json"})
    if (!fs::exists(run / "report" / f)) missing.push_back(f);

  const auto synth = corpus::LoadManifest(run / "synthesize" / "22050" / "manifest.jsonl");
  std::map<std::string, int> per_speaker;
  for (const auto &r : synth.records) ++per_speaker[r.speaker_id];
  const bool counts = per_speaker.size() == 2 &&
                      std::all_of(per_speaker.begin(), per_speaker.end(),
                                  [](const auto &kv) { return kv.second == 10; });

  const Json ev = Json::parse(ReadFileBytes(run / "evaluate" / "evaluation.json"));
  double synth_wer = -1.0;
  int n_items = 0;
  for (const auto &s : ev.at("sets"))
    if (s.at("manifest").get<std::string>().find("synthesize") != std::string::npos) {
      synth_wer = s.at("wer").at("wer").get<double>();
      n_items = s.at("n_items").get<int>();
    }
  const double secs = Seconds(t0);
  fs::remove_all(dir);
  std::string detail = "all stages exit 0; report files " +
                       (missing.empty() ? std::string("complete") : "missing " + missing.front()) +
                       "; synthesized " + std::to_string(synth.records.size()) + " utterances over " +
                       std::to_string(per_speaker.size()) + " speakers; closed-loop WER " +
                       Fmt("%.2f", synth_wer) + "% on " + std::to_string(n_items) + " items; " +
                       Fmt("%.0f", secs) + " s";
  return {missing.empty() && counts && synth_wer == 0.0 && n_items == 20, detail};
}

}  // namespace

int main(int argc, char **argv) {
  int only = 0;
  std::string cli = CHILDTTS_CLI_PATH;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string a = argv[i];
    if (a == "--only") only = std::atoi(argv[i + 1]);
    else if (a == "--cli") cli = argv[i + 1];
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient check", GradientCheck},
      {"viterbi and forward-sum oracle", AlignmentOracle},
      {"wer oracle", WerOracle},
      {"length regulator counting", Counting},
      {"toy transfer-learning benchmark", TransferBenchmark},
      {"determinism and resume", DeterminismAndResume},
      {"evaluation math", EvaluationMath},
      {"demographics", DemographicsCheck},
      {"dsp", DspCheck},
      {"end-to-end cli", [&] { return EndToEnd(cli); }}};
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only && id != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
