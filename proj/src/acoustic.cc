// src/acoustic.cc

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

#include "childtts/acoustic.h"

#include <cmath>
#include <random>
#include <set>

namespace childtts::acoustic {

using nn::Graph;
using nn::Var;

void ModelCfg::Validate() const {
  Require(vocab_size > 0, "ModelCfg: vocab_size must be positive");
  Require(d_model > 0 && n_heads > 0, "ModelCfg: d_model and n_heads must be positive");
  if (d_model % n_heads != 0)
    Fail(ErrorKind::kInvalidArgument, "ModelCfg: d_model (" + std::to_string(d_model) +
                                          ") is not divisible by n_heads (" +
                                          std::to_string(n_heads) + ")");
  Require(n_enc_layers >= 1 && n_dec_layers >= 1, "ModelCfg: need at least one layer each");
  Require(ff_dim > 0 && n_mels > 0, "ModelCfg: ff_dim and n_mels must be positive");
  Require(speaker_embed_dim == d_model,
          "ModelCfg: speaker_embed_dim must equal d_model (additive conditioning)");
  Require(max_speakers >= 1, "ModelCfg: max_speakers must be positive");
  Require(dropout >= 0.0 && dropout < 1.0, "ModelCfg: dropout must be in [0, 1)");
  Require(pitch_std > 0.0, "ModelCfg: pitch_std must be positive");
}

int SpeakerTable::Row(const std::string &label) const {
  auto it = rows_.find(label);
  if (it == rows_.end()) Fail(ErrorKind::kInvalidArgument, "unknown speaker '" + label + "'");
  return it->second;
}

std::vector<std::string> SpeakerTable::Labels() const {
  std::vector<std::string> out(rows_.size());
  for (const auto &[label, row] : rows_) out[row] = label;
  return out;
}

void SpeakerTable::Assign(const std::string &label, int row) {
  if (!rows_.emplace(label, row).second)
    Fail(ErrorKind::kInvalidArgument, "duplicate speaker label '" + label + "'");
}

double NormalizePitch(const ModelCfg &cfg, double hz) {
  return hz > 0.0 ? (hz - cfg.pitch_mean) / cfg.pitch_std : 0.0;
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

void AddLinear(nn::ParameterSet &p, const std::string &name, int in, int out) {
  p[name + ".w"] = Matrix::Zero(in, out);
  p[name + ".b"] = Matrix::Zero(1, out);
}

void AddLayerNorm(nn::ParameterSet &p, const std::string &name, int dim) {
  p[name + ".g"] = Matrix::Zero(1, dim);
  p[name + ".b"] = Matrix::Zero(1, dim);
}

void AddFftBlock(nn::ParameterSet &p, const std::string &prefix, const ModelCfg &c) {
  for (const char *proj : {"q", "k", "v", "o"})
    AddLinear(p, prefix + ".attn." + proj, c.d_model, c.d_model);
  AddLayerNorm(p, prefix + ".ln1", c.d_model);
  AddLinear(p, prefix + ".conv1", 3 * c.d_model, c.ff_dim);
  AddLinear(p, prefix + ".conv2", c.ff_dim, c.d_model);
  AddLayerNorm(p, prefix + ".ln2", c.d_model);
}

void AddPredictor(nn::ParameterSet &p, const std::string &prefix, const ModelCfg &c) {
  AddLinear(p, prefix + ".conv1", 3 * c.d_model, c.d_model);
  AddLayerNorm(p, prefix + ".ln1", c.d_model);
  AddLinear(p, prefix + ".conv2", 3 * c.d_model, c.d_model);
  AddLayerNorm(p, prefix + ".ln2", c.d_model);
  AddLinear(p, prefix + ".proj", c.d_model, 1);
}

// Keeps the initial alignment posterior close to uniform, so the first
// forward-sum gradients follow the diagonal instead of locking in whichever
// token happens to be nearest.
constexpr double kAlignInitScale = 0.1;
const char kAlignTokenEmbedding[] = "align.token";

// Zero mean, unit variance per mel band over one utterance.  Loudness
// offsets shared by every frame would otherwise dominate the queries.
Matrix StandardizeBands(const Matrix &mel) {
  Matrix x = mel.rowwise() - mel.colwise().mean();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double sd = std::sqrt(x.col(c).squaredNorm() / static_cast<double>(x.rows()));
    x.col(c) /= std::max(sd, 1e-3);
  }
  return x;
}

bool EndsWith(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool IsLayerNorm(const std::string &name) {
  const auto dot = name.find_last_of('.');
  const std::string module = name.substr(0, dot);
  return module.size() >= 3 && module.compare(module.size() - 3, 2, "ln") == 0;
}

}  // namespace

AcousticModelState InitModel(const ModelCfg &cfg, uint64_t seed, const dsp::MelCfg &mel_cfg) {
  cfg.Validate();
  mel_cfg.Validate();
  Require(mel_cfg.n_mels == cfg.n_mels, "ModelCfg.n_mels must match MelCfg.n_mels");
  AcousticModelState s;
  s.cfg = cfg;
  s.mel_cfg = mel_cfg;
  s.seed_lineage = {seed};
  auto &p = s.params;
  p[kTokenEmbedding] = Matrix::Zero(cfg.vocab_size, cfg.d_model);
  p[kSpeakerEmbedding] = Matrix::Zero(cfg.max_speakers, cfg.d_model);
  for (int l = 0; l < cfg.n_enc_layers; ++l) AddFftBlock(p, "enc." + std::to_string(l), cfg);
  for (int l = 0; l < cfg.n_dec_layers; ++l) AddFftBlock(p, "dec." + std::to_string(l), cfg);
  AddPredictor(p, "dur", cfg);
  AddPredictor(p, "pitch", cfg);
  AddLinear(p, "pitch_embed", 3, cfg.d_model);
  p[kAlignTokenEmbedding] = Matrix::Zero(cfg.vocab_size, cfg.d_model);
  AddLinear(p, "align.query", cfg.n_mels, cfg.d_model);
  AddLinear(p, "out", cfg.d_model, cfg.n_mels);

  std::mt19937_64 rng(seed);
  for (auto &[name, t] : p) {
    if (name == kTokenEmbedding || name == kSpeakerEmbedding) {
      std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
    } else if (IsLayerNorm(name)) {
      if (EndsWith(name, ".g")) t.setOnes();
    } else if (name == kAlignTokenEmbedding) {
      std::uniform_real_distribution<double> u(-kAlignInitScale, kAlignInitScale);
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
    } else if (EndsWith(name, ".w")) {
      double a = 1.0 / std::sqrt(static_cast<double>(t.rows()));
      if (name == "align.query.w") a *= kAlignInitScale;
      std::uniform_real_distribution<double> u(-a, a);
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
    }
  }
  return s;
}

AcousticModelState AddSpeakers(const AcousticModelState &state,
                               const std::vector<std::string> &labels, uint64_t seed) {
  std::set<std::string> batch;
  for (const auto &l : labels) {
    Require(!l.empty(), "empty speaker label");
    if (state.speakers.Contains(l) || !batch.insert(l).second)
      Fail(ErrorKind::kInvalidArgument, "duplicate speaker label '" + l + "'");
  }
  AcousticModelState out = state;
  Matrix &table = out.params.at(kSpeakerEmbedding);
  const int registered = state.speakers.size();
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(table.cols());
  for (int r = 0; r < registered; ++r) mean += table.row(r);
  if (registered > 0) mean /= registered;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  int next = registered;
  for (const auto &label : labels) {
    if (next >= table.rows()) {
      table.conservativeResize(next + 1, Eigen::NoChange);
      table.row(next).setZero();
      out.cfg.max_speakers = next + 1;
    }
    if (registered > 0) {
      for (Eigen::Index c = 0; c < table.cols(); ++c) table(next, c) = mean(c) + noise(rng);
    }
    out.speakers.Assign(label, next);
    ++next;
  }
  out.seed_lineage.push_back(seed);
  return out;
}

Matrix LengthRegulate(const Matrix &token_reps, const aligner::DurationTargets &d) {
  if (static_cast<Eigen::Index>(d.durations.size()) != token_reps.rows())
    Fail(ErrorKind::kInvalidArgument, "LengthRegulate: " + std::to_string(d.durations.size()) +
                                          " durations for " +
                                          std::to_string(token_reps.rows()) + " tokens");
  Matrix out(d.TotalFrames(), token_reps.cols());
  Eigen::Index row = 0;
  for (size_t t = 0; t < d.durations.size(); ++t) {
    Require(d.durations[t] >= 0, "LengthRegulate: negative duration");
    for (int k = 0; k < d.durations[t]; ++k) out.row(row++) = token_reps.row(static_cast<Eigen::Index>(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward graph

namespace {

Matrix PositionalEncoding(int rows, int dim) {
  Matrix pe(rows, dim);
  for (int pos = 0; pos < rows; ++pos) {
    for (int i = 0; i < dim; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      pe(pos, i) = (i % 2 == 0) ? std::sin(pos * freq) : std::cos(pos * freq);
    }
  }
  return pe;
}

class ModelGraph {
 public:
  ModelGraph(const AcousticModelState &s, const ForwardOptions &opts)
      : s_(s), opts_(opts), g_(&s.params) {}

  Graph &graph() { return g_; }

  Var P(const std::string &name) { return g_.Param(name); }

  Var Linear(Var x, const std::string &name) {
    return nn::AddRowVector(g_, nn::MatMul(g_, x, P(name + ".w")), P(name + ".b"));
  }

  // 1-D convolution over rows, kernel 3, zero padding.
  Var Conv3(Var x, const std::string &name) {
    const Var parts[] = {nn::ShiftRows(g_, x, 1), x, nn::ShiftRows(g_, x, -1)};
    return Linear(nn::ConcatCols(g_, parts), name);
  }

  Var Norm(Var x, const std::string &name) {
    return nn::LayerNorm(g_, x, P(name + ".g"), P(name + ".b"));
  }

  Var Drop(Var x) {
    if (!opts_.apply_dropout || s_.cfg.dropout <= 0.0) return x;
    const uint64_t site = ++dropout_site_;
    return nn::Dropout(g_, x, s_.cfg.dropout,
                       opts_.dropout_seed * 0x9E3779B97F4A7C15ULL + site * 0xBF58476D1CE4E5B9ULL);
  }

  Var Attention(Var x, const std::string &prefix) {
    const int d = s_.cfg.d_model, heads = s_.cfg.n_heads, dh = d / heads;
    Var q = Linear(x, prefix + ".q"), k = Linear(x, prefix + ".k"), v = Linear(x, prefix + ".v");
    std::vector<Var> outs;
    for (int h = 0; h < heads; ++h) {
      Var qh = nn::SliceCols(g_, q, h * dh, dh);
      Var kh = nn::SliceCols(g_, k, h * dh, dh);
      Var vh = nn::SliceCols(g_, v, h * dh, dh);
      Var scores = nn::Scale(g_, nn::MatMul(g_, qh, nn::Transpose(g_, kh)),
                             1.0 / std::sqrt(static_cast<double>(dh)));
      outs.push_back(nn::MatMul(g_, nn::SoftmaxRows(g_, scores), vh));
    }
    Var cat = heads == 1 ? outs[0] : nn::ConcatCols(g_, outs);
    return Linear(cat, prefix + ".o");
  }

  Var FftBlock(Var x, const std::string &prefix) {
    Var a = Drop(Attention(x, prefix + ".attn"));
    x = Norm(nn::Add(g_, x, a), prefix + ".ln1");
    Var ff = nn::Relu(g_, Conv3(x, prefix + ".conv1"));
    ff = Drop(Linear(ff, prefix + ".conv2"));
    return Norm(nn::Add(g_, x, ff), prefix + ".ln2");
  }

  Var Predictor(Var x, const std::string &prefix) {
    Var h = Drop(Norm(nn::Relu(g_, Conv3(x, prefix + ".conv1")), prefix + ".ln1"));
    h = Drop(Norm(nn::Relu(g_, Conv3(h, prefix + ".conv2")), prefix + ".ln2"));
    return Linear(h, prefix + ".proj");
  }

  // Token embedding plus speaker row, [n_tokens x d].
  Var Inputs(const corpus::TokenSequence &tokens, int speaker_row) {
    for (int id : tokens.token_ids)
      if (id < 0 || id >= s_.cfg.vocab_size)
        Fail(ErrorKind::kInvalidArgument, "token id " + std::to_string(id) +
                                              " outside model vocabulary of " +
                                              std::to_string(s_.cfg.vocab_size));
    Var tok = nn::GatherRows(g_, P(kTokenEmbedding), tokens.token_ids);
    Var spk = nn::GatherRows(
        g_, P(kSpeakerEmbedding),
        std::vector<int>(tokens.token_ids.size(), speaker_row));
    return nn::Add(g_, tok, spk);
  }

  Var Encode(Var x0) {
    const int n = static_cast<int>(g_.value(x0).rows());
    Var h = Drop(nn::Add(g_, x0, g_.Constant(PositionalEncoding(n, s_.cfg.d_model))));
    for (int l = 0; l < s_.cfg.n_enc_layers; ++l) h = FftBlock(h, "enc." + std::to_string(l));
    return h;
  }

  Var Decode(Var h, Var pitch_col, const aligner::MonotonicPath &path) {
    Var conditioned = nn::Add(g_, h, Conv3(pitch_col, "pitch_embed"));
    Var up = nn::GatherRows(g_, conditioned, path.token_index_per_frame);
    const int frames = static_cast<int>(path.token_index_per_frame.size());
    Var x = Drop(nn::Add(g_, up, g_.Constant(PositionalEncoding(frames, s_.cfg.d_model))));
    for (int l = 0; l < s_.cfg.n_dec_layers; ++l) x = FftBlock(x, "dec." + std::to_string(l));
    return Linear(x, "out");
  }

 private:
  const AcousticModelState &s_;
  const ForwardOptions &opts_;
  Graph g_;
  uint64_t dropout_site_ = 0;
};

Vector Column(const Matrix &m) { return m.col(0); }


}  // namespace

TrainBatchOutput ForwardTrain(const AcousticModelState &state, const TrainingExample &ex,
                              const ForwardOptions &opts, nn::ParameterSet *grads) {
  const ModelCfg &cfg = state.cfg;
  const int n_tokens = static_cast<int>(ex.tokens.token_ids.size());
  const int n_frames = static_cast<int>(ex.mel.rows());
  Require(n_tokens > 0, "ForwardTrain: empty token sequence");
  if (ex.mel.cols() != cfg.n_mels)
    Fail(ErrorKind::kInvalidArgument, "grid mismatch: target mel has " +
                                          std::to_string(ex.mel.cols()) + " bands, model expects " +
                                          std::to_string(cfg.n_mels));
  if (static_cast<int>(ex.pitch.f0_hz.size()) != n_frames ||
      static_cast<int>(ex.pitch.voiced.size()) != n_frames)
    Fail(ErrorKind::kInvalidArgument, "grid mismatch: pitch contour has " +
                                          std::to_string(ex.pitch.f0_hz.size()) +
                                          " frames, mel has " + std::to_string(n_frames));
  if (n_frames < n_tokens)
    Fail(ErrorKind::kInvalidArgument, "grid mismatch: fewer frames than tokens");
  const int speaker_row = state.speakers.Row(ex.speaker);

  ModelGraph mg(state, opts);
  Graph &g = mg.graph();
  Var x0 = mg.Inputs(ex.tokens, speaker_row);

  // Alignment between token keys and mel queries.
  Var keys = nn::GatherRows(g, mg.P(kAlignTokenEmbedding), ex.tokens.token_ids);
  Var queries = mg.Linear(g.Constant(StandardizeBands(ex.mel)), "align.query");
  Var logits = nn::NegSquaredDistance(g, keys, queries, std::sqrt(static_cast<double>(cfg.d_model)));
  Var align_loss = nn::ForwardSumLoss(g, logits);
  const Matrix log_post = aligner::LogSoftmaxOverTokens(g.value(logits));
  const aligner::MonotonicPath path = aligner::ExtractMonotonicPathFromLogProbs(log_post);
  aligner::DurationTargets durations = aligner::PathToDurations(path, n_tokens);

  Var h = mg.Encode(x0);
  Var log_dur = mg.Predictor(h, "dur");
  Var pitch_pred = mg.Predictor(h, "pitch");

  const std::vector<double> pitch_hz = dsp::AveragePitchPerToken(ex.pitch, durations.durations);
  Matrix pitch_target(n_tokens, 1), dur_target(n_tokens, 1);
  for (int t = 0; t < n_tokens; ++t) {
    pitch_target(t, 0) = NormalizePitch(cfg, pitch_hz[t]);
    dur_target(t, 0) = std::log1p(static_cast<double>(durations.durations[t]));
  }

  Var mel = mg.Decode(h, g.Constant(pitch_target), path);

  Var mel_loss = nn::MseLoss(g, mel, ex.mel);
  Var dur_loss = nn::MseLoss(g, log_dur, dur_target);
  Var pitch_loss = nn::MseLoss(g, pitch_pred, pitch_target);
  const Var weighted[] = {nn::Scale(g, mel_loss, opts.weights.mel),
                          nn::Scale(g, dur_loss, opts.weights.duration),
                          nn::Scale(g, pitch_loss, opts.weights.pitch),
                          nn::Scale(g, align_loss, opts.weights.align)};
  Var total = nn::SumScalars(g, weighted);

  TrainBatchOutput out;
  out.pred_mel = g.value(mel);
  out.pred_log_durations = Column(g.value(log_dur));
  out.pred_pitch = Column(g.value(pitch_pred));
  out.target_pitch = Column(pitch_target);
  out.alignment.probs = log_post.array().exp().matrix();
  out.durations = std::move(durations);
  out.losses.mel_mse = g.scalar(mel_loss);
  out.losses.duration = g.scalar(dur_loss);
  out.losses.pitch = g.scalar(pitch_loss);
  out.losses.align = g.scalar(align_loss);
  out.losses.total = g.scalar(total);

  if (grads != nullptr) {
    g.Backward(total);
    g.AccumulateParamGrads(*grads);
  }
  return out;
}

InferenceOutput ForwardInfer(const AcousticModelState &state, const corpus::TokenSequence &tokens,
                             const std::string &speaker, double pace, double pitch_shift_hz) {
  Require(pace > 0.0, "pace must be positive");
  Require(!tokens.token_ids.empty(), "ForwardInfer: empty token sequence");
  const int speaker_row = state.speakers.Row(speaker);
  const ForwardOptions opts;
  ModelGraph mg(state, opts);
  Graph &g = mg.graph();
  Var h = mg.Encode(mg.Inputs(tokens, speaker_row));
  const Matrix log_dur = g.value(mg.Predictor(h, "dur"));
  const Matrix pitch = g.value(mg.Predictor(h, "pitch"));

  const int n = static_cast<int>(tokens.token_ids.size());
  InferenceOutput out;
  out.durations.durations.resize(n);
  out.pitch_hz.resize(n);
  Matrix pitch_cond(n, 1);
  for (int t = 0; t < n; ++t) {
    const double frames = std::round(std::expm1(log_dur(t, 0)) / pace);
    out.durations.durations[t] = static_cast<int>(std::max(1.0, std::min(frames, 1e6)));
    pitch_cond(t, 0) = pitch(t, 0) + pitch_shift_hz / state.cfg.pitch_std;
    out.pitch_hz[t] = pitch_cond(t, 0) * state.cfg.pitch_std + state.cfg.pitch_mean;
  }
  const aligner::MonotonicPath path = aligner::DurationsToPath(out.durations);
  out.mel.cfg = state.mel_cfg;
  out.mel.values = g.value(mg.Decode(h, g.Constant(pitch_cond), path));
  return out;
}

}  // namespace childtts::acoustic
