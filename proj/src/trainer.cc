// src/trainer.cc

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

#include "childtts/trainer.h"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "childtts/jsonio.h"

namespace childtts::trainer {

namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t Mix(uint64_t a, uint64_t b, uint64_t c = 0) {
  return SplitMix(SplitMix(SplitMix(a) ^ b) ^ c);
}

class ByteWriter {
 public:
  template <class T>
  void Put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void PutBytes(std::string_view s) { out_.append(s); }
  std::string &str() { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}
  template <class T>
  T Get() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view GetBytes(size_t n) {
    Need(n);
    std::string_view s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(size_t n) const {
    if (data_.size() - pos_ < n) Fail(ErrorKind::kIo, what_ + ": unexpected end of data");
  }
  std::string_view data_;
  std::string what_;
  size_t pos_ = 0;
};

static_assert(std::endian::native == std::endian::little, "little-endian host required");

void PutMatrix(ByteWriter &w, const Matrix &m) {
  w.Put<uint32_t>(static_cast<uint32_t>(m.rows()));
  w.Put<uint32_t>(static_cast<uint32_t>(m.cols()));
  w.PutBytes(std::string_view(reinterpret_cast<const char *>(m.data()),
                              sizeof(double) * static_cast<size_t>(m.size())));
}

Matrix GetMatrix(ByteReader &r) {
  const uint32_t rows = r.Get<uint32_t>(), cols = r.Get<uint32_t>();
  Matrix m(rows, cols);
  std::string_view raw = r.GetBytes(sizeof(double) * static_cast<size_t>(rows) * cols);
  std::memcpy(m.data(), raw.data(), raw.size());
  return m;
}

uint32_t Crc32(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  size_t pos = 0;
  while (pos < data.size()) {
    const size_t n = std::min<size_t>(data.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef *>(data.data() + pos), static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<uint32_t>(crc);
}

void CheckData(const acoustic::AcousticModelState &s,
               const std::vector<acoustic::TrainingExample> &data) {
  if (data.empty()) Fail(ErrorKind::kInvalidArgument, "training corpus is empty");
  for (const auto &ex : data) {
    for (int id : ex.tokens.token_ids)
      if (id < 0 || id >= s.cfg.vocab_size)
        Fail(ErrorKind::kInvalidArgument,
             "corpus/model vocabulary mismatch: token id " + std::to_string(id) +
                 " with vocab_size " + std::to_string(s.cfg.vocab_size));
    if (ex.mel.cols() != s.cfg.n_mels)
      Fail(ErrorKind::kInvalidArgument, "corpus/model mel band mismatch");
    if (!s.speakers.Contains(ex.speaker))
      Fail(ErrorKind::kInvalidArgument, "speaker '" + ex.speaker + "' is not registered");
  }
}

std::vector<std::string> UnregisteredSpeakers(const acoustic::AcousticModelState &s,
                                              const std::vector<acoustic::TrainingExample> &data) {
  std::set<std::string> labels;
  for (const auto &ex : data)
    if (!s.speakers.Contains(ex.speaker)) labels.insert(ex.speaker);
  return {labels.begin(), labels.end()};
}

// Grows moment tensors to the (possibly larger) parameter shapes, zero fill.
void MatchMoments(const nn::ParameterSet &params, nn::ParameterSet &moments) {
  for (const auto &[name, p] : params) {
    Matrix &m = moments[name];
    if (m.rows() == p.rows() && m.cols() == p.cols()) continue;
    Matrix grown = Matrix::Zero(p.rows(), p.cols());
    const Eigen::Index r = std::min(m.rows(), p.rows()), c = std::min(m.cols(), p.cols());
    grown.topLeftCorner(r, c) = m.topLeftCorner(r, c);
    m = std::move(grown);
  }
}

std::vector<int> EpochPermutation(int n, uint64_t seed, int64_t epoch) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(Mix(seed, static_cast<uint64_t>(epoch), 0x5eed));
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace

void TrainCfg::Validate() const {
  Require(base_lr > 0.0, "TrainCfg: base_lr must be positive");
  Require(weight_decay >= 0.0, "TrainCfg: weight_decay must be non-negative");
  Require(warmup_steps >= 1, "TrainCfg: warmup_steps must be at least 1");
  Require(max_steps > 0, "TrainCfg: max_steps must be positive");
  Require(batch_size >= 1, "TrainCfg: batch_size must be at least 1");
  Require(checkpoint_every >= 0, "TrainCfg: checkpoint_every must be non-negative");
  Require(grad_clip_norm > 0.0, "TrainCfg: grad_clip_norm must be positive");
  Require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "TrainCfg: adam_beta1 must be in [0, 1)");
  Require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "TrainCfg: adam_beta2 must be in [0, 1)");
  Require(adam_eps > 0.0, "TrainCfg: adam_eps must be positive");
  Require(loss_weights.mel >= 0.0 && loss_weights.duration >= 0.0 && loss_weights.pitch >= 0.0 &&
              loss_weights.align >= 0.0,
          "TrainCfg: loss weights must be non-negative");
}

double LrAtStep(int step, const TrainCfg &cfg) {
  Require(step >= 1, "LrAtStep: step must be at least 1");
  const double s = step, w = cfg.warmup_steps;
  return cfg.base_lr * std::sqrt(w) * std::min(1.0 / std::sqrt(s), s * std::pow(w, -1.5));
}

// ---------------------------------------------------------------------------
// Loss curve

void LossCurve::Append(const LossRow &row) {
  if (!rows_.empty() && row.step <= rows_.back().step)
    Fail(ErrorKind::kInvalidArgument, "loss curve steps must increase: " +
                                          std::to_string(row.step) + " after " +
                                          std::to_string(rows_.back().step));
  rows_.push_back(row);
}

void LossCurve::Extend(const LossCurve &later) {
  for (const auto &r : later.rows()) Append(r);
}

std::string LossCurve::ToCsv() const {
  std::string out = "step,mel_mse,duration,pitch,align,total,lr\n";
  char buf[512];
  for (const auto &r : rows_) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                  r.losses.mel_mse, r.losses.duration, r.losses.pitch, r.losses.align,
                  r.losses.total, r.lr);
    out += buf;
  }
  return out;
}

LossCurve LossCurve::FromCsv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "step,mel_mse,duration,pitch,align,total,lr")
    Fail(ErrorKind::kValidation, "loss curve: missing or wrong header");
  LossCurve curve;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LossRow r;
    const int n = std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%lf", &r.step,
                              &r.losses.mel_mse, &r.losses.duration, &r.losses.pitch,
                              &r.losses.align, &r.losses.total, &r.lr);
    if (n != 7) Fail(ErrorKind::kValidation, "loss curve: malformed line " + std::to_string(line_no));
    curve.Append(r);
  }
  return curve;
}

std::vector<double> CurveValues(const LossCurve &curve, CurveMetric metric) {
  std::vector<double> out;
  out.reserve(curve.rows().size());
  for (const auto &r : curve.rows())
    out.push_back(metric == CurveMetric::kTotal ? r.losses.total : r.losses.mel_mse);
  return out;
}

std::vector<double> Smooth(const std::vector<double> &x, int window) {
  Require(window >= 1, "Smooth: window must be at least 1");
  std::vector<double> out(x.size());
  for (size_t t = 0; t < x.size(); ++t) {
    const size_t lo = t + 1 >= static_cast<size_t>(window) ? t + 1 - window : 0;
    double sum = 0.0;
    for (size_t k = lo; k <= t; ++k) sum += x[k];
    out[t] = sum / static_cast<double>(t - lo + 1);
  }
  return out;
}

std::optional<int> FirstEarlyStopStep(const LossCurve &curve, int patience_steps) {
  Require(patience_steps >= 1, "early stop: patience must be at least 1");
  const std::vector<double> s = Smooth(CurveValues(curve), 50);
  const size_t p = static_cast<size_t>(patience_steps);
  double best_before = std::numeric_limits<double>::infinity();
  for (size_t t = p; t < s.size(); ++t) {
    best_before = std::min(best_before, s[t - p]);
    double best_recent = s[t - p + 1];
    for (size_t k = t - p + 1; k <= t; ++k) best_recent = std::min(best_recent, s[k]);
    if (best_recent > 0.99 * best_before) return curve.rows()[t].step;
  }
  return std::nullopt;
}

bool EarlyStopCheck(const LossCurve &curve, int patience_steps) {
  return FirstEarlyStopStep(curve, patience_steps).has_value();
}

// ---------------------------------------------------------------------------
// Features

namespace {

std::string EncodeFeatures(const Matrix &mel, const dsp::PitchContour &pc) {
  ByteWriter w;
  w.PutBytes("FEAT");
  PutMatrix(w, mel);
  w.Put<uint32_t>(static_cast<uint32_t>(pc.f0_hz.size()));
  for (double f : pc.f0_hz) w.Put<double>(f);
  return std::move(w.str());
}

void DecodeFeatures(std::string_view bytes, const std::string &what, Matrix *mel,
                    dsp::PitchContour *pc) {
  ByteReader r(bytes, what);
  if (r.GetBytes(4) != "FEAT") Fail(ErrorKind::kIo, what + ": bad magic");
  *mel = GetMatrix(r);
  const uint32_t n = r.Get<uint32_t>();
  pc->f0_hz.resize(n);
  pc->voiced.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    pc->f0_hz[i] = r.Get<double>();
    pc->voiced[i] = pc->f0_hz[i] > 0.0;
  }
  if (static_cast<Eigen::Index>(n) != mel->rows())
    Fail(ErrorKind::kIo, what + ": mel/F0 frame count mismatch");
}

}  // namespace

std::vector<acoustic::TrainingExample> LoadExamples(const corpus::CorpusManifest &m,
                                                    const dsp::MelCfg &mel_cfg,
                                                    const dsp::F0Cfg &f0_cfg,
                                                    const std::filesystem::path &cache_dir,
                                                    FeatureCacheStats *stats) {
  mel_cfg.Validate();
  const std::string cfg_key = ToJson(mel_cfg).dump() + ToJson(f0_cfg).dump();
  std::vector<acoustic::TrainingExample> out;
  out.reserve(m.records.size());
  for (const auto &rec : m.records) {
    acoustic::TrainingExample ex;
    ex.tokens = corpus::Tokenize(corpus::NormalizeText(rec.transcript));
    ex.speaker = rec.speaker_id;
    const std::filesystem::path audio = m.ResolveAudio(rec);
    std::filesystem::path cache_file;
    bool loaded = false;
    if (!cache_dir.empty()) {
      const std::string key = Sha256Hex(ReadFileBytes(audio) + cfg_key);
      cache_file = cache_dir / (key + ".feat");
      if (std::filesystem::exists(cache_file)) {
        DecodeFeatures(ReadFileBytes(cache_file), cache_file.string(), &ex.mel, &ex.pitch);
        loaded = true;
        if (stats) ++stats->reused;
      }
    }
    if (!loaded) {
      dsp::Waveform w = dsp::ReadWav(audio);
      if (w.sample_rate != mel_cfg.sample_rate) w = dsp::Resample(w, mel_cfg.sample_rate);
      ex.mel = dsp::ComputeMelSpectrogram(w, mel_cfg).values;
      ex.pitch = dsp::ExtractF0(w, f0_cfg, mel_cfg);
      if (!cache_file.empty()) {
        WriteFileAtomic(cache_file, EncodeFeatures(ex.mel, ex.pitch));
        if (stats) ++stats->built;
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::string CorpusFingerprint(const corpus::CorpusManifest &m) {
  return Sha256Hex(corpus::SerializeManifest(m));
}

// ---------------------------------------------------------------------------
// Training

TrainResult Train(CheckpointBundle b, const std::vector<acoustic::TrainingExample> &data,
                  const TrainCfg &cfg, int n_steps, const CheckpointCallback &on_checkpoint) {
  cfg.Validate();
  Require(n_steps > 0, "Train: number of steps must be positive");
  CheckData(b.model, data);
  MatchMoments(b.model.params, b.optimizer.m);
  MatchMoments(b.model.params, b.optimizer.v);
  b.train_cfg = cfg;

  const int n = static_cast<int>(data.size());
  int64_t perm_epoch = -1;
  std::vector<int> perm;
  TrainResult result;
  const int first = b.step + 1, last = b.step + n_steps;
  for (int step = first; step <= last; ++step) {
    nn::ParameterSet grads = nn::ZerosLike(b.model.params);
    acoustic::LossComponents mean;
    for (int k = 0; k < cfg.batch_size; ++k) {
      const int64_t item = static_cast<int64_t>(step - 1) * cfg.batch_size + k;
      const int64_t epoch = item / n;
      if (epoch != perm_epoch) {
        perm = EpochPermutation(n, cfg.seed, epoch);
        perm_epoch = epoch;
      }
      acoustic::ForwardOptions opts;
      opts.weights = cfg.loss_weights;
      opts.apply_dropout = true;
      opts.dropout_seed = Mix(cfg.seed, static_cast<uint64_t>(step), static_cast<uint64_t>(k));
      const auto out = acoustic::ForwardTrain(b.model, data[perm[item % n]], opts, &grads);
      mean.mel_mse += out.losses.mel_mse;
      mean.duration += out.losses.duration;
      mean.pitch += out.losses.pitch;
      mean.align += out.losses.align;
      mean.total += out.losses.total;
    }
    const double inv = 1.0 / cfg.batch_size;
    mean.mel_mse *= inv;
    mean.duration *= inv;
    mean.pitch *= inv;
    mean.align *= inv;
    mean.total *= inv;
    if (!std::isfinite(mean.total))
      Fail(ErrorKind::kRuntime, "non-finite loss at step " + std::to_string(step));

    double sq = 0.0;
    for (auto &[name, g] : grads) {
      g *= inv;
      sq += g.squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm))
      Fail(ErrorKind::kRuntime, "non-finite gradient at step " + std::to_string(step));
    const double clip = norm > cfg.grad_clip_norm ? cfg.grad_clip_norm / norm : 1.0;

    const double lr = LrAtStep(step, cfg);
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, step);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, step);
    for (auto &[name, p] : b.model.params) {
      const Matrix g = grads.at(name) * clip;
      Matrix &m = b.optimizer.m.at(name);
      Matrix &v = b.optimizer.v.at(name);
      m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
      v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
      const auto update = (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.adam_eps);
      p.array() -= lr * (update + cfg.weight_decay * p.array());
    }
    b.step = step;
    result.curve.Append({step, mean, lr});
    if (on_checkpoint && cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0)
      on_checkpoint(b);
  }
  result.bundle = std::move(b);
  return result;
}

TrainResult Pretrain(const std::vector<acoustic::TrainingExample> &data,
                     const acoustic::ModelCfg &model_cfg, const dsp::MelCfg &mel_cfg,
                     const TrainCfg &train_cfg, const std::string &corpus_fingerprint,
                     const CheckpointCallback &on_checkpoint) {
  train_cfg.Validate();
  if (data.empty()) Fail(ErrorKind::kInvalidArgument, "training corpus is empty");
  CheckpointBundle b;
  b.model = acoustic::InitModel(model_cfg, train_cfg.seed, mel_cfg);
  b.model = acoustic::AddSpeakers(b.model, UnregisteredSpeakers(b.model, data), train_cfg.seed);
  b.optimizer.m = nn::ZerosLike(b.model.params);
  b.optimizer.v = nn::ZerosLike(b.model.params);
  b.corpus_fingerprint = corpus_fingerprint;
  return Train(std::move(b), data, train_cfg, train_cfg.max_steps, on_checkpoint);
}

TrainResult Finetune(const CheckpointBundle &ckpt,
                     const std::vector<acoustic::TrainingExample> &data,
                     const TrainCfg &train_cfg, const std::string &corpus_fingerprint,
                     const CheckpointCallback &on_checkpoint) {
  train_cfg.Validate();
  if (data.empty()) Fail(ErrorKind::kInvalidArgument, "child corpus is empty");
  CheckpointBundle b = ckpt;
  const auto fresh = UnregisteredSpeakers(b.model, data);
  if (!fresh.empty()) b.model = acoustic::AddSpeakers(b.model, fresh, train_cfg.seed);
  b.corpus_fingerprint = corpus_fingerprint;
  return Train(std::move(b), data, train_cfg, train_cfg.max_steps, on_checkpoint);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {
constexpr char kCheckpointMagic[8] = {'C', 'T', 'T', 'S', 'C', 'K', 'P', 'T'};
}

std::string EncodeCheckpoint(const CheckpointBundle &b) {
  Json meta = {{"model_cfg", ToJson(b.model.cfg)},
               {"mel_cfg", ToJson(b.model.mel_cfg)},
               {"train_cfg", ToJson(b.train_cfg)},
               {"speakers", b.model.speakers.Labels()},
               {"step", b.step},
               {"corpus_fingerprint", b.corpus_fingerprint},
               {"seed_lineage", b.model.seed_lineage}};
  const std::string meta_text = meta.dump();
  ByteWriter w;
  w.PutBytes(std::string_view(kCheckpointMagic, 8));
  w.Put<uint32_t>(kCheckpointVersion);
  w.Put<uint64_t>(meta_text.size());
  w.PutBytes(meta_text);
  const std::pair<const char *, const nn::ParameterSet *> groups[] = {
      {"param/", &b.model.params}, {"adam_m/", &b.optimizer.m}, {"adam_v/", &b.optimizer.v}};
  uint32_t count = 0;
  for (const auto &g : groups) count += static_cast<uint32_t>(g.second->size());
  w.Put<uint32_t>(count);
  for (const auto &[prefix, set] : groups) {
    for (const auto &[name, t] : *set) {
      const std::string full = prefix + name;
      w.Put<uint32_t>(static_cast<uint32_t>(full.size()));
      w.PutBytes(full);
      PutMatrix(w, t);
    }
  }
  w.Put<uint32_t>(Crc32(w.str()));
  return std::move(w.str());
}

CheckpointBundle DecodeCheckpoint(std::string_view bytes) {
  const std::string what = "checkpoint";
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0)
    Fail(ErrorKind::kIo, "checkpoint: not a checkpoint file (bad magic)");
  if (bytes.size() < 8 + 4 + 4)
    Fail(ErrorKind::kIo, "checkpoint: checksum mismatch (file truncated)");
  uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (Crc32(bytes.substr(0, bytes.size() - 4)) != stored)
    Fail(ErrorKind::kIo, "checkpoint: checksum mismatch (corrupt or truncated file)");

  ByteReader r(bytes.substr(0, bytes.size() - 4), what);
  r.GetBytes(8);
  const uint32_t version = r.Get<uint32_t>();
  if (version != kCheckpointVersion)
    Fail(ErrorKind::kIo, "checkpoint: version " + std::to_string(version) +
                             " is not supported (expected " +
                             std::to_string(kCheckpointVersion) + ")");
  const uint64_t meta_len = r.Get<uint64_t>();
  Json meta;
  try {
    meta = Json::parse(r.GetBytes(meta_len));
  } catch (const Json::exception &e) {
    Fail(ErrorKind::kIo, std::string("checkpoint: bad metadata: ") + e.what());
  }
  CheckpointBundle b;
  try {
    FromJson(meta.at("model_cfg"), "model_cfg", &b.model.cfg);
    FromJson(meta.at("mel_cfg"), "mel_cfg", &b.model.mel_cfg);
    FromJson(meta.at("train_cfg"), "train_cfg", &b.train_cfg);
    const auto labels = meta.at("speakers").get<std::vector<std::string>>();
    for (size_t i = 0; i < labels.size(); ++i)
      b.model.speakers.Assign(labels[i], static_cast<int>(i));
    b.step = meta.at("step").get<int>();
    b.corpus_fingerprint = meta.at("corpus_fingerprint").get<std::string>();
    b.model.seed_lineage = meta.at("seed_lineage").get<std::vector<uint64_t>>();
  } catch (const Json::exception &e) {
    Fail(ErrorKind::kIo, std::string("checkpoint: bad metadata: ") + e.what());
  }
  const uint32_t count = r.Get<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t len = r.Get<uint32_t>();
    const std::string name(r.GetBytes(len));
    Matrix t = GetMatrix(r);
    const auto slash = name.find('/');
    if (slash == std::string::npos) Fail(ErrorKind::kIo, "checkpoint: bad tensor name " + name);
    const std::string group = name.substr(0, slash), key = name.substr(slash + 1);
    if (group == "param")
      b.model.params[key] = std::move(t);
    else if (group == "adam_m")
      b.optimizer.m[key] = std::move(t);
    else if (group == "adam_v")
      b.optimizer.v[key] = std::move(t);
    else
      Fail(ErrorKind::kIo, "checkpoint: bad tensor group " + group);
  }
  if (r.remaining() != 0) Fail(ErrorKind::kIo, "checkpoint: trailing bytes");
  return b;
}

void SaveCheckpoint(const CheckpointBundle &b, const std::filesystem::path &path) {
  WriteFileAtomic(path, EncodeCheckpoint(b));
}

CheckpointBundle LoadCheckpoint(const std::filesystem::path &path) {
  if (!std::filesystem::exists(path))
    Fail(ErrorKind::kMissingArtifact, "checkpoint not found: " + path.string());
  return DecodeCheckpoint(ReadFileBytes(path));
}

}  // namespace childtts::trainer
