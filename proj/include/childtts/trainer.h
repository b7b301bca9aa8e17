// childtts/trainer.h

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

#ifndef CHILDTTS_TRAINER_H_
#define CHILDTTS_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "childtts/acoustic.h"
#include "childtts/corpus.h"
#include "childtts/dsp.h"

namespace childtts::trainer {

struct TrainCfg {
  double base_lr = 0.1;
  double weight_decay = 1e-6;
  int warmup_steps = 2000;
  int max_steps = 1000;
  int batch_size = 8;
  uint64_t seed = 1;
  int checkpoint_every = 0;  // 0: no intermediate checkpoints
  double grad_clip_norm = 1000.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_eps = 1e-9;
  acoustic::LossWeights loss_weights;

  void Validate() const;
  bool operator==(const TrainCfg &) const = default;
};

/// lr = base_lr * sqrt(warmup) * min(step^-0.5, step * warmup^-1.5).
/// Peaks at base_lr when step == warmup_steps.
double LrAtStep(int step, const TrainCfg &cfg);

// First and second AdamW moments, same names and shapes as the parameters.
struct OptimizerState {
  nn::ParameterSet m;
  nn::ParameterSet v;
};

struct CheckpointBundle {
  acoustic::AcousticModelState model;
  OptimizerState optimizer;
  int step = 0;  // optimizer steps taken so far, across all stages
  TrainCfg train_cfg;
  std::string corpus_fingerprint;
};

struct LossRow {
  int step = 0;
  acoustic::LossComponents losses;
  double lr = 0.0;
};

class LossCurve {
 public:
  // Steps must be strictly increasing.
  void Append(const LossRow &row);
  void Extend(const LossCurve &later);
  const std::vector<LossRow> &rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  // Header `step,mel_mse,duration,pitch,align,total,lr`, values printed with
  // 17 significant digits so a parse reproduces them exactly.
  std::string ToCsv() const;
  static LossCurve FromCsv(const std::string &text);

 private:
  std::vector<LossRow> rows_;
};

enum class CurveMetric { kTotal, kMelMse };
std::vector<double> CurveValues(const LossCurve &curve, CurveMetric metric = CurveMetric::kTotal);

// Trailing moving average: out[t] = mean(x[max(0, t-window+1) .. t]).
std::vector<double> Smooth(const std::vector<double> &x, int window = 50);

/// Early stopping on the smoothed (window 50) total loss.  Index t is flagged
/// when the best smoothed value over the last `patience` rows,
/// s[t-patience+1 .. t], is not at least 1% below the best value before
/// them, s[0 .. t-patience].  Returns the step of the first flagged row.
std::optional<int> FirstEarlyStopStep(const LossCurve &curve, int patience_steps);
bool EarlyStopCheck(const LossCurve &curve, int patience_steps);

// ---- features -------------------------------------------------------------

struct FeatureCacheStats {
  int built = 0;
  int reused = 0;
};

/// Mel and F0 features for every record.  Audio at another rate is
/// resampled to mel_cfg.sample_rate first.  With a non-empty cache_dir the
/// features are stored as `<cache_dir>/<sha256>.feat`, keyed by the WAV
/// bytes and both configs, and reused when present.
std::vector<acoustic::TrainingExample> LoadExamples(const corpus::CorpusManifest &m,
                                                    const dsp::MelCfg &mel_cfg,
                                                    const dsp::F0Cfg &f0_cfg,
                                                    const std::filesystem::path &cache_dir = {},
                                                    FeatureCacheStats *stats = nullptr);

// SHA-256 of the canonical manifest serialization.
std::string CorpusFingerprint(const corpus::CorpusManifest &m);

// ---- training -------------------------------------------------------------

struct TrainResult {
  CheckpointBundle bundle;
  LossCurve curve;
};

using CheckpointCallback = std::function<void(const CheckpointBundle &)>;

/// Runs `n_steps` optimizer steps starting after `start.step`.
///
/// Batch k (1-based step) holds items (k-1)*B .. k*B-1 of an endless
/// stream in which epoch e is a permutation of the examples drawn from
/// mt19937_64 seeded by (seed, e).  The step gradient is the mean of the
/// per-item gradients summed in batch order, clipped to grad_clip_norm,
/// then applied with bias-corrected AdamW and decoupled weight decay.  All
/// randomness is a function of (seed, step), so resuming from a checkpoint
/// reproduces an uninterrupted run bit for bit.
TrainResult Train(CheckpointBundle start, const std::vector<acoustic::TrainingExample> &data,
                  const TrainCfg &cfg, int n_steps, const CheckpointCallback &on_checkpoint = {});

/// Fresh model from `seed`, every corpus speaker registered (sorted by
/// label), then train_cfg.max_steps steps.
TrainResult Pretrain(const std::vector<acoustic::TrainingExample> &data,
                     const acoustic::ModelCfg &model_cfg, const dsp::MelCfg &mel_cfg,
                     const TrainCfg &train_cfg, const std::string &corpus_fingerprint,
                     const CheckpointCallback &on_checkpoint = {});

/// Registers unseen speakers (zero optimizer moments for their rows) and
/// continues for train_cfg.max_steps more steps; step numbering carries on
/// from the checkpoint.
TrainResult Finetune(const CheckpointBundle &ckpt,
                     const std::vector<acoustic::TrainingExample> &data,
                     const TrainCfg &train_cfg, const std::string &corpus_fingerprint,
                     const CheckpointCallback &on_checkpoint = {});

// ---- checkpoints ----------------------------------------------------------

inline constexpr uint32_t kCheckpointVersion = 1;

/// Layout (little-endian):
///   char[8] "CTTSCKPT"; u32 version; u64 meta_len; meta_len bytes of JSON
///   (configs, speaker labels, step, fingerprint, seed lineage);
///   u32 n_tensors; per tensor: u32 name_len, name, u32 rows, u32 cols,
///   f64 values (row-major);  u32 CRC-32 of every preceding byte.
/// Tensor names are "param/<name>", "adam_m/<name>" and "adam_v/<name>".
std::string EncodeCheckpoint(const CheckpointBundle &b);
CheckpointBundle DecodeCheckpoint(std::string_view bytes);
void SaveCheckpoint(const CheckpointBundle &b, const std::filesystem::path &path);
CheckpointBundle LoadCheckpoint(const std::filesystem::path &path);

}  // namespace childtts::trainer

#endif  // CHILDTTS_TRAINER_H_
