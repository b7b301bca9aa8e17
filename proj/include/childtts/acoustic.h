// childtts/acoustic.h

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

#ifndef CHILDTTS_ACOUSTIC_H_
#define CHILDTTS_ACOUSTIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "childtts/aligner.h"
#include "childtts/autodiff.h"
#include "childtts/corpus.h"
#include "childtts/dsp.h"

// Parallel acoustic model.
//
//   tokens --embed--> (+ speaker row) --+--> encoder FFT blocks --> h
//                                       |                          |
//                                       |          duration / pitch predictors
//                                       v                          |
//   target mel --> query map --> alignment logits <-- key table    v
//                                       |            h + pitch_embed(pitch)
//                                   Viterbi                        |
//                                       +-----> length regulator <-+
//                                                       |
//                                           decoder FFT blocks --> mel
//
// An FFT block is post-norm self-attention followed by a 2-layer 1-D
// convolutional feed-forward net (kernel 3 then kernel 1).  Both
// predictors are conv(k3)-ReLU-LayerNorm twice, then a linear head.
//
// The aligner has its own token table for keys; queries are a linear map
// of the target mel after per-utterance, per-band standardisation.  The
// aligner only learns from the forward-sum loss.

namespace childtts::acoustic {

struct ModelCfg {
  int vocab_size = 31;
  int d_model = 64;
  int n_enc_layers = 2;
  int n_dec_layers = 2;
  int n_heads = 2;
  int ff_dim = 128;
  int n_mels = 80;
  int speaker_embed_dim = 64;
  int max_speakers = 16;
  double dropout = 0.0;
  // Pitch is modelled as (hz - pitch_mean) / pitch_std on voiced tokens and
  // 0 on unvoiced ones.
  double pitch_mean = 200.0;
  double pitch_std = 100.0;

  void Validate() const;
  bool operator==(const ModelCfg &) const = default;
};

class SpeakerTable {
 public:
  bool Contains(const std::string &label) const { return rows_.count(label) > 0; }
  int Row(const std::string &label) const;
  int size() const { return static_cast<int>(rows_.size()); }
  const std::map<std::string, int> &id_map() const { return rows_; }
  // Labels in row order.
  std::vector<std::string> Labels() const;
  void Assign(const std::string &label, int row);

 private:
  std::map<std::string, int> rows_;
};

inline constexpr const char *kSpeakerEmbedding = "embed.speaker";
inline constexpr const char *kTokenEmbedding = "embed.token";

struct AcousticModelState {
  ModelCfg cfg;
  dsp::MelCfg mel_cfg;
  nn::ParameterSet params;
  SpeakerTable speakers;
  // Seeds that produced the current parameters: init seed first, then one
  // entry per AddSpeakers call.
  std::vector<uint64_t> seed_lineage;
};

/// Weights: U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with fan_in the number of
/// input rows; biases and LayerNorm shifts 0; LayerNorm gains 1; token and
/// speaker embeddings U(-sqrt(3), sqrt(3)); the aligner token table
/// U(-0.1, 0.1) and the aligner query weights scaled by 0.1.  Parameters are drawn in name
/// order from one mt19937_64 stream seeded with `seed`.
AcousticModelState InitModel(const ModelCfg &cfg, uint64_t seed,
                             const dsp::MelCfg &mel_cfg = {});

// New speakers take the next free rows (growing the table past
// max_speakers if needed).  With an empty table the initial rows are kept;
// otherwise each new row is the mean of the registered rows plus N(0, 0.01^2)
// noise drawn from `seed`.  Registered rows are untouched.
AcousticModelState AddSpeakers(const AcousticModelState &state,
                               const std::vector<std::string> &labels, uint64_t seed);

// Repeats row t of token_reps durations[t] times.
Matrix LengthRegulate(const Matrix &token_reps, const aligner::DurationTargets &d);

struct TrainingExample {
  corpus::TokenSequence tokens;
  std::string speaker;
  Matrix mel;               // [n_frames x n_mels]
  dsp::PitchContour pitch;  // n_frames entries
};

struct LossComponents {
  double mel_mse = 0.0;
  double duration = 0.0;
  double pitch = 0.0;
  double align = 0.0;
  double total = 0.0;
};

struct LossWeights {
  double mel = 1.0;
  double duration = 1.0;
  double pitch = 1.0;
  double align = 1.0;

  bool operator==(const LossWeights &) const = default;
};

struct ForwardOptions {
  LossWeights weights;
  bool apply_dropout = false;
  uint64_t dropout_seed = 0;
};

struct TrainBatchOutput {
  Matrix pred_mel;                      // [n_frames x n_mels]
  Vector pred_log_durations;            // log(1 + frames), per token
  Vector pred_pitch;                    // normalized pitch, per token
  Vector target_pitch;                  // normalized pitch, per token
  aligner::AlignmentPosterior alignment;
  aligner::DurationTargets durations;   // Viterbi durations used for teacher forcing
  LossComponents losses;
};

/// Teacher-forced training pass.  Durations come from the Viterbi path of
/// the model's own alignment posterior; per-token pitch targets are the
/// contour averaged over those durations.  Losses: mel MSE, MSE of
/// log(1 + duration), MSE of normalized per-token pitch and the forward-sum
/// alignment loss; total is their weighted sum.  When `grads` is non-null
/// the gradient of the total is added into it.
TrainBatchOutput ForwardTrain(const AcousticModelState &state, const TrainingExample &ex,
                              const ForwardOptions &opts = {},
                              nn::ParameterSet *grads = nullptr);

struct InferenceOutput {
  dsp::MelSpectrogram mel;
  aligner::DurationTargets durations;
  std::vector<double> pitch_hz;  // conditioning pitch per token, after the shift
};

/// durations[t] = max(1, round((exp(pred_log_duration[t]) - 1) / pace)),
/// rounding half away from zero.  The predicted pitch is shifted by
/// pitch_shift_hz before it conditions the decoder.
InferenceOutput ForwardInfer(const AcousticModelState &state,
                             const corpus::TokenSequence &tokens,
                             const std::string &speaker, double pace = 1.0,
                             double pitch_shift_hz = 0.0);

double NormalizePitch(const ModelCfg &cfg, double hz);

}  // namespace childtts::acoustic

#endif  // CHILDTTS_ACOUSTIC_H_
