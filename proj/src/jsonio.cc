// src/jsonio.cc

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

#include "childtts/jsonio.h"

namespace childtts {

StrictObject::StrictObject(const Json &j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object())
    Fail(ErrorKind::kValidation,
         "config: " + (path_.empty() ? std::string("document") : path_) + " must be an object");
}

const Json *StrictObject::Child(const std::string &key) {
  seen_.insert(key);
  auto it = j_.find(key);
  return it == j_.end() ? nullptr : &*it;
}

void StrictObject::Finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it)
    if (!seen_.count(it.key()))
      Fail(ErrorKind::kValidation, "config: unknown key '" + Key(it.key()) + "'");
}

Json ToJson(const dsp::MelCfg &c) {
  return {{"sample_rate", c.sample_rate}, {"n_fft", c.n_fft},   {"win_length", c.win_length},
          {"hop_length", c.hop_length},   {"n_mels", c.n_mels}, {"fmin", c.fmin},
          {"fmax", c.fmax}};
}

Json ToJson(const dsp::F0Cfg &c) {
  return {{"fmin", c.fmin}, {"fmax", c.fmax}, {"voicing_threshold", c.voicing_threshold}};
}

Json ToJson(const acoustic::ModelCfg &c) {
  return {{"vocab_size", c.vocab_size},
          {"d_model", c.d_model},
          {"n_enc_layers", c.n_enc_layers},
          {"n_dec_layers", c.n_dec_layers},
          {"n_heads", c.n_heads},
          {"ff_dim", c.ff_dim},
          {"n_mels", c.n_mels},
          {"speaker_embed_dim", c.speaker_embed_dim},
          {"max_speakers", c.max_speakers},
          {"dropout", c.dropout},
          {"pitch_mean", c.pitch_mean},
          {"pitch_std", c.pitch_std}};
}

Json ToJson(const trainer::TrainCfg &c) {
  return {{"base_lr", c.base_lr},
          {"weight_decay", c.weight_decay},
          {"warmup_steps", c.warmup_steps},
          {"max_steps", c.max_steps},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"checkpoint_every", c.checkpoint_every},
          {"grad_clip_norm", c.grad_clip_norm},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"loss_weights",
           {{"mel", c.loss_weights.mel},
            {"duration", c.loss_weights.duration},
            {"pitch", c.loss_weights.pitch},
            {"align", c.loss_weights.align}}}};
}

void FromJson(const Json &j, const std::string &path, dsp::MelCfg *c) {
  StrictObject o(j, path);
  o.Get("sample_rate", &c->sample_rate);
  o.Get("n_fft", &c->n_fft);
  o.Get("win_length", &c->win_length);
  o.Get("hop_length", &c->hop_length);
  o.Get("n_mels", &c->n_mels);
  o.Get("fmin", &c->fmin);
  o.Get("fmax", &c->fmax);
  o.Finish();
}

void FromJson(const Json &j, const std::string &path, dsp::F0Cfg *c) {
  StrictObject o(j, path);
  o.Get("fmin", &c->fmin);
  o.Get("fmax", &c->fmax);
  o.Get("voicing_threshold", &c->voicing_threshold);
  o.Finish();
}

void FromJson(const Json &j, const std::string &path, acoustic::ModelCfg *c) {
  StrictObject o(j, path);
  o.Get("vocab_size", &c->vocab_size);
  o.Get("d_model", &c->d_model);
  o.Get("n_enc_layers", &c->n_enc_layers);
  o.Get("n_dec_layers", &c->n_dec_layers);
  o.Get("n_heads", &c->n_heads);
  o.Get("ff_dim", &c->ff_dim);
  o.Get("n_mels", &c->n_mels);
  o.Get("speaker_embed_dim", &c->speaker_embed_dim);
  o.Get("max_speakers", &c->max_speakers);
  o.Get("dropout", &c->dropout);
  o.Get("pitch_mean", &c->pitch_mean);
  o.Get("pitch_std", &c->pitch_std);
  o.Finish();
}

void FromJson(const Json &j, const std::string &path, trainer::TrainCfg *c) {
  StrictObject o(j, path);
  o.Get("base_lr", &c->base_lr);
  o.Get("weight_decay", &c->weight_decay);
  o.Get("warmup_steps", &c->warmup_steps);
  o.Get("max_steps", &c->max_steps);
  o.Get("batch_size", &c->batch_size);
  o.Get("seed", &c->seed);
  o.Get("checkpoint_every", &c->checkpoint_every);
  o.Get("grad_clip_norm", &c->grad_clip_norm);
  o.Get("adam_beta1", &c->adam_beta1);
  o.Get("adam_beta2", &c->adam_beta2);
  o.Get("adam_eps", &c->adam_eps);
  if (const Json *w = o.Child("loss_weights")) {
    StrictObject lw(*w, o.Key("loss_weights"));
    lw.Get("mel", &c->loss_weights.mel);
    lw.Get("duration", &c->loss_weights.duration);
    lw.Get("pitch", &c->loss_weights.pitch);
    lw.Get("align", &c->loss_weights.align);
    lw.Finish();
  }
  o.Finish();
}

}  // namespace childtts
