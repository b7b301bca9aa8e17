// childtts/dsp.h

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

#ifndef CHILDTTS_DSP_H_
#define CHILDTTS_DSP_H_

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "childtts/common.h"

namespace childtts::dsp {

struct Waveform {
  std::vector<float> samples;
  int sample_rate = 0;

  double DurationSeconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Mono 16-bit PCM only.  Samples are scaled by 1/32768 on read; on write
// they are scaled by 32768, rounded and clipped to [-32768, 32767], so a
// read/write cycle reproduces the file.
Waveform ReadWav(const std::filesystem::path &path);
std::string EncodeWav(const Waveform &w);
void WriteWav(const Waveform &w, const std::filesystem::path &path);

/// Analysis parameters shared by the mel, F0 and duration frame grids.
struct MelCfg {
  int sample_rate = 22050;
  int n_fft = 1024;
  int win_length = 1024;
  int hop_length = 256;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;

  void Validate() const;
  // Frames covering `num_samples` with centered frames: ceil(n / hop).
  int NumFrames(size_t num_samples) const;
  int NumBins() const { return n_fft / 2 + 1; }
  bool operator==(const MelCfg &) const = default;
};

struct MelSpectrogram {
  Matrix values;  // [n_frames x n_mels], natural-log energies
  MelCfg cfg;

  int NumFrames() const { return static_cast<int>(values.rows()); }
};

inline constexpr double kLogFloor = 1e-5;

// Slaney-style mel scale: linear below 1 kHz (200/3 Hz per mel), logarithmic
// above with 27 mels per factor 6.4.
double HzToMel(double hz);
double MelToHz(double mel);

/// Triangular filters, one per mel band, over the rfft bins.  Band m spans
/// the mel points m..m+2 of n_mels+2 equally spaced points between
/// HzToMel(fmin) and HzToMel(fmax); its weight at bin frequency f is
///   max(0, min((f - f_m) / (f_{m+1} - f_m), (f_{m+2} - f) / (f_{m+2} - f_{m+1})))
/// scaled by 2 / (f_{m+2} - f_m) so every filter has unit area in Hz.
Matrix MelFilterbank(const MelCfg &cfg);  // [n_mels x n_bins]

// Periodic Hann window of win_length samples, zero-padded to n_fft and
// centered.
std::vector<double> AnalysisWindow(const MelCfg &cfg);

// Real FFT of any length, backed by FFTW.  Not safe to share across threads.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  int size() const { return n_; }
  // in: n reals -> out: n/2+1 bins
  void Forward(std::span<const double> in, std::span<std::complex<double>> out);
  // in: n/2+1 bins -> out: n reals, scaled by 1/n (true inverse)
  void Inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  int n_;
  double *real_ = nullptr;
  void *complex_ = nullptr;
  void *forward_ = nullptr;
  void *inverse_ = nullptr;
};

using ComplexFrames = std::vector<std::vector<std::complex<double>>>;

// Centered STFT with zero padding of n_fft/2 on the left; frame t starts at
// padded sample t * hop.  Produces cfg.NumFrames(len) frames.
ComplexFrames Stft(std::span<const float> samples, const MelCfg &cfg);
// Least-squares inverse of Stft, trimmed to n_frames * hop samples.
std::vector<double> Istft(const ComplexFrames &frames, const MelCfg &cfg);

/// Windowed-sinc resampler.  Kaiser window (beta 8.6) over 32 zero crossings
/// of the low-pass kernel, cutoff 0.97 of the lower Nyquist rate.  Output
/// length is round(len * target / source); samples are clipped to [-1, 1].
Waveform Resample(const Waveform &w, int target_sr);

/// log(max(mel_power, 1e-5)) where mel_power = filterbank * |STFT|^2.
MelSpectrogram ComputeMelSpectrogram(const Waveform &w, const MelCfg &cfg);

struct PitchContour {
  std::vector<double> f0_hz;  // 0 where unvoiced
  std::vector<bool> voiced;
};

struct F0Cfg {
  double fmin = 60.0;
  double fmax = 600.0;
  // Voicing decision on the peak normalized autocorrelation.
  double voicing_threshold = 0.3;
};

/// Normalized-autocorrelation F0 tracker on the mel frame grid of `cfg`.
/// Each frame analyses 3 * ceil(sr / fmin) samples centered on t * hop.
/// The pitch period is the smallest-lag local maximum of the normalized
/// autocorrelation whose value is within 10% of the best local maximum in
/// [sr / fmax, sr / fmin], refined by parabolic interpolation.  A frame is
/// voiced when that best maximum is at least voicing_threshold and the
/// refined estimate lies in [fmin, fmax].
PitchContour ExtractF0(const Waveform &w, const F0Cfg &f0, const MelCfg &cfg);

// Mean f0 over the voiced frames of each token's span, 0 for spans without
// voiced frames.  sum(durations) must equal the number of frames.
std::vector<double> AveragePitchPerToken(const PitchContour &pc,
                                         std::span<const int> durations);

struct GriffinLimResult {
  Waveform waveform;
  // Spectral convergence || |STFT(x_i)| - S ||_F / ||S||_F after each
  // iteration i (norms over the full two-sided spectrum).
  std::vector<double> spectral_convergence;
};

/// Maps log-mel energies back to a linear magnitude estimate through the
/// filterbank pseudo-inverse (energies at or below the log floor map to 0),
/// then runs Griffin-Lim from a seeded random phase.  Output length is
/// n_frames * hop.
GriffinLimResult GriffinLim(const MelSpectrogram &m, int iterations, uint64_t seed);

// Little-endian mel block:
//   char[4] "MELB"; u32 n_frames; u32 n_mels; u32 sample_rate; u32 n_fft;
//   u32 win_length; u32 hop_length; f32 fmin; f32 fmax;
//   f32 values[n_frames * n_mels]  (row-major)
std::string EncodeMelBlock(const MelSpectrogram &m);
MelSpectrogram DecodeMelBlock(std::string_view bytes);

}  // namespace childtts::dsp

#endif  // CHILDTTS_DSP_H_
