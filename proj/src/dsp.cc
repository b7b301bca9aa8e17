// src/dsp.cc

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

#include "childtts/dsp.h"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numeric>
#include <random>

namespace childtts::dsp {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

constexpr double kPi = 3.14159265358979323846;

std::mutex &FftwPlannerMutex() {
  static std::mutex mu;
  return mu;
}

template <typename T>
void PutLe(std::string &out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T GetLe(std::string_view bytes, size_t &pos) {
  if (pos + sizeof(T) > bytes.size()) Fail(ErrorKind::kIo, "truncated binary block");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// WAV I/O

Waveform ReadWav(const std::filesystem::path &path) {
  const std::string bytes = ReadFileBytes(path);
  auto bad = [&path](const std::string &why) {
    Fail(ErrorKind::kIo, "corrupt WAV " + path.string() + ": " + why);
  };
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0)
    bad("missing RIFF/WAVE header");
  size_t pos = 12;
  bool have_fmt = false;
  Waveform w;
  while (pos + 8 <= bytes.size()) {
    std::string id = bytes.substr(pos, 4);
    pos += 4;
    uint32_t size = GetLe<uint32_t>(bytes, pos);
    if (pos + size > bytes.size()) bad("chunk '" + id + "' runs past end of file");
    if (id == "fmt ") {
      if (size < 16) bad("short fmt chunk");
      size_t p = pos;
      uint16_t format = GetLe<uint16_t>(bytes, p);
      uint16_t channels = GetLe<uint16_t>(bytes, p);
      uint32_t rate = GetLe<uint32_t>(bytes, p);
      p += 6;  // byte rate, block align
      uint16_t bits = GetLe<uint16_t>(bytes, p);
      if (format != 1 || channels != 1 || bits != 16)
        bad("only mono 16-bit PCM is supported");
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) bad("data chunk before fmt chunk");
      const size_t n = size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        int16_t s;
        std::memcpy(&s, bytes.data() + pos + 2 * i, 2);
        w.samples[i] = static_cast<float>(s) / 32768.0f;
      }
      return w;
    }
    pos += size + (size & 1);
  }
  bad("no data chunk");
  return w;
}

std::string EncodeWav(const Waveform &w) {
  Require(w.sample_rate > 0, "waveform has no sample rate");
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutLe<uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutLe<uint32_t>(out, 16);
  PutLe<uint16_t>(out, 1);
  PutLe<uint16_t>(out, 1);
  PutLe<uint32_t>(out, static_cast<uint32_t>(w.sample_rate));
  PutLe<uint32_t>(out, static_cast<uint32_t>(w.sample_rate) * 2);
  PutLe<uint16_t>(out, 2);
  PutLe<uint16_t>(out, 16);
  out += "data";
  PutLe<uint32_t>(out, data_bytes);
  for (float s : w.samples) {
    const long q = std::lround(static_cast<double>(s) * 32768.0);
    PutLe<int16_t>(out, static_cast<int16_t>(std::clamp(q, -32768L, 32767L)));
  }
  return out;
}

void WriteWav(const Waveform &w, const std::filesystem::path &path) {
  WriteFileAtomic(path, EncodeWav(w));
}

// ---------------------------------------------------------------------------
// Configuration and mel scale

void MelCfg::Validate() const {
  Require(sample_rate > 0, "MelCfg: sample_rate must be positive");
  Require(hop_length > 0 && hop_length <= win_length && win_length <= n_fft,
          "MelCfg: need 0 < hop_length <= win_length <= n_fft");
  Require(2 * hop_length <= n_fft, "MelCfg: hop_length must not exceed n_fft / 2");
  Require(n_mels > 0, "MelCfg: n_mels must be positive");
  Require(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0,
          "MelCfg: need 0 <= fmin < fmax <= sample_rate / 2");
}

int MelCfg::NumFrames(size_t num_samples) const {
  return static_cast<int>((num_samples + hop_length - 1) / hop_length);
}

namespace {
constexpr double kMelFSp = 200.0 / 3.0;
constexpr double kMinLogHz = 1000.0;
constexpr double kMinLogMel = kMinLogHz / kMelFSp;  // 15
const double kLogStep = std::log(6.4) / 27.0;
}  // namespace

double HzToMel(double hz) {
  if (hz < kMinLogHz) return hz / kMelFSp;
  return kMinLogMel + std::log(hz / kMinLogHz) / kLogStep;
}

double MelToHz(double mel) {
  if (mel < kMinLogMel) return mel * kMelFSp;
  return kMinLogHz * std::exp(kLogStep * (mel - kMinLogMel));
}

Matrix MelFilterbank(const MelCfg &cfg) {
  cfg.Validate();
  const int bins = cfg.NumBins();
  const double mel_lo = HzToMel(cfg.fmin), mel_hi = HzToMel(cfg.fmax);
  std::vector<double> hz(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    hz[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));
  Matrix fb = Matrix::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = hz[m], center = hz[m + 1], hi = hz[m + 2];
    const double norm = 2.0 / (hi - lo);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      double up = (f - lo) / (center - lo);
      double down = (hi - f) / (hi - center);
      fb(m, k) = std::max(0.0, std::min(up, down)) * norm;
    }
  }
  return fb;
}

std::vector<double> AnalysisWindow(const MelCfg &cfg) {
  std::vector<double> w(cfg.n_fft, 0.0);
  const int offset = (cfg.n_fft - cfg.win_length) / 2;
  for (int i = 0; i < cfg.win_length; ++i)
    w[offset + i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / cfg.win_length);
  return w;
}

// ---------------------------------------------------------------------------
// FFT

RealFft::RealFft(int n) : n_(n) {
  Require(n >= 2, "FFT size must be at least 2");
  std::lock_guard<std::mutex> lock(FftwPlannerMutex());
  real_ = fftw_alloc_real(n);
  fftw_complex *c = fftw_alloc_complex(n / 2 + 1);
  complex_ = c;
  forward_ = fftw_plan_dft_r2c_1d(n, real_, c, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(n, c, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(FftwPlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
  fftw_free(real_);
  fftw_free(complex_);
}

void RealFft::Forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.begin() + n_, real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  const auto *c = static_cast<const fftw_complex *>(complex_);
  for (int k = 0; k <= n_ / 2; ++k) out[k] = {c[k][0], c[k][1]};
}

void RealFft::Inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  auto *c = static_cast<fftw_complex *>(complex_);
  for (int k = 0; k <= n_ / 2; ++k) {
    c[k][0] = in[k].real();
    c[k][1] = in[k].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inverse_));
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = real_[i] * scale;
}

// ---------------------------------------------------------------------------
// STFT on the zero-padded domain.  The padded signal has (T-1)*hop + n_fft
// samples, with the original signal starting at n_fft/2.

namespace {

size_t PaddedLength(int num_frames, const MelCfg &cfg) {
  return static_cast<size_t>(num_frames - 1) * cfg.hop_length + cfg.n_fft;
}

ComplexFrames FramesOfPadded(std::span<const double> padded, int num_frames,
                             const MelCfg &cfg, RealFft &fft,
                             const std::vector<double> &window) {
  ComplexFrames frames(num_frames, std::vector<std::complex<double>>(cfg.NumBins()));
  std::vector<double> buf(cfg.n_fft);
  for (int t = 0; t < num_frames; ++t) {
    const size_t start = static_cast<size_t>(t) * cfg.hop_length;
    for (int i = 0; i < cfg.n_fft; ++i) buf[i] = padded[start + i] * window[i];
    fft.Forward(buf, frames[t]);
  }
  return frames;
}

// Least-squares signal whose STFT is closest to `frames`.
std::vector<double> OverlapAddLs(const ComplexFrames &frames, const MelCfg &cfg,
                                 RealFft &fft, const std::vector<double> &window) {
  const int num_frames = static_cast<int>(frames.size());
  const size_t len = PaddedLength(num_frames, cfg);
  std::vector<double> num(len, 0.0), den(len, 0.0), buf(cfg.n_fft);
  for (int t = 0; t < num_frames; ++t) {
    fft.Inverse(frames[t], buf);
    const size_t start = static_cast<size_t>(t) * cfg.hop_length;
    for (int i = 0; i < cfg.n_fft; ++i) {
      num[start + i] += window[i] * buf[i];
      den[start + i] += window[i] * window[i];
    }
  }
  for (size_t i = 0; i < len; ++i) num[i] = den[i] > 1e-12 ? num[i] / den[i] : 0.0;
  return num;
}

// Weighted squared norm over the two-sided spectrum of a real signal.
double BinWeight(int k, int n_fft) {
  return (k == 0 || (n_fft % 2 == 0 && k == n_fft / 2)) ? 1.0 : 2.0;
}

}  // namespace

ComplexFrames Stft(std::span<const float> samples, const MelCfg &cfg) {
  cfg.Validate();
  const int num_frames = cfg.NumFrames(samples.size());
  Require(num_frames > 0, "STFT of an empty signal");
  std::vector<double> padded(PaddedLength(num_frames, cfg), 0.0);
  for (size_t i = 0; i < samples.size(); ++i) padded[cfg.n_fft / 2 + i] = samples[i];
  RealFft fft(cfg.n_fft);
  return FramesOfPadded(padded, num_frames, cfg, fft, AnalysisWindow(cfg));
}

std::vector<double> Istft(const ComplexFrames &frames, const MelCfg &cfg) {
  cfg.Validate();
  RealFft fft(cfg.n_fft);
  std::vector<double> padded = OverlapAddLs(frames, cfg, fft, AnalysisWindow(cfg));
  const size_t n = frames.size() * static_cast<size_t>(cfg.hop_length);
  return {padded.begin() + cfg.n_fft / 2, padded.begin() + cfg.n_fft / 2 + n};
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

constexpr double kKaiserBeta = 8.6;
constexpr int kZeroCrossings = 32;
constexpr double kRolloff = 0.97;

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

Waveform Resample(const Waveform &w, int target_sr) {
  auto supported = [](int sr) { return sr == 16000 || sr == 22050 || sr == 24000; };
  if (!supported(w.sample_rate) || !supported(target_sr))
    Fail(ErrorKind::kInvalidArgument, "unsupported resampling pair " +
                                          std::to_string(w.sample_rate) + " -> " +
                                          std::to_string(target_sr));
  if (target_sr == w.sample_rate) return w;

  const int64_t src = w.sample_rate, tgt = target_sr;
  const int64_t g = std::gcd(src, tgt);
  const int64_t up = tgt / g, down = src / g;
  const double cutoff = kRolloff * std::min(1.0, static_cast<double>(tgt) / src);
  const double half_width = kZeroCrossings / cutoff;  // in input samples
  const int taps_each_side = static_cast<int>(std::ceil(half_width));
  const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);

  // One filter per output phase p: weight for input index k0 + j, where the
  // output position is k0 + p / up.
  std::vector<std::vector<double>> phases(up);
  for (int64_t p = 0; p < up; ++p) {
    auto &taps = phases[p];
    taps.resize(2 * taps_each_side);
    const double frac = static_cast<double>(p) / up;
    for (int j = -taps_each_side + 1; j <= taps_each_side; ++j) {
      const double u = frac - j;
      double v = 0.0;
      if (std::abs(u) <= half_width) {
        const double r = u / half_width;
        const double win = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta;
        v = cutoff * Sinc(cutoff * u) * win;
      }
      taps[j + taps_each_side - 1] = v;
    }
  }

  const int64_t n_in = static_cast<int64_t>(w.samples.size());
  const int64_t n_out = (n_in * tgt + src / 2) / src;
  Waveform out;
  out.sample_rate = target_sr;
  out.samples.resize(static_cast<size_t>(n_out));
  for (int64_t n = 0; n < n_out; ++n) {
    const int64_t pos = n * down;
    const int64_t k0 = pos / up;
    const auto &taps = phases[pos % up];
    double acc = 0.0;
    for (int j = -taps_each_side + 1; j <= taps_each_side; ++j) {
      const int64_t k = k0 + j;
      if (k < 0 || k >= n_in) continue;
      acc += taps[j + taps_each_side - 1] * w.samples[k];
    }
    out.samples[n] = static_cast<float>(std::clamp(acc, -1.0, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mel spectrogram

MelSpectrogram ComputeMelSpectrogram(const Waveform &w, const MelCfg &cfg) {
  cfg.Validate();
  if (w.sample_rate != cfg.sample_rate)
    Fail(ErrorKind::kInvalidArgument, "waveform rate " + std::to_string(w.sample_rate) +
                                          " does not match MelCfg rate " +
                                          std::to_string(cfg.sample_rate));
  if (w.samples.size() < static_cast<size_t>(cfg.win_length))
    Fail(ErrorKind::kInvalidArgument, "waveform shorter than one analysis window");
  const ComplexFrames frames = Stft(w.samples, cfg);
  const Matrix fb = MelFilterbank(cfg);
  const int bins = cfg.NumBins();
  Matrix power(static_cast<Eigen::Index>(frames.size()), bins);
  for (size_t t = 0; t < frames.size(); ++t)
    for (int k = 0; k < bins; ++k) power(t, k) = std::norm(frames[t][k]);
  MelSpectrogram out;
  out.cfg = cfg;
  out.values = power * fb.transpose();
  out.values = out.values.unaryExpr(
      [](double v) { return std::log(std::max(v, kLogFloor)); });
  return out;
}

// ---------------------------------------------------------------------------
// F0

PitchContour ExtractF0(const Waveform &w, const F0Cfg &f0, const MelCfg &cfg) {
  cfg.Validate();
  Require(w.sample_rate == cfg.sample_rate, "ExtractF0: waveform/MelCfg rate mismatch");
  Require(f0.fmin >= 50.0, "ExtractF0: fmin_search must be >= 50 Hz");
  Require(f0.fmax <= w.sample_rate / 4.0, "ExtractF0: fmax_search must be <= sample_rate / 4");
  Require(f0.fmin < f0.fmax, "ExtractF0: need fmin < fmax");
  Require(!w.samples.empty(), "ExtractF0: empty waveform");

  const int sr = w.sample_rate;
  const int min_lag = std::max(2, static_cast<int>(std::floor(sr / f0.fmax)));
  const int max_lag = static_cast<int>(std::ceil(sr / f0.fmin));
  const int win = 3 * max_lag;
  int nfft = 1;
  while (nfft < 2 * win) nfft *= 2;
  RealFft fft(nfft);

  const int num_frames = cfg.NumFrames(w.samples.size());
  PitchContour pc;
  pc.f0_hz.assign(num_frames, 0.0);
  pc.voiced.assign(num_frames, false);

  std::vector<double> seg(nfft), acf(nfft), prefix(win + 1);
  std::vector<std::complex<double>> spec(nfft / 2 + 1);
  std::vector<double> r(max_lag + 2, 0.0);
  const int64_t n = static_cast<int64_t>(w.samples.size());
  for (int t = 0; t < num_frames; ++t) {
    const int64_t start = static_cast<int64_t>(t) * cfg.hop_length - win / 2;
    std::fill(seg.begin(), seg.end(), 0.0);
    double energy = 0.0;
    for (int i = 0; i < win; ++i) {
      const int64_t k = start + i;
      seg[i] = (k >= 0 && k < n) ? w.samples[k] : 0.0;
      energy += seg[i] * seg[i];
      prefix[i + 1] = energy;
    }
    if (energy < 1e-10) continue;
    fft.Forward(seg, spec);
    for (auto &c : spec) c = std::norm(c);
    fft.Inverse(spec, acf);
    for (int lag = min_lag - 1; lag <= max_lag + 1 && lag < win; ++lag) {
      const double e1 = prefix[win - lag];                // seg[0 .. win-lag)
      const double e2 = prefix[win] - prefix[lag];        // seg[lag .. win)
      r[lag] = (e1 > 0.0 && e2 > 0.0) ? acf[lag] / std::sqrt(e1 * e2) : 0.0;
    }
    double best = -1.0;
    for (int lag = min_lag; lag <= max_lag; ++lag)
      if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1]) best = std::max(best, r[lag]);
    if (best < f0.voicing_threshold) continue;
    int chosen = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= 0.9 * best) {
        chosen = lag;
        break;
      }
    }
    const double a = r[chosen - 1], b = r[chosen], c = r[chosen + 1];
    const double denom = a - 2.0 * b + c;
    double offset = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double hz = sr / (chosen + offset);
    if (hz < f0.fmin || hz > f0.fmax) continue;
    pc.f0_hz[t] = hz;
    pc.voiced[t] = true;
  }
  return pc;
}

std::vector<double> AveragePitchPerToken(const PitchContour &pc,
                                         std::span<const int> durations) {
  int64_t total = 0;
  for (int d : durations) {
    Require(d >= 0, "negative token duration");
    total += d;
  }
  if (total != static_cast<int64_t>(pc.f0_hz.size()))
    Fail(ErrorKind::kInvalidArgument,
         "duration/frame mismatch: durations sum to " + std::to_string(total) +
             " but the contour has " + std::to_string(pc.f0_hz.size()) + " frames");
  std::vector<double> out(durations.size(), 0.0);
  size_t frame = 0;
  for (size_t tok = 0; tok < durations.size(); ++tok) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < durations[tok]; ++i, ++frame) {
      if (pc.voiced[frame]) {
        sum += pc.f0_hz[frame];
        ++count;
      }
    }
    out[tok] = count > 0 ? sum / count : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Griffin-Lim

GriffinLimResult GriffinLim(const MelSpectrogram &m, int iterations, uint64_t seed) {
  const MelCfg &cfg = m.cfg;
  cfg.Validate();
  Require(iterations >= 1, "Griffin-Lim needs at least one iteration");
  if (cfg.n_mels > cfg.NumBins())
    Fail(ErrorKind::kInvalidArgument, "non-invertible MelCfg: n_mels > n_fft/2+1");
  const int num_frames = m.NumFrames();
  Require(num_frames > 0, "Griffin-Lim of an empty spectrogram");
  const int bins = cfg.NumBins();

  const Matrix fb = MelFilterbank(cfg);
  const Matrix pinv = fb.completeOrthogonalDecomposition().pseudoInverse();  // [bins x mels]
  Matrix mel_power = m.values.unaryExpr([](double v) {
    const double p = std::exp(v);
    return p <= kLogFloor * (1.0 + 1e-9) ? 0.0 : p;
  });
  Matrix target = (mel_power * pinv.transpose()).unaryExpr([](double v) {
    return std::sqrt(std::max(v, 0.0));
  });  // [frames x bins]

  double target_norm = 0.0;
  for (int t = 0; t < num_frames; ++t)
    for (int k = 0; k < bins; ++k)
      target_norm += BinWeight(k, cfg.n_fft) * target(t, k) * target(t, k);
  target_norm = std::sqrt(target_norm);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  ComplexFrames spec(num_frames, std::vector<std::complex<double>>(bins));
  for (int t = 0; t < num_frames; ++t)
    for (int k = 0; k < bins; ++k) spec[t][k] = std::polar(target(t, k), angle(rng));

  RealFft fft(cfg.n_fft);
  const std::vector<double> window = AnalysisWindow(cfg);
  GriffinLimResult result;
  std::vector<double> signal;
  for (int it = 0; it < iterations; ++it) {
    signal = OverlapAddLs(spec, cfg, fft, window);
    ComplexFrames rebuilt = FramesOfPadded(signal, num_frames, cfg, fft, window);
    double err = 0.0;
    for (int t = 0; t < num_frames; ++t) {
      for (int k = 0; k < bins; ++k) {
        const std::complex<double> y = rebuilt[t][k];
        const double mag = std::abs(y);
        const double d = mag - target(t, k);
        err += BinWeight(k, cfg.n_fft) * d * d;
        spec[t][k] = mag > 0.0 ? y * (target(t, k) / mag) : std::complex<double>(target(t, k), 0.0);
      }
    }
    result.spectral_convergence.push_back(target_norm > 0.0 ? std::sqrt(err) / target_norm
                                                            : std::sqrt(err));
  }

  const size_t n = static_cast<size_t>(num_frames) * cfg.hop_length;
  result.waveform.sample_rate = cfg.sample_rate;
  result.waveform.samples.resize(n);
  for (size_t i = 0; i < n; ++i)
    result.waveform.samples[i] =
        static_cast<float>(std::clamp(signal[cfg.n_fft / 2 + i], -1.0, 1.0));
  return result;
}

// ---------------------------------------------------------------------------
// Mel block

std::string EncodeMelBlock(const MelSpectrogram &m) {
  std::string out = "MELB";
  PutLe<uint32_t>(out, static_cast<uint32_t>(m.values.rows()));
  PutLe<uint32_t>(out, static_cast<uint32_t>(m.values.cols()));
  PutLe<uint32_t>(out, static_cast<uint32_t>(m.cfg.sample_rate));
  PutLe<uint32_t>(out, static_cast<uint32_t>(m.cfg.n_fft));
  PutLe<uint32_t>(out, static_cast<uint32_t>(m.cfg.win_length));
  PutLe<uint32_t>(out, static_cast<uint32_t>(m.cfg.hop_length));
  PutLe<float>(out, static_cast<float>(m.cfg.fmin));
  PutLe<float>(out, static_cast<float>(m.cfg.fmax));
  for (Eigen::Index r = 0; r < m.values.rows(); ++r)
    for (Eigen::Index c = 0; c < m.values.cols(); ++c)
      PutLe<float>(out, static_cast<float>(m.values(r, c)));
  return out;
}

MelSpectrogram DecodeMelBlock(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "MELB")
    Fail(ErrorKind::kIo, "not a mel block (bad magic)");
  size_t pos = 4;
  MelSpectrogram m;
  const uint32_t frames = GetLe<uint32_t>(bytes, pos);
  const uint32_t mels = GetLe<uint32_t>(bytes, pos);
  m.cfg.n_mels = static_cast<int>(mels);
  m.cfg.sample_rate = static_cast<int>(GetLe<uint32_t>(bytes, pos));
  m.cfg.n_fft = static_cast<int>(GetLe<uint32_t>(bytes, pos));
  m.cfg.win_length = static_cast<int>(GetLe<uint32_t>(bytes, pos));
  m.cfg.hop_length = static_cast<int>(GetLe<uint32_t>(bytes, pos));
  m.cfg.fmin = GetLe<float>(bytes, pos);
  m.cfg.fmax = GetLe<float>(bytes, pos);
  if (bytes.size() - pos != static_cast<size_t>(frames) * mels * sizeof(float))
    Fail(ErrorKind::kIo, "mel block payload size does not match its header");
  m.values.resize(frames, mels);
  for (uint32_t r = 0; r < frames; ++r)
    for (uint32_t c = 0; c < mels; ++c) m.values(r, c) = GetLe<float>(bytes, pos);
  return m;
}

}  // namespace childtts::dsp
