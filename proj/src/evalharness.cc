// src/evalharness.cc

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


#include "childtts/evalharness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"

#include "childtts/subprocess.h"

namespace childtts::eval {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::string Fixed(double v, int digits) {
  char b[64];
  std::snprintf(b, sizeof(b), "%.*f", digits, v);
  return b;
}

std::string Full(double v) {
  char b[64];
  std::snprintf(b, sizeof(b), "%.17g", v);
  return b;
}

std::vector<std::string> Words(const std::string &raw) {
  std::string norm;
  try {
    norm = corpus::NormalizeText(raw);
  } catch (const Error &) {
    return {};
  }
  for (char &c : norm)
    if (c == ',' || c == '.' || c == '?') c = ' ';
  std::vector<std::string> w;
  std::istringstream in(norm);
  for (std::string t; in >> t;) w.push_back(t);
  return w;
}

}  // namespace

// ---- naturalness ----------------------------------------------------------

std::string MosReport::Format() const { return Fixed(mean, 2) + " ± " + Fixed(ci95, 2); }

MosReport AggregateMos(const std::vector<double> &scores) {
  Require(scores.size() >= 2, "MOS aggregation needs at least 2 scores, got " +
                                  std::to_string(scores.size()));
  for (double s : scores) Require(std::isfinite(s), "MOS aggregation: non-finite score");
  MosReport r;
  r.n = static_cast<int>(scores.size());
  r.scores = scores;
  r.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / r.n;
  double ss = 0.0;
  for (double s : scores) ss += (s - r.mean) * (s - r.mean);
  r.ci95 = 1.96 * std::sqrt(ss / (r.n - 1)) / std::sqrt(static_cast<double>(r.n));
  return r;
}

// ---- intelligibility ------------------------------------------------------

namespace {

UtteranceWer Align(const std::vector<std::string> &ref, const std::vector<std::string> &hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1), d[i - 1][j] + 1,
                          d[i][j - 1] + 1});
  UtteranceWer u;
  u.n_ref_words = static_cast<int>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++u.substitutions;
      --i, --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++u.deletions;
      --i;
    } else {
      ++u.insertions;
      --j;
    }
  }
  u.wer = 100.0 * (u.substitutions + u.insertions + u.deletions) / static_cast<double>(n);
  return u;
}

}  // namespace

WerReport Wer(const std::string &reference, const std::string &hypothesis) {
  return CorpusWer({{"", reference, hypothesis}});
}

WerReport CorpusWer(const std::vector<WerPair> &pairs) {
  Require(!pairs.empty(), "WER: no utterance pairs");
  WerReport r;
  for (const auto &p : pairs) {
    const auto ref = Words(p.reference);
    if (ref.empty()) Fail(ErrorKind::kInvalidArgument, "WER: empty reference for '" + p.id + "'");
    UtteranceWer u = Align(ref, Words(p.hypothesis));
    u.id = p.id;
    r.substitutions += u.substitutions;
    r.insertions += u.insertions;
    r.deletions += u.deletions;
    r.n_ref_words += u.n_ref_words;
    r.per_utterance.push_back(u);
  }
  r.wer = 100.0 * (r.substitutions + r.insertions + r.deletions) / r.n_ref_words;
  return r;
}

// ---- adapters -------------------------------------------------------------

namespace {

Json RunExternal(const std::vector<AdapterItem> &items, const AdapterSpec &spec,
                 const std::string &kind, const std::string &field) {
  if (spec.exchange_dir.empty()) Fail(ErrorKind::kValidation, kind + " adapter: no exchange directory");
  fs::create_directories(spec.exchange_dir);
  std::string batch;
  std::set<std::string> ids;
  for (const auto &it : items) {
    if (!ids.insert(it.id).second) Fail(ErrorKind::kInvalidArgument, kind + " adapter: duplicate id " + it.id);
    Json j{{"id", it.id}, {"wav", fs::absolute(it.wav).string()}};
    if (it.reference) j["reference"] = *it.reference;
    batch += j.dump() + "\n";
  }
  const fs::path result_path = spec.exchange_dir / "result.jsonl";
  fs::remove(result_path);
  WriteFileAtomic(spec.exchange_dir / "batch.jsonl", batch);
  const CommandResult r =
      RunCommand(ExpandCommand(spec.command, {{"dir", spec.exchange_dir.string()}}), spec.timeout_s);
  if (r.timed_out || r.exit_code != 0)
    Fail(ErrorKind::kRuntime, kind + " adapter failed: " + DescribeFailure(r, spec.timeout_s));
  if (!fs::exists(result_path))
    Fail(ErrorKind::kRuntime, kind + " adapter wrote no " + result_path.string());

  Json out = Json::object();
  std::istringstream in(ReadFileBytes(result_path));
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception &e) {
      Fail(ErrorKind::kRuntime, kind + " adapter result line " + std::to_string(line_no) +
                                    " is not JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
      Fail(ErrorKind::kRuntime, kind + " adapter result line " + std::to_string(line_no) + " has no id");
    const std::string id = j["id"];
    if (!ids.count(id)) Fail(ErrorKind::kRuntime, kind + " adapter returned unknown id " + id);
    if (!j.contains(field) && !j.contains("error"))
      Fail(ErrorKind::kRuntime, kind + " adapter result for " + id + " has neither '" + field +
                                    "' nor 'error'");
    out[id] = j;
  }
  std::vector<std::string> missing;
  for (const auto &id : ids)
    if (!out.contains(id)) missing.push_back(id);
  if (!missing.empty()) {
    std::string msg = kind + " adapter returned no result for";
    for (const auto &id : missing) msg += " " + id;
    Fail(ErrorKind::kRuntime, msg);
  }
  return out;
}

template <typename T, typename Convert, typename Fallback>
AdapterResults<T> Collect(const std::vector<AdapterItem> &items, const AdapterSpec &spec,
                          const std::string &kind, const std::string &field, Convert convert,
                          Fallback fallback) {
  AdapterResults<T> res;
  if (!spec.external()) {
    // Unreadable audio stays fatal; an item the built-in evaluator cannot
    // score becomes a failure record, as with an external adapter.
    for (const auto &it : items) {
      try {
        res.values[it.id] = fallback(it);
      } catch (const Error &e) {
        if (e.kind() == ErrorKind::kIo) throw;
        res.failures[it.id] = e.what();
      }
    }
    return res;
  }
  const Json out = RunExternal(items, spec, kind, field);
  for (const auto &it : items) {
    const Json &j = out.at(it.id);
    if (j.contains("error")) {
      res.failures[it.id] = j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
      continue;
    }
    try {
      res.values[it.id] = convert(j.at(field));
    } catch (const Json::exception &) {
      Fail(ErrorKind::kRuntime, kind + " adapter: bad '" + field + "' for " + it.id);
    }
  }
  return res;
}

}  // namespace

AdapterResults<double> RunMosAdapter(const std::vector<AdapterItem> &items, const AdapterSpec &spec) {
  return Collect<double>(
      items, spec, "MOS", "score",
      [](const Json &j) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) Fail(ErrorKind::kRuntime, "MOS adapter returned a non-finite score");
        return v;
      },
      [](const AdapterItem &it) { return BuiltinMos(dsp::ReadWav(it.wav)); });
}

AdapterResults<std::string> RunAsrAdapter(const std::vector<AdapterItem> &items,
                                          const AdapterSpec &spec) {
  return Collect<std::string>(
      items, spec, "ASR", "hypothesis", [](const Json &j) { return j.get<std::string>(); },
      [](const AdapterItem &it) {
        // Closed loop: without a recogniser the reference is echoed back.
        if (!it.reference) Fail(ErrorKind::kInvalidArgument, "ASR fallback needs a reference for " + it.id);
        return *it.reference;
      });
}

AdapterResults<std::vector<double>> RunEmbeddingAdapter(const std::vector<AdapterItem> &items,
                                                        const AdapterSpec &spec) {
  return Collect<std::vector<double>>(
      items, spec, "embedding", "embedding",
      [](const Json &j) { return j.get<std::vector<double>>(); },
      [](const AdapterItem &it) { return BuiltinEmbed(dsp::ReadWav(it.wav)); });
}

std::vector<AdapterItem> ItemsFromManifest(const corpus::CorpusManifest &m) {
  std::vector<AdapterItem> items;
  for (const auto &r : m.records) items.push_back({r.id, m.ResolveAudio(r), r.transcript});
  return items;
}

// ---- built-in evaluators --------------------------------------------------

namespace {

dsp::MelCfg EmbedMelCfg() {
  dsp::MelCfg c;
  c.sample_rate = 16000;
  c.n_fft = 512;
  c.win_length = 400;
  c.hop_length = 160;
  c.n_mels = 40;
  c.fmin = 0.0;
  c.fmax = 8000.0;
  return c;
}

double Quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

double BuiltinMos(const dsp::Waveform &w) {
  Require(!w.samples.empty() && w.sample_rate > 0, "MOS fallback: empty waveform");
  const dsp::MelCfg cfg = EmbedMelCfg();
  const dsp::Waveform x = w.sample_rate == cfg.sample_rate ? w : dsp::Resample(w, cfg.sample_rate);
  const dsp::MelSpectrogram mel = dsp::ComputeMelSpectrogram(x, cfg);
  const double floor = std::log(dsp::kLogFloor);
  double sum = 0.0;
  int n = 0;
  for (int t = 0; t < mel.NumFrames(); ++t) {
    const auto row = mel.values.row(t);
    if (row.maxCoeff() <= floor) continue;
    // Spectral flatness: geometric over arithmetic mean of band energies.
    const double log_geo = row.mean();
    const double arith = row.array().exp().mean();
    sum += std::exp(log_geo) / arith;
    ++n;
  }
  const double flatness = n > 0 ? sum / n : 1.0;
  return 1.0 + 4.0 * std::clamp(1.0 - flatness, 0.0, 1.0);
}

std::vector<double> BuiltinEmbed(const dsp::Waveform &w) {
  Require(w.sample_rate > 0 && w.DurationSeconds() >= 0.5,
          "speaker embedding needs at least 0.5 s of audio, got " + std::to_string(w.DurationSeconds()) + " s");
  const dsp::MelCfg cfg = EmbedMelCfg();
  const dsp::Waveform x = w.sample_rate == cfg.sample_rate ? w : dsp::Resample(w, cfg.sample_rate);
  const dsp::MelSpectrogram mel = dsp::ComputeMelSpectrogram(x, cfg);
  const dsp::PitchContour pc = dsp::ExtractF0(x, dsp::F0Cfg{}, cfg);
  const int T = mel.NumFrames();
  constexpr int kGroups = 8, kPer = 5;

  Matrix g(T, kGroups);
  for (int k = 0; k < kGroups; ++k) g.col(k) = mel.values.middleCols(k * kPer, kPer).rowwise().mean();
  std::vector<double> e(kBuiltinEmbeddingDim, 0.0);
  const Eigen::RowVectorXd gm = g.colwise().mean();
  for (int k = 0; k < kGroups; ++k) {
    e[k] = gm(k) - gm.mean();
    e[8 + k] = std::sqrt((g.col(k).array() - gm(k)).square().mean());
    double d = 0.0;
    for (int t = 1; t < T; ++t) d += std::abs(g(t, k) - g(t - 1, k));
    e[16 + k] = T > 1 ? d / (T - 1) : 0.0;
  }

  std::vector<double> lf0;
  for (size_t t = 0; t < pc.f0_hz.size(); ++t)
    if (pc.voiced[t] && pc.f0_hz[t] > 0.0) lf0.push_back(std::log2(pc.f0_hz[t] / 100.0));
  if (!lf0.empty()) {
    e[24] = Quantile(lf0, 0.5);
    e[25] = Quantile(lf0, 0.75) - Quantile(lf0, 0.25);
  }
  e[26] = pc.f0_hz.empty() ? 0.0 : static_cast<double>(lf0.size()) / pc.f0_hz.size();

  std::vector<double> energy(T);
  for (int t = 0; t < T; ++t) energy[t] = std::log(mel.values.row(t).array().exp().sum());
  const double emean = std::accumulate(energy.begin(), energy.end(), 0.0) / T;
  double ess = 0.0, edelta = 0.0;
  for (int t = 0; t < T; ++t) {
    ess += (energy[t] - emean) * (energy[t] - emean);
    if (t > 0) edelta += std::abs(energy[t] - energy[t - 1]);
  }
  const double emed = Quantile(energy, 0.5);
  e[27] = std::sqrt(ess / T);
  e[28] = Quantile(energy, 0.1) - emed;
  e[29] = Quantile(energy, 0.9) - emed;
  e[30] = T > 1 ? edelta / (T - 1) : 0.0;

  double centroid = 0.0;
  for (int t = 0; t < T; ++t) {
    const Eigen::ArrayXd p = mel.values.row(t).array().exp().transpose();
    centroid += (p * Eigen::ArrayXd::LinSpaced(cfg.n_mels, 0, cfg.n_mels - 1)).sum() / p.sum();
  }
  e[31] = centroid / T / cfg.n_mels;

  double norm = 0.0;
  for (double v : e) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) Fail(ErrorKind::kRuntime, "speaker embedding is degenerate");
  for (double &v : e) v /= norm;
  return e;
}

// ---- speaker similarity ---------------------------------------------------

void EmbeddingSet::Validate() const {
  Require(!vectors.empty(), "embedding set for '" + speaker + "' is empty");
  const size_t dim = vectors[0].size();
  Require(dim > 0, "embedding set for '" + speaker + "' has zero-dimensional vectors");
  for (const auto &v : vectors) {
    Require(v.size() == dim, "embedding set for '" + speaker + "' mixes dimensions " +
                                 std::to_string(dim) + " and " + std::to_string(v.size()));
    for (double x : v) Require(std::isfinite(x), "embedding set for '" + speaker + "' has non-finite values");
  }
}

std::vector<double> AverageEmbeddings(const EmbeddingSet &set) {
  set.Validate();
  const size_t dim = set.vectors[0].size();
  std::vector<double> mean(dim, 0.0);
  for (const auto &v : set.vectors)
    for (size_t i = 0; i < dim; ++i) mean[i] += v[i];
  double norm = 0.0;
  for (double &x : mean) {
    x /= static_cast<double>(set.vectors.size());
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm < 1e-12) Fail(ErrorKind::kInvalidArgument, "mean embedding of '" + set.speaker + "' has zero norm");
  for (double &x : mean) x /= norm;
  return mean;
}

double CosineSimilarity(const std::vector<double> &a, const std::vector<double> &b) {
  Require(a.size() == b.size(), "cosine similarity: dimension mismatch " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  Require(aa > 0.0 && bb > 0.0, "cosine similarity: zero vector");
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

SpeakerSimReport CrossSimilarity(const SpeakerVectors &set_a, const SpeakerVectors &set_b) {
  Require(!set_a.empty() && !set_b.empty(), "cross similarity: both sets must be non-empty");
  SpeakerSimReport r;
  for (const auto &[label, v] : set_a) r.row_labels.push_back(label);
  for (const auto &[label, v] : set_b) r.col_labels.push_back(label);
  r.matrix.resize(set_a.size(), set_b.size());
  int i = 0;
  for (const auto &[la, va] : set_a) {
    int j = 0;
    for (const auto &[lb, vb] : set_b) r.matrix(i, j++) = CosineSimilarity(va, vb);
    ++i;
  }
  r.summary = {r.matrix.minCoeff(), r.matrix.maxCoeff(), r.matrix.mean()};
  return r;
}

Matrix Project2d(const std::vector<std::vector<double>> &points) {
  Require(points.size() >= 3, "projection needs at least 3 points");
  const size_t dim = points[0].size();
  Require(dim >= 2, "projection needs at least 2 dimensions");
  Matrix x(points.size(), dim);
  for (size_t i = 0; i < points.size(); ++i) {
    Require(points[i].size() == dim, "projection: points have different dimensions");
    for (size_t k = 0; k < dim; ++k) x(i, k) = points[i][k];
  }
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::VectorXd &ev = es.eigenvalues();  // ascending
  const double top = ev(dim - 1);
  if (!(top > 0.0) || ev(dim - 2) <= 1e-12 * top)
    Fail(ErrorKind::kInvalidArgument, "projection: points span fewer than 2 dimensions");
  Eigen::MatrixXd basis(dim, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(dim - 1 - c);
    Eigen::Index arg = 0;
    for (Eigen::Index k = 1; k < v.size(); ++k)
      if (std::abs(v(k)) > std::abs(v(arg))) arg = k;
    if (v(arg) < 0) v = -v;
    basis.col(c) = v;
  }
  return x * basis;
}

// ---- sampling and reports -------------------------------------------------

std::vector<int> SampleIndices(int n, int k, uint64_t seed) {
  Require(n >= 0 && k >= 0, "sampling: negative size");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  const int take = std::min(n, k);
  for (int i = 0; i < take; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  return idx;
}

const std::vector<ReferenceMos> &ReferenceMosRows() {
  static const std::vector<ReferenceMos> rows = {
      {"Adult speech (Librispeech test_clean)", 3.78, 0.07},
      {"Original child speech (MyST)", 2.91, 0.07},
      {"Tacotron 2 based synthetic child speech", 2.60, 0.06},
      {"Fastpitch based synthetic child speech", 3.10, 0.12},
  };
  return rows;
}

const std::vector<ReferenceWer> &ReferenceWerRows() {
  static const std::vector<ReferenceWer> rows = {
      {"Adult speech (Librispeech test_clean)", 3.43},
      {"Original child speech (MyST)", 15.27},
      {"Tacotron 2 based synthetic child speech", 25.63},
      {"Fastpitch based synthetic child speech", 17.61},
  };
  return rows;
}

namespace {

// Published speaker-similarity ranges.
struct ReferenceSim {
  const char *pairs;
  double min, max;
  std::optional<double> mean;
};

const ReferenceSim kReferenceSim[] = {
    {"synthetic child vs real child", 0.63, 0.98, 0.77},
    {"child vs adult", 0.34, 0.53, std::nullopt},
};

std::string Csv(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

ReportFiles RenderReport(const ReportInputs &in, const fs::path &dir) {
  ReportFiles f{dir / "mos.csv",        dir / "wer.csv",        dir / "similarity_summary.csv",
                dir / "similarity.csv", dir / "projection.csv", dir / "summary.md"};
  std::string md = "# Evaluation report\n\n";
  md += "Utterances per set: at most " + std::to_string(in.sample_size) +
        ", sampled with seed " + std::to_string(in.sample_seed) + ".\n\n";

  std::string mos = "source,system,mos,ci95,n,display\n";
  md += "## Naturalness (MOS, 95% confidence interval)\n\n| System | MOS | n |\n|---|---|---|\n";
  for (const auto &row : in.mos) {
    mos += "measured," + Csv(row.system) + "," + Full(row.report.mean) + "," + Full(row.report.ci95) +
           "," + std::to_string(row.report.n) + "," + row.report.Format() + "\n";
    md += "| " + row.system + " | " + row.report.Format() + " | " + std::to_string(row.report.n) + " |\n";
  }
  for (const auto &ref : ReferenceMosRows()) {
    MosReport r;
    r.mean = ref.mean;
    r.ci95 = ref.ci95;
    mos += std::string("reference,") + Csv(ref.system) + "," + Fixed(ref.mean, 2) + "," +
           Fixed(ref.ci95, 2) + ",120," + r.Format() + "\n";
    md += std::string("| ") + ref.system + " (published) | " + r.Format() + " | 120 |\n";
  }
  WriteFileAtomic(f.mos_csv, mos);

  std::string wer = "source,system,wer,substitutions,insertions,deletions,n_ref_words\n";
  md += "\n## Intelligibility (WER %)\n\n| System | WER | S | I | D | words |\n|---|---|---|---|---|---|\n";
  for (const auto &row : in.wer) {
    const auto &r = row.report;
    wer += "measured," + Csv(row.system) + "," + Full(r.wer) + "," + std::to_string(r.substitutions) +
           "," + std::to_string(r.insertions) + "," + std::to_string(r.deletions) + "," +
           std::to_string(r.n_ref_words) + "\n";
    md += "| " + row.system + " | " + Fixed(r.wer, 2) + " | " + std::to_string(r.substitutions) +
          " | " + std::to_string(r.insertions) + " | " + std::to_string(r.deletions) + " | " +
          std::to_string(r.n_ref_words) + " |\n";
  }
  for (const auto &ref : ReferenceWerRows()) {
    wer += std::string("reference,") + Csv(ref.system) + "," + Fixed(ref.wer, 2) + ",,,,\n";
    md += std::string("| ") + ref.system + " (published) | " + Fixed(ref.wer, 2) + " | | | | |\n";
  }
  WriteFileAtomic(f.wer_csv, wer);

  std::string sum = "source,pairs,min,max,mean\n";
  std::string matrix = "set_a";
  md += "\n## Speaker similarity (cosine)\n\n";
  if (in.similarity) {
    const auto &s = *in.similarity;
    sum += "measured,all set A x set B pairs," + Full(s.summary.min) + "," + Full(s.summary.max) + "," +
           Full(s.summary.mean) + "\n";
    for (const auto &c : s.col_labels) matrix += "," + Csv(c);
    matrix += "\n";
    md += "| A \\ B |";
    for (const auto &c : s.col_labels) md += " " + c + " |";
    md += "\n|---|";
    for (size_t j = 0; j < s.col_labels.size(); ++j) md += "---|";
    md += "\n";
    for (size_t i = 0; i < s.row_labels.size(); ++i) {
      matrix += Csv(s.row_labels[i]);
      md += "| " + s.row_labels[i] + " |";
      for (size_t j = 0; j < s.col_labels.size(); ++j) {
        matrix += "," + Full(s.matrix(i, j));
        md += " " + Fixed(s.matrix(i, j), 3) + " |";
      }
      matrix += "\n";
      md += "\n";
    }
    md += "\nMeasured range " + Fixed(s.summary.min, 3) + " to " + Fixed(s.summary.max, 3) +
          ", mean " + Fixed(s.summary.mean, 3) + ".\n";
  } else {
    matrix += "\n";
    md += "Not computed.\n";
  }
  for (const auto &ref : kReferenceSim) {
    sum += std::string("reference,") + ref.pairs + "," + Fixed(ref.min, 2) + "," + Fixed(ref.max, 2) +
           "," + (ref.mean ? Fixed(*ref.mean, 2) : std::string()) + "\n";
    md += std::string("\nPublished range for ") + ref.pairs + ": " + Fixed(ref.min, 2) + " to " +
          Fixed(ref.max, 2) + (ref.mean ? ", mean " + Fixed(*ref.mean, 2) : std::string()) + ".";
  }
  md += "\n";
  WriteFileAtomic(f.similarity_summary_csv, sum);
  WriteFileAtomic(f.similarity_csv, matrix);

  std::string proj = "label,set,x,y\n";
  for (const auto &p : in.projection)
    proj += Csv(p.label) + "," + Csv(p.set) + "," + Full(p.x) + "," + Full(p.y) + "\n";
  WriteFileAtomic(f.projection_csv, proj);
  md += "\nProjection coordinates: projection.csv (" + std::to_string(in.projection.size()) + " points).\n";
  WriteFileAtomic(f.summary_md, md);
  return f;
}

}  // namespace childtts::eval
