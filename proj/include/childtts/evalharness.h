// childtts/evalharness.h

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


#ifndef CHILDTTS_EVALHARNESS_H_
#define CHILDTTS_EVALHARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "childtts/common.h"
#include "childtts/corpus.h"
#include "childtts/dsp.h"

namespace childtts::eval {

// ---- naturalness ----------------------------------------------------------

struct MosReport {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * sd / sqrt(n), sd with n-1 denominator
  int n = 0;
  std::vector<double> scores;

  std::string Format() const;  // "3.10 ± 0.12"
};

MosReport AggregateMos(const std::vector<double> &scores);

// ---- intelligibility ------------------------------------------------------

struct UtteranceWer {
  std::string id;
  int substitutions = 0, insertions = 0, deletions = 0, n_ref_words = 0;
  double wer = 0.0;  // percent
};

struct WerReport {
  double wer = 0.0;  // 100 * (S + I + D) / n_ref_words
  int substitutions = 0, insertions = 0, deletions = 0, n_ref_words = 0;
  std::vector<UtteranceWer> per_utterance;
};

/// Both sides go through corpus::NormalizeText (a hypothesis without
/// letters counts as empty), lose the punctuation marks , . ? and are
/// split on whitespace.  Counts come from
/// a unit-cost edit-distance alignment; among equal-cost alignments the
/// backtrace prefers match/substitution, then deletion, then insertion.
WerReport Wer(const std::string &reference, const std::string &hypothesis);

struct WerPair {
  std::string id;
  std::string reference;
  std::string hypothesis;
};

// Pools S, I, D and reference words over all pairs.
WerReport CorpusWer(const std::vector<WerPair> &pairs);

// ---- adapters -------------------------------------------------------------

/// External evaluator.  The harness writes `<exchange_dir>/batch.jsonl`
/// with one {"id", "wav", "reference"?} object per item, runs the command
/// (placeholder {dir}) and reads `<exchange_dir>/result.jsonl`, one
/// {"id", <field>} or {"id", "error": text} object per item.  An empty
/// command selects the built-in fallback; items it cannot score (e.g.
/// audio too short to embed) are reported as failures.
struct AdapterSpec {
  std::string command;
  std::filesystem::path exchange_dir;
  double timeout_s = 600.0;

  bool external() const { return !command.empty(); }
  bool operator==(const AdapterSpec &) const = default;
};

struct AdapterItem {
  std::string id;
  std::filesystem::path wav;
  std::optional<std::string> reference;
};

template <typename T>
struct AdapterResults {
  std::map<std::string, T> values;
  std::map<std::string, std::string> failures;  // id -> adapter error text
};

AdapterResults<double> RunMosAdapter(const std::vector<AdapterItem> &items, const AdapterSpec &spec);
AdapterResults<std::string> RunAsrAdapter(const std::vector<AdapterItem> &items,
                                          const AdapterSpec &spec);
AdapterResults<std::vector<double>> RunEmbeddingAdapter(const std::vector<AdapterItem> &items,
                                                        const AdapterSpec &spec);

// Items for every record of a manifest, references taken from the transcripts.
std::vector<AdapterItem> ItemsFromManifest(const corpus::CorpusManifest &m);

// Fallback naturalness score in [1, 5]: 1 + 4 * (1 - mean spectral
// flatness) over frames above the log floor.  Not a perceptual model.
double BuiltinMos(const dsp::Waveform &w);

inline constexpr int kBuiltinEmbeddingDim = 32;

/// Fallback speaker embedding.  Audio is resampled to 16 kHz and analysed
/// with 40 log-mel bands (n_fft 512, hop 160) and the F0 tracker.  With the
/// bands in 8 groups of 5 and g_k the per-frame mean of group k:
///   [0..7]   time mean of g_k minus the mean over the 8 groups
///   [8..15]  time standard deviation of g_k
///   [16..23] mean |g_k(t) - g_k(t-1)|
///   [24]     log2(median voiced F0 / 100 Hz)   (0 without voiced frames)
///   [25]     inter-quartile range of log2 F0    (0 without voiced frames)
///   [26]     voiced fraction
///   [27..30] frame log energy: std, p10 - median, p90 - median, mean |delta|
///   [31]     mean spectral centroid in band units / 40
/// then L2-normalised.  Needs at least 0.5 s of audio.
std::vector<double> BuiltinEmbed(const dsp::Waveform &w);

// ---- speaker similarity ---------------------------------------------------

struct EmbeddingSet {
  std::vector<std::vector<double>> vectors;
  std::string speaker;
  std::string encoder_tag;

  void Validate() const;  // non-empty, equal dims, finite
};

// Mean of the vectors, L2-normalised.  A zero mean is an error.
std::vector<double> AverageEmbeddings(const EmbeddingSet &set);

double CosineSimilarity(const std::vector<double> &a, const std::vector<double> &b);

struct SimilaritySummary {
  double min = 0.0, max = 0.0, mean = 0.0;
};

struct SpeakerSimReport {
  std::vector<std::string> row_labels;  // set A, sorted
  std::vector<std::string> col_labels;  // set B, sorted
  Matrix matrix;                        // [A x B] cosine similarities
  SimilaritySummary summary;            // over all cells
};

using SpeakerVectors = std::map<std::string, std::vector<double>>;

SpeakerSimReport CrossSimilarity(const SpeakerVectors &set_a, const SpeakerVectors &set_b);

/// Projection on the top two principal components of the centred points.
/// Each component's sign makes its largest-magnitude loading positive
/// (first such index on ties).  Fails when the points span fewer than two
/// dimensions.
Matrix Project2d(const std::vector<std::vector<double>> &points);

// ---- sampling and reports -------------------------------------------------

/// min(k, n) distinct indices drawn with mt19937_64(seed), returned sorted.
std::vector<int> SampleIndices(int n, int k, uint64_t seed);

struct MosRow {
  std::string system;
  MosReport report;
};

struct WerRow {
  std::string system;
  WerReport report;
};

struct ProjectionPoint {
  std::string label;
  std::string set;
  double x = 0.0, y = 0.0;
};

struct ReportInputs {
  std::vector<MosRow> mos;
  std::vector<WerRow> wer;
  std::optional<SpeakerSimReport> similarity;
  std::vector<ProjectionPoint> projection;
  uint64_t sample_seed = 0;
  int sample_size = 0;
};

struct ReferenceMos {
  const char *system;
  double mean, ci95;
};

struct ReferenceWer {
  const char *system;
  double wer;
};

// Published reference rows, shown next to measured values.
const std::vector<ReferenceMos> &ReferenceMosRows();
const std::vector<ReferenceWer> &ReferenceWerRows();

struct ReportFiles {
  std::filesystem::path mos_csv, wer_csv, similarity_summary_csv;  // tables
  std::filesystem::path similarity_csv, projection_csv;            // plot data
  std::filesystem::path summary_md;
};

/// Writes into `<dir>/`: mos.csv, wer.csv, similarity_summary.csv,
/// similarity.csv (matrix), projection.csv and summary.md.
ReportFiles RenderReport(const ReportInputs &in, const std::filesystem::path &dir);

}  // namespace childtts::eval

#endif  // CHILDTTS_EVALHARNESS_H_
