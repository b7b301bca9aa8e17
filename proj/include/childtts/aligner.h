// childtts/aligner.h

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

#ifndef CHILDTTS_ALIGNER_H_
#define CHILDTTS_ALIGNER_H_

#include <vector>

#include "childtts/common.h"

// Unsupervised token-to-frame alignment.  A monotonic path assigns every
// mel frame to one token; it starts on token 0, ends on the last token and
// advances by at most one token per frame.

namespace childtts::aligner {

struct AlignmentPosterior {
  Matrix probs;  // [n_tokens x n_frames], each column sums to one

  int NumTokens() const { return static_cast<int>(probs.rows()); }
  int NumFrames() const { return static_cast<int>(probs.cols()); }
};

struct MonotonicPath {
  std::vector<int> token_index_per_frame;
};

struct DurationTargets {
  std::vector<int> durations;

  int TotalFrames() const;
};

// Column-wise log-softmax over tokens.
Matrix LogSoftmaxOverTokens(const Matrix &logits);

// Alignment logits -||key_i - query_j||^2 / sqrt(d), [n_tokens x n_frames].
Matrix AlignmentLogits(const Matrix &token_keys, const Matrix &mel_queries);

AlignmentPosterior SoftAlignment(const Matrix &token_keys, const Matrix &mel_queries);

/// -log of the summed probability of all monotonic paths, computed with the
/// forward recursion in log space.
double ForwardSumLoss(const AlignmentPosterior &p);

struct ForwardSumResult {
  double loss = 0.0;
  // d loss / d log p[i][j]: minus the posterior occupancy of (i, j) under the
  // path distribution.
  Matrix grad_log_probs;
};

// Loss and gradient from log-probabilities (any finite matrix; columns do
// not have to be normalized).
ForwardSumResult ForwardSumLossFromLogProbs(const Matrix &log_probs);

// Loss and gradient with respect to alignment logits that are turned into
// a posterior by LogSoftmaxOverTokens.
ForwardSumResult ForwardSumLossFromLogits(const Matrix &logits);

/// Best monotonic path by Viterbi over log p.  On equal scores the
/// backtrack takes the predecessor on the earlier token.
MonotonicPath ExtractMonotonicPath(const AlignmentPosterior &p);
MonotonicPath ExtractMonotonicPathFromLogProbs(const Matrix &log_probs);

// Throws if the path breaks the monotonic path invariants for n_tokens.
void ValidatePath(const MonotonicPath &path, int n_tokens);

DurationTargets PathToDurations(const MonotonicPath &path, int n_tokens);

// Inverse of PathToDurations.
MonotonicPath DurationsToPath(const DurationTargets &d);

}  // namespace childtts::aligner

#endif  // CHILDTTS_ALIGNER_H_
