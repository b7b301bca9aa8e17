// src/aligner.cc

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

#include "childtts/aligner.h"

#include <cmath>
#include <limits>

namespace childtts::aligner {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

void CheckFeasible(int n_tokens, int n_frames) {
  Require(n_tokens >= 1, "alignment needs at least one token");
  if (n_frames < n_tokens)
    Fail(ErrorKind::kInvalidArgument,
         "no valid monotonic path: " + std::to_string(n_frames) + " frames < " +
             std::to_string(n_tokens) + " tokens");
}

}  // namespace

int DurationTargets::TotalFrames() const {
  int total = 0;
  for (int d : durations) total += d;
  return total;
}

Matrix LogSoftmaxOverTokens(const Matrix &logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double hi = logits.col(j).maxCoeff();
    const double lse = hi + std::log((logits.col(j).array() - hi).exp().sum());
    out.col(j) = logits.col(j).array() - lse;
  }
  return out;
}

Matrix AlignmentLogits(const Matrix &keys, const Matrix &queries) {
  if (keys.cols() != queries.cols())
    Fail(ErrorKind::kInvalidArgument, "alignment key/query dimension mismatch: " +
                                          std::to_string(keys.cols()) + " vs " +
                                          std::to_string(queries.cols()));
  const double temperature = std::sqrt(static_cast<double>(keys.cols()));
  Matrix logits(keys.rows(), queries.rows());
  for (Eigen::Index i = 0; i < keys.rows(); ++i)
    for (Eigen::Index j = 0; j < queries.rows(); ++j)
      logits(i, j) = -(keys.row(i) - queries.row(j)).squaredNorm() / temperature;
  return logits;
}

AlignmentPosterior SoftAlignment(const Matrix &keys, const Matrix &queries) {
  return {LogSoftmaxOverTokens(AlignmentLogits(keys, queries)).array().exp().matrix()};
}

ForwardSumResult ForwardSumLossFromLogProbs(const Matrix &lp) {
  const int n = static_cast<int>(lp.rows()), t_max = static_cast<int>(lp.cols());
  CheckFeasible(n, t_max);
  Matrix alpha = Matrix::Constant(n, t_max, kNegInf);
  alpha(0, 0) = lp(0, 0);
  for (int j = 1; j < t_max; ++j) {
    // token i is reachable at frame j only if i <= j, and can still reach
    // the end only if n - 1 - i <= t_max - 1 - j.
    const int lo = std::max(0, n - t_max + j), hi = std::min(n - 1, j);
    for (int i = lo; i <= hi; ++i) {
      double prev = alpha(i, j - 1);
      if (i > 0) prev = LogAddExp(prev, alpha(i - 1, j - 1));
      alpha(i, j) = prev == kNegInf ? kNegInf : prev + lp(i, j);
    }
  }
  const double log_z = alpha(n - 1, t_max - 1);
  Matrix beta = Matrix::Constant(n, t_max, kNegInf);
  beta(n - 1, t_max - 1) = 0.0;
  for (int j = t_max - 2; j >= 0; --j) {
    const int lo = std::max(0, n - t_max + j), hi = std::min(n - 1, j);
    for (int i = lo; i <= hi; ++i) {
      double next = kNegInf;
      if (beta(i, j + 1) != kNegInf) next = lp(i, j + 1) + beta(i, j + 1);
      if (i + 1 < n && beta(i + 1, j + 1) != kNegInf)
        next = LogAddExp(next, lp(i + 1, j + 1) + beta(i + 1, j + 1));
      beta(i, j) = next;
    }
  }
  ForwardSumResult out;
  out.loss = -log_z;
  out.grad_log_probs = Matrix::Zero(n, t_max);
  for (int j = 0; j < t_max; ++j)
    for (int i = 0; i < n; ++i)
      if (alpha(i, j) != kNegInf && beta(i, j) != kNegInf)
        out.grad_log_probs(i, j) = -std::exp(alpha(i, j) + beta(i, j) - log_z);
  return out;
}

ForwardSumResult ForwardSumLossFromLogits(const Matrix &logits) {
  const Matrix lp = LogSoftmaxOverTokens(logits);
  ForwardSumResult r = ForwardSumLossFromLogProbs(lp);
  // d/dlogit[i][j] = g[i][j] - p[i][j] * sum_k g[k][j]
  const Matrix p = lp.array().exp().matrix();
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double col_sum = r.grad_log_probs.col(j).sum();
    r.grad_log_probs.col(j) -= p.col(j) * col_sum;
  }
  return r;
}

double ForwardSumLoss(const AlignmentPosterior &p) {
  return ForwardSumLossFromLogProbs(p.probs.array().log().matrix()).loss;
}

MonotonicPath ExtractMonotonicPathFromLogProbs(const Matrix &lp) {
  const int n = static_cast<int>(lp.rows()), t_max = static_cast<int>(lp.cols());
  CheckFeasible(n, t_max);
  Matrix delta = Matrix::Constant(n, t_max, kNegInf);
  delta(0, 0) = lp(0, 0);
  for (int j = 1; j < t_max; ++j) {
    const int lo = std::max(0, n - t_max + j), hi = std::min(n - 1, j);
    for (int i = lo; i <= hi; ++i) {
      double prev = delta(i, j - 1);
      if (i > 0) prev = std::max(prev, delta(i - 1, j - 1));
      delta(i, j) = prev == kNegInf ? kNegInf : prev + lp(i, j);
    }
  }
  // Backtrack.  On a tie the predecessor on the earlier token wins, so the
  // path lingers on earlier tokens and advances as late as possible.
  MonotonicPath path;
  path.token_index_per_frame.assign(t_max, 0);
  int i = n - 1;
  for (int j = t_max - 1; j >= 0; --j) {
    path.token_index_per_frame[j] = i;
    if (j == 0) break;
    if (i > 0 && delta(i - 1, j - 1) >= delta(i, j - 1)) --i;
  }
  return path;
}

MonotonicPath ExtractMonotonicPath(const AlignmentPosterior &p) {
  return ExtractMonotonicPathFromLogProbs(p.probs.array().log().matrix());
}

void ValidatePath(const MonotonicPath &path, int n_tokens) {
  const auto &idx = path.token_index_per_frame;
  Require(!idx.empty(), "empty monotonic path");
  Require(idx.front() == 0, "monotonic path must start at token 0");
  Require(idx.back() == n_tokens - 1, "monotonic path must end at the last token");
  for (size_t j = 1; j < idx.size(); ++j) {
    const int step = idx[j] - idx[j - 1];
    Require(step == 0 || step == 1, "monotonic path steps must be 0 or +1");
  }
}

DurationTargets PathToDurations(const MonotonicPath &path, int n_tokens) {
  ValidatePath(path, n_tokens);
  DurationTargets d;
  d.durations.assign(n_tokens, 0);
  for (int tok : path.token_index_per_frame) ++d.durations[tok];
  return d;
}

MonotonicPath DurationsToPath(const DurationTargets &d) {
  MonotonicPath path;
  for (size_t tok = 0; tok < d.durations.size(); ++tok) {
    Require(d.durations[tok] >= 1, "every token needs at least one frame");
    path.token_index_per_frame.insert(path.token_index_per_frame.end(),
                                      d.durations[tok], static_cast<int>(tok));
  }
  return path;
}

}  // namespace childtts::aligner
