// src/autodiff.cc

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

#include "childtts/autodiff.h"

#include <cmath>
#include <random>

#include "childtts/aligner.h"

namespace childtts::nn {

size_t CountParameters(const ParameterSet &params) {
  size_t n = 0;
  for (const auto &[name, t] : params) n += static_cast<size_t>(t.size());
  return n;
}

ParameterSet ZerosLike(const ParameterSet &params) {
  ParameterSet out;
  for (const auto &[name, t] : params) out.emplace(name, Matrix::Zero(t.rows(), t.cols()));
  return out;
}

Var Graph::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {static_cast<int>(nodes_.size()) - 1};
}

Var Graph::Param(const std::string &name) {
  Require(params_ != nullptr, "graph has no parameter set");
  auto it = params_->find(name);
  if (it == params_->end()) Fail(ErrorKind::kInvalidArgument, "unknown parameter '" + name + "'");
  Node n;
  n.param = &it->second;
  n.param_name = name;
  nodes_.push_back(std::move(n));
  return {static_cast<int>(nodes_.size()) - 1};
}

Var Graph::Emit(Matrix value, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {static_cast<int>(nodes_.size()) - 1};
}

const Matrix &Graph::value(int id) const {
  const Node &n = nodes_[id];
  return n.param ? *n.param : n.value;
}

const Matrix &Graph::value(Var v) const { return value(v.id); }

Matrix &Graph::grad(int id) {
  Node &n = nodes_[id];
  if (n.grad.size() == 0) {
    const Matrix &v = value(id);
    n.grad = Matrix::Zero(v.rows(), v.cols());
  }
  return n.grad;
}

void Graph::Backward(Var root) {
  Require(value(root).size() == 1, "Backward needs a scalar root");
  grad(root.id)(0, 0) += 1.0;
  for (int id = root.id; id >= 0; --id) {
    Node &n = nodes_[id];
    if (n.backward && n.grad.size() != 0) n.backward(*this, id);
  }
}

void Graph::AccumulateParamGrads(ParameterSet &grads) const {
  for (const Node &n : nodes_) {
    if (!n.param || n.grad.size() == 0) continue;
    grads.at(n.param_name) += n.grad;
  }
}

// ---------------------------------------------------------------------------

Var MatMul(Graph &g, Var a, Var b) {
  const Matrix &va = g.value(a), &vb = g.value(b);
  if (va.cols() != vb.rows())
    Fail(ErrorKind::kInvalidArgument, "MatMul shape mismatch");
  return g.Emit(va * vb, [a, b](Graph &gr, int self) {
    const Matrix &go = gr.grad(self);
    const Matrix ga = go * gr.value(b).transpose();
    const Matrix gb = gr.value(a).transpose() * go;
    gr.grad(a.id) += ga;
    gr.grad(b.id) += gb;
  });
}

Var Add(Graph &g, Var a, Var b) {
  const Matrix &va = g.value(a), &vb = g.value(b);
  Require(va.rows() == vb.rows() && va.cols() == vb.cols(), "Add shape mismatch");
  return g.Emit(va + vb, [a, b](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    gr.grad(a.id) += go;
    gr.grad(b.id) += go;
  });
}

Var AddRowVector(Graph &g, Var a, Var bias) {
  const Matrix &va = g.value(a), &vb = g.value(bias);
  Require(vb.rows() == 1 && vb.cols() == va.cols(), "AddRowVector shape mismatch");
  Matrix out = va;
  out.rowwise() += vb.row(0);
  return g.Emit(std::move(out), [a, bias](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    gr.grad(a.id) += go;
    gr.grad(bias.id) += go.colwise().sum();
  });
}

Var Scale(Graph &g, Var a, double s) {
  return g.Emit(g.value(a) * s, [a, s](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    gr.grad(a.id) += go * s;
  });
}

Var Relu(Graph &g, Var a) {
  return g.Emit(g.value(a).cwiseMax(0.0), [a](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    const Matrix &va = gr.value(a);
    gr.grad(a.id) += (va.array() > 0.0).select(go, 0.0).matrix();
  });
}

Var Transpose(Graph &g, Var a) {
  return g.Emit(g.value(a).transpose(), [a](Graph &gr, int self) {
    const Matrix go = gr.grad(self).transpose();
    gr.grad(a.id) += go;
  });
}

Var LayerNorm(Graph &g, Var x, Var gain, Var bias, double eps) {
  const Matrix &vx = g.value(x);
  const Eigen::Index rows = vx.rows(), cols = vx.cols();
  Require(g.value(gain).cols() == cols && g.value(bias).cols() == cols,
          "LayerNorm parameter shape mismatch");
  Matrix xhat(rows, cols);
  Vector inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = vx.row(r).mean();
    const double var = (vx.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (vx.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = xhat;
  out.array().rowwise() *= g.value(gain).row(0).array();
  out.rowwise() += g.value(bias).row(0);
  return g.Emit(std::move(out), [x, gain, bias, xhat, inv_std](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    const Eigen::Index n = xhat.cols();
    gr.grad(gain.id) += (go.array() * xhat.array()).colwise().sum().matrix();
    gr.grad(bias.id) += go.colwise().sum();
    Matrix gxhat = go;
    gxhat.array().rowwise() *= gr.value(gain).row(0).array();
    Matrix gx(xhat.rows(), n);
    for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
      const double m1 = gxhat.row(r).mean();
      const double m2 = (gxhat.row(r).array() * xhat.row(r).array()).mean();
      gx.row(r) = inv_std(r) * (gxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
    }
    gr.grad(x.id) += gx;
  });
}

Var SoftmaxRows(Graph &g, Var a) {
  const Matrix &va = g.value(a);
  Matrix out(va.rows(), va.cols());
  for (Eigen::Index r = 0; r < va.rows(); ++r) {
    const double hi = va.row(r).maxCoeff();
    out.row(r) = (va.row(r).array() - hi).exp();
    out.row(r) /= out.row(r).sum();
  }
  return g.Emit(out, [a, out](Graph &gr, int self) {
    const Matrix &go = gr.grad(self);
    Matrix ga(out.rows(), out.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const double dot = go.row(r).dot(out.row(r));
      ga.row(r) = out.row(r).array() * (go.row(r).array() - dot);
    }
    gr.grad(a.id) += ga;
  });
}

Var GatherRows(Graph &g, Var table, std::vector<int> rows) {
  const Matrix &vt = g.value(table);
  Matrix out(static_cast<Eigen::Index>(rows.size()), vt.cols());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= vt.rows())
      Fail(ErrorKind::kInvalidArgument, "GatherRows index out of range: " + std::to_string(rows[k]));
    out.row(static_cast<Eigen::Index>(k)) = vt.row(rows[k]);
  }
  return g.Emit(std::move(out), [table, rows = std::move(rows)](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    Matrix &gt = gr.grad(table.id);
    for (size_t k = 0; k < rows.size(); ++k) gt.row(rows[k]) += go.row(static_cast<Eigen::Index>(k));
  });
}

Var ShiftRows(Graph &g, Var x, int offset) {
  const Matrix &vx = g.value(x);
  const Eigen::Index rows = vx.rows();
  Matrix out = Matrix::Zero(rows, vx.cols());
  for (Eigen::Index t = 0; t < rows; ++t) {
    const Eigen::Index src = t - offset;
    if (src >= 0 && src < rows) out.row(t) = vx.row(src);
  }
  return g.Emit(std::move(out), [x, offset](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    Matrix &gx = gr.grad(x.id);
    for (Eigen::Index t = 0; t < go.rows(); ++t) {
      const Eigen::Index src = t - offset;
      if (src >= 0 && src < go.rows()) gx.row(src) += go.row(t);
    }
  });
}

Var ConcatCols(Graph &g, std::span<const Var> parts) {
  Require(!parts.empty(), "ConcatCols of nothing");
  const Eigen::Index rows = g.value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    Require(g.value(p).rows() == rows, "ConcatCols row mismatch");
    cols += g.value(p).cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleCols(at, g.value(p).cols()) = g.value(p);
    at += g.value(p).cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return g.Emit(std::move(out), [inputs](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    Eigen::Index pos = 0;
    for (Var p : inputs) {
      const Eigen::Index c = gr.value(p).cols();
      gr.grad(p.id) += go.middleCols(pos, c);
      pos += c;
    }
  });
}

Var SliceCols(Graph &g, Var x, int start, int count) {
  const Matrix &vx = g.value(x);
  Require(start >= 0 && count > 0 && start + count <= vx.cols(), "SliceCols out of range");
  return g.Emit(vx.middleCols(start, count), [x, start, count](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    gr.grad(x.id).middleCols(start, count) += go;
  });
}

Var Dropout(Graph &g, Var x, double rate, uint64_t seed) {
  if (rate <= 0.0) return x;
  Require(rate < 1.0, "dropout rate must be < 1");
  const Matrix &vx = g.value(x);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(vx.rows(), vx.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = keep(rng) ? 1.0 / (1.0 - rate) : 0.0;
  return g.Emit(vx.cwiseProduct(mask), [x, mask](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    gr.grad(x.id) += go.cwiseProduct(mask);
  });
}

Var MseLoss(Graph &g, Var pred, const Matrix &target) {
  const Matrix &vp = g.value(pred);
  Require(vp.rows() == target.rows() && vp.cols() == target.cols(), "MseLoss shape mismatch");
  const Matrix diff = vp - target;
  const double n = static_cast<double>(diff.size());
  Matrix out(1, 1);
  out(0, 0) = diff.squaredNorm() / n;
  return g.Emit(std::move(out), [pred, diff, n](Graph &gr, int self) {
    const double go = gr.grad(self)(0, 0);
    gr.grad(pred.id) += diff * (2.0 * go / n);
  });
}

Var SumScalars(Graph &g, std::span<const Var> parts) {
  Matrix out = Matrix::Zero(1, 1);
  for (Var p : parts) out(0, 0) += g.scalar(p);
  std::vector<Var> inputs(parts.begin(), parts.end());
  return g.Emit(std::move(out), [inputs](Graph &gr, int self) {
    const double go = gr.grad(self)(0, 0);
    for (Var p : inputs) gr.grad(p.id)(0, 0) += go;
  });
}

Var NegSquaredDistance(Graph &g, Var keys, Var queries, double temperature) {
  const Matrix &k = g.value(keys), &q = g.value(queries);
  Require(k.cols() == q.cols(), "NegSquaredDistance dimension mismatch");
  Matrix out(k.rows(), q.rows());
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < q.rows(); ++j)
      out(i, j) = -(k.row(i) - q.row(j)).squaredNorm() / temperature;
  return g.Emit(std::move(out), [keys, queries, temperature](Graph &gr, int self) {
    const Matrix go = gr.grad(self);
    const Matrix &kv = gr.value(keys), &qv = gr.value(queries);
    // d/dk_i = -2/T * sum_j go_ij (k_i - q_j); d/dq_j = 2/T * sum_i go_ij (k_i - q_j)
    const Vector row_sum = go.rowwise().sum();
    const Vector col_sum = go.colwise().sum().transpose();
    const Matrix gq_k = go.transpose() * kv;  // sum_i go_ij k_i
    const Matrix gk_q = go * qv;              // sum_j go_ij q_j
    Matrix gk = kv;
    gk.array().colwise() *= row_sum.array();
    gk = (gk - gk_q) * (-2.0 / temperature);
    Matrix gq = qv;
    gq.array().colwise() *= col_sum.array();
    gq = (gq_k - gq) * (2.0 / temperature);
    gr.grad(keys.id) += gk;
    gr.grad(queries.id) += gq;
  });
}

Var ForwardSumLoss(Graph &g, Var logits) {
  aligner::ForwardSumResult r = aligner::ForwardSumLossFromLogits(g.value(logits));
  Matrix out(1, 1);
  out(0, 0) = r.loss;
  return g.Emit(std::move(out), [logits, gl = std::move(r.grad_log_probs)](Graph &gr, int self) {
    const double go = gr.grad(self)(0, 0);
    gr.grad(logits.id) += gl * go;
  });
}

}  // namespace childtts::nn
