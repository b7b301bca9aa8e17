// childtts/autodiff.h

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

#ifndef CHILDTTS_AUTODIFF_H_
#define CHILDTTS_AUTODIFF_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "childtts/common.h"

// A small reverse-mode tape over dense double matrices.  One Graph records
// one forward pass; Backward() then walks it in reverse.  Parameters are
// referenced by name from a ParameterSet and are never copied.

namespace childtts::nn {

// Named tensors, iterated in name order.
using ParameterSet = std::map<std::string, Matrix>;

size_t CountParameters(const ParameterSet &params);

// Zero-filled tensors of the same names and shapes.
ParameterSet ZerosLike(const ParameterSet &params);

struct Var {
  int id = -1;
};

class Graph {
 public:
  explicit Graph(const ParameterSet *params = nullptr) : params_(params) {}

  Var Constant(Matrix value);
  Var Param(const std::string &name);

  const Matrix &value(Var v) const;
  double scalar(Var v) const { return value(v)(0, 0); }

  // Seeds d(root)/d(root) = 1 and propagates to every node.
  void Backward(Var root);
  // Adds the gradient of every referenced parameter into `grads`, which
  // must already hold same-shaped tensors for those names.
  void AccumulateParamGrads(ParameterSet &grads) const;

  using BackwardFn = std::function<void(Graph &, int self)>;
  Var Emit(Matrix value, BackwardFn backward);

  // Gradient buffer of node `id`, allocated on first use.
  Matrix &grad(int id);
  const Matrix &value(int id) const;

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    const Matrix *param = nullptr;
    std::string param_name;
    BackwardFn backward;
  };
  const ParameterSet *params_;
  std::vector<Node> nodes_;
};

// ---- operations -----------------------------------------------------------

Var MatMul(Graph &g, Var a, Var b);
Var Add(Graph &g, Var a, Var b);
// a + bias, bias is [1 x cols] broadcast over rows.
Var AddRowVector(Graph &g, Var a, Var bias);
Var Scale(Graph &g, Var a, double s);
Var Relu(Graph &g, Var a);
Var Transpose(Graph &g, Var a);
// Row-wise layer normalization with per-column gain and bias ([1 x cols]).
Var LayerNorm(Graph &g, Var x, Var gain, Var bias, double eps = 1e-5);
Var SoftmaxRows(Graph &g, Var a);
// out.row(k) = table.row(rows[k]).
Var GatherRows(Graph &g, Var table, std::vector<int> rows);
// out.row(t) = x.row(t - offset), zero where out of range.
Var ShiftRows(Graph &g, Var x, int offset);
Var ConcatCols(Graph &g, std::span<const Var> parts);
Var SliceCols(Graph &g, Var x, int start, int count);
// Inverted dropout with a mask drawn from `seed`; identity when rate == 0.
Var Dropout(Graph &g, Var x, double rate, uint64_t seed);
// mean((pred - target)^2) over all entries, as a [1 x 1] node.
Var MseLoss(Graph &g, Var pred, const Matrix &target);
Var SumScalars(Graph &g, std::span<const Var> parts);
// -||keys_i - queries_j||^2 / temperature, [rows(keys) x rows(queries)].
Var NegSquaredDistance(Graph &g, Var keys, Var queries, double temperature);
// Forward-sum alignment loss of logits normalized over tokens (rows).
Var ForwardSumLoss(Graph &g, Var logits);

}  // namespace childtts::nn

#endif  // CHILDTTS_AUTODIFF_H_
