// tests/unit/autodiff_test.cc

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

#include <functional>
#include <random>

#include "doctest.h"

#include "childtts/autodiff.h"
#include "test_util.h"

using namespace childtts;
using namespace childtts::nn;

namespace {

Matrix Random(int r, int c, std::mt19937_64 &rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

using Build = std::function<Var(Graph &)>;

// Loss = mse(build(g), target) with a fixed random target; checks every
// parameter gradient against finite differences.
double CheckGradients(const ParameterSet &params, const Build &build, uint64_t seed = 9) {
  Matrix target;
  {
    Graph g(&params);
    const Matrix &out = g.value(build(g));
    std::mt19937_64 rng(seed);
    target = Random(static_cast<int>(out.rows()), static_cast<int>(out.cols()), rng);
  }
  auto loss = [&](const ParameterSet &p) {
    Graph g(&p);
    return g.scalar(MseLoss(g, build(g), target));
  };
  Graph g(&params);
  const Var root = MseLoss(g, build(g), target);
  g.Backward(root);
  ParameterSet grads = ZerosLike(params);
  g.AccumulateParamGrads(grads);
  return testing::FiniteDifferenceCheck(params, grads, loss).max_rel_error;
}

}  // namespace

TEST_CASE("parameter helpers") {
  ParameterSet p{{"a", Matrix::Ones(2, 3)}, {"b", Matrix::Ones(4, 1)}};
  CHECK(CountParameters(p) == 10);
  const ParameterSet z = ZerosLike(p);
  CHECK(z.at("a").rows() == 2);
  CHECK(z.at("b").sum() == 0.0);
}

TEST_CASE("operation gradients") {
  std::mt19937_64 rng(1);
  ParameterSet p{{"a", Random(3, 4, rng)}, {"b", Random(4, 2, rng)}, {"c", Random(3, 4, rng)},
                 {"bias", Random(1, 4, rng)}, {"gain", Random(1, 4, rng)},
                 {"table", Random(5, 4, rng)}};
  const double tol = 1e-6;
  CHECK(CheckGradients(p, [](Graph &g) { return MatMul(g, g.Param("a"), g.Param("b")); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return Add(g, g.Param("a"), g.Param("c")); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return AddRowVector(g, g.Param("a"), g.Param("bias")); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return Scale(g, g.Param("a"), -2.5); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return Relu(g, g.Param("a")); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return Transpose(g, g.Param("a")); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) {
          return LayerNorm(g, g.Param("a"), g.Param("gain"), g.Param("bias"));
        }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return SoftmaxRows(g, g.Param("a")); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return GatherRows(g, g.Param("table"), {4, 0, 4, 2}); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return ShiftRows(g, g.Param("a"), 1); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return ShiftRows(g, g.Param("a"), -2); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) {
          const Var parts[] = {g.Param("a"), g.Param("c")};
          return ConcatCols(g, parts);
        }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return SliceCols(g, g.Param("a"), 1, 2); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) { return Dropout(g, g.Param("a"), 0.3, 17); }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) {
          return NegSquaredDistance(g, g.Param("table"), g.Param("a"), 2.0);
        }) < tol);
  CHECK(CheckGradients(p, [](Graph &g) {
          const Var parts[] = {MseLoss(g, g.Param("a"), Matrix::Zero(3, 4)),
                               ForwardSumLoss(g, g.Param("c"))};
          return SumScalars(g, parts);
        }) < tol);
  // A parameter used twice accumulates both paths.
  CHECK(CheckGradients(p, [](Graph &g) {
          return MatMul(g, g.Param("a"), Transpose(g, g.Param("a")));
        }) < tol);
}

TEST_CASE("operation values") {
  std::mt19937_64 rng(2);
  const Matrix a = Random(3, 4, rng);
  Graph g;
  const Var va = g.Constant(a);
  CHECK(g.value(ShiftRows(g, va, 1)).row(0).isZero());
  CHECK(g.value(ShiftRows(g, va, 1)).row(2) == a.row(1));
  const Matrix sm = g.value(SoftmaxRows(g, va));
  for (int r = 0; r < 3; ++r) CHECK(sm.row(r).sum() == doctest::Approx(1.0));
  const Matrix ln = g.value(LayerNorm(g, va, g.Constant(Matrix::Ones(1, 4)), g.Constant(Matrix::Zero(1, 4))));
  for (int r = 0; r < 3; ++r) CHECK(std::abs(ln.row(r).mean()) < 1e-12);
  CHECK(g.value(Dropout(g, va, 0.0, 1)) == a);
  const Matrix d = g.value(Dropout(g, va, 0.5, 1));
  for (Eigen::Index i = 0; i < a.size(); ++i)
    CHECK((d.data()[i] == 0.0 || d.data()[i] == doctest::Approx(2.0 * a.data()[i])));
  const Matrix nsd = g.value(NegSquaredDistance(g, va, va, 1.0));
  CHECK(nsd.diagonal().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(g.scalar(MseLoss(g, va, Matrix::Zero(3, 4))) == doctest::Approx(a.squaredNorm() / 12.0));
}
