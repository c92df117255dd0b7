// Copyright 2026 The tagcl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "tagcl/autodiff.hpp"
#include "tagcl/rng.hpp"

namespace {

using tagcl::ad::Tape;
using tagcl::ad::Var;

Eigen::MatrixXd random_matrix(int r, int c, tagcl::RngStream& rng) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

// Central-difference check of d out / d x for a scalar-valued graph builder
// that takes the leaf values and returns the root. Rebuilds the tape per
// evaluation, which also exercises tape re-creation.
void gradcheck(std::vector<Eigen::MatrixXd> leaves,
               const std::function<Var(Tape&, std::vector<Var>&)>& build,
               double tol = 1e-7) {
  Tape tape;
  std::vector<Var> vars;
  for (const auto& l : leaves) vars.push_back(tape.leaf(l));
  Var root = build(tape, vars);
  REQUIRE(root.value().rows() == 1);
  REQUIRE(root.value().cols() == 1);
  tape.backward(root);

  const double h = 1e-6;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    Eigen::MatrixXd analytic = vars[li].grad();
    for (int i = 0; i < leaves[li].rows(); ++i) {
      for (int j = 0; j < leaves[li].cols(); ++j) {
        auto eval = [&](double delta) {
          auto bumped = leaves;
          bumped[li](i, j) += delta;
          Tape t2;
          std::vector<Var> v2;
          for (const auto& l : bumped) v2.push_back(t2.leaf(l));
          return build(t2, v2).value()(0, 0);
        };
        double numeric = (eval(h) - eval(-h)) / (2.0 * h);
        double a = analytic(i, j);
        double rel = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
        INFO("leaf ", li, " entry (", i, ",", j, "): analytic ", a, " numeric ", numeric);
        CHECK(rel <= tol);
      }
    }
  }
}

}  // namespace

TEST_CASE("forward values of the basic ops") {
  Tape tape;
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  Var va = tape.leaf(a), vb = tape.leaf(b);
  CHECK(tape.add(va, vb).value() == (a + b).eval());
  CHECK(tape.sub(va, vb).value() == (a - b).eval());
  CHECK(tape.cmul(va, vb).value() == (a.array() * b.array()).matrix().eval());
  CHECK(tape.scale(va, 2.0).value() == (2.0 * a).eval());
  CHECK(tape.add_scaled(va, 2.0, vb, -1.0).value() == (2.0 * a - b).eval());
  CHECK(tape.matmul(va, vb).value() == (a * b).eval());
  CHECK(tape.matmul_nt(va, vb).value() == (a * b.transpose()).eval());
  CHECK(tape.row(va, 1).value() == a.row(1).eval());
  CHECK(tape.mean_rows(va, 0, 1).value() == ((a.row(0) + a.row(1)) / 2.0).eval());
  CHECK(tape.dot(va, vb).value()(0, 0) == (a.array() * b.array()).sum());
  CHECK(tape.square(va).value() == (a.array() * a.array()).matrix().eval());
}

TEST_CASE("row_softmax rows sum to one") {
  Tape tape;
  Eigen::MatrixXd a(2, 3);
  a << 0.0, 1.0, -1.0, 100.0, 100.0, 100.0;
  Var s = tape.row_softmax(tape.leaf(a));
  CHECK(s.value().row(0).sum() == doctest::Approx(1.0));
  CHECK(s.value()(1, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(s.value().minCoeff() > 0.0);
}

TEST_CASE("gather_rows maps -1 to a zero row") {
  Tape tape;
  Eigen::MatrixXd table(3, 2);
  table << 1, 2, 3, 4, 5, 6;
  Var g = tape.gather_rows(tape.leaf(table), {2, -1, 0});
  Eigen::MatrixXd expect(3, 2);
  expect << 5, 6, 0, 0, 1, 2;
  CHECK(g.value() == expect);
}

TEST_CASE("gradient of a dense composite graph") {
  tagcl::RngStream rng(101);
  auto a = random_matrix(3, 4, rng);
  auto b = random_matrix(4, 3, rng);
  auto c = random_matrix(3, 3, rng);
  gradcheck({a, b, c}, [](Tape& t, std::vector<Var>& v) {
    Var prod = t.matmul(v[0], v[1]);                    // 3x3
    Var mixed = t.cmul(t.add(prod, v[2]), v[2]);        // 3x3
    Var soft = t.row_softmax(mixed);
    Var sq = t.square(t.sub(soft, v[2]));
    return t.dot(sq, sq);
  });
}

TEST_CASE("gradient flows through gather, rows and row edits") {
  tagcl::RngStream rng(102);
  auto table = random_matrix(4, 3, rng);
  auto r = random_matrix(1, 3, rng);
  gradcheck({table, r}, [](Tape& t, std::vector<Var>& v) {
    Var g = t.gather_rows(v[0], {1, -1, 3, 1});  // row 1 used twice
    Var h = t.add_rowvec(g, v[1]);
    h = t.add_to_row(h, 2, v[1]);
    Var m = t.mean_rows(h, 1, 3);
    Var q = t.row(h, 0);
    return t.dot(m, q);
  });
}

TEST_CASE("gradient flows through matmul_nt, scaling and softmax") {
  tagcl::RngStream rng(103);
  auto q = random_matrix(3, 2, rng);
  auto k = random_matrix(3, 2, rng);
  auto val = random_matrix(3, 2, rng);
  gradcheck({q, k, val}, [](Tape& t, std::vector<Var>& v) {
    Var att = t.row_softmax(t.scale(t.matmul_nt(v[0], v[1]), 1.0 / std::sqrt(2.0)));
    Var out = t.matmul(att, v[2]);
    Var s = t.dot(out, out);
    return s;
  });
}

TEST_CASE("gradient of scalar-variable ops") {
  tagcl::RngStream rng(104);
  auto a = random_matrix(2, 3, rng);
  Eigen::MatrixXd s(1, 1);
  s << 0.7;
  gradcheck({a, s}, [](Tape& t, std::vector<Var>& v) {
    Var scaled = t.mul_scalar_var(v[0], v[1]);
    return t.dot(scaled, v[0]);
  });
}

TEST_CASE("gradient of add_many and mean_vars") {
  tagcl::RngStream rng(105);
  auto a = random_matrix(2, 2, rng);
  auto b = random_matrix(2, 2, rng);
  auto c = random_matrix(2, 2, rng);
  gradcheck({a, b, c}, [](Tape& t, std::vector<Var>& v) {
    Var sum = t.add_many({v[0], v[1], v[2]});
    Var mean = t.mean_vars({v[0], v[1], v[2], sum});
    return t.dot(mean, sum);
  });
}

TEST_CASE("backward resets stale gradients") {
  Tape tape;
  Eigen::MatrixXd a(1, 1);
  a << 3.0;
  Var v = tape.leaf(a);
  Var y1 = tape.square(v);
  tape.backward(y1);
  CHECK(v.grad()(0, 0) == doctest::Approx(6.0));
  Var y2 = tape.scale(v, 5.0);
  tape.backward(y2);
  CHECK(v.grad()(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("backward rejects non-scalar roots and shape mismatches throw") {
  Tape tape;
  Eigen::MatrixXd a(2, 2), b(2, 3);
  a.setOnes();
  b.setOnes();
  Var va = tape.leaf(a), vb = tape.leaf(b);
  CHECK_THROWS(tape.backward(va));
  CHECK_THROWS(tape.add(va, vb));
  CHECK_THROWS(tape.matmul(vb, vb));
}

TEST_CASE("vars are bound to their own tape") {
  Tape t1, t2;
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  Var v1 = t1.leaf(a);
  Var v2 = t2.leaf(a);
  CHECK_THROWS(t1.add(v1, v2));
}
