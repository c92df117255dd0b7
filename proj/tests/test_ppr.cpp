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
#include <vector>

#include "tagcl/graph.hpp"
#include "tagcl/ppr.hpp"
#include "tagcl/rng.hpp"

namespace {

Eigen::MatrixXd k2() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = a(1, 0) = 1.0;
  return a;
}

// Hub 0 with `leaves` spokes.
Eigen::MatrixXd star(int leaves) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(leaves + 1, leaves + 1);
  for (int i = 1; i <= leaves; ++i) a(0, i) = a(i, 0) = 1.0;
  return a;
}

tagcl::TextAttributedGraph graph_from(const Eigen::MatrixXd& a) {
  tagcl::TextAttributedGraph g;
  g.node_count = static_cast<int>(a.rows());
  g.adjacency = a;
  g.vocab_size = 1;
  g.token_names = {"w"};
  for (int i = 0; i < g.node_count; ++i) {
    g.node_ids.push_back("n" + std::to_string(i));
    g.tokens.push_back({0});
    std::vector<int> nb;
    for (int j = 0; j < g.node_count; ++j)
      if (a(i, j) != 0.0) nb.push_back(j);
    g.neighbors.push_back(nb);
  }
  return g;
}

Eigen::MatrixXd random_connected(int n, std::uint64_t seed) {
  tagcl::RngStream rng(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    int j = rng.uniform_int(0, i - 1);
    a(i, j) = a(j, i) = 1.0;
  }
  for (int e = 0; e < n; ++e) {
    int i = rng.uniform_int(0, n - 1), j = rng.uniform_int(0, n - 1);
    if (i != j) a(i, j) = a(j, i) = 1.0;
  }
  return a;
}

}  // namespace

TEST_CASE("K2 ppr row is [2/3, 1/3] at alpha 0.5") {
  auto gm = tagcl::build_matrices_from_adjacency(k2());
  auto s = tagcl::ppr_importance(gm, 0.5);
  CHECK(s.scores(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.scores(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.scores(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("alpha 1 gives the identity") {
  auto gm = tagcl::build_matrices_from_adjacency(star(3));
  auto s = tagcl::ppr_importance(gm, 1.0);
  CHECK((s.scores - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("direct solve matches 200-step power iteration") {
  for (std::uint64_t seed : {3ull, 4ull, 5ull}) {
    auto a = random_connected(17, seed);
    auto gm = tagcl::build_matrices_from_adjacency(a);
    auto s = tagcl::ppr_importance(gm, 0.15);
    auto p = tagcl::ppr_power_iteration(gm, 0.15, 200);
    CHECK((s.scores - p).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("ppr rows sum to one and are non-negative") {
  auto a = random_connected(23, 9ull);
  auto gm = tagcl::build_matrices_from_adjacency(a);
  auto s = tagcl::ppr_importance(gm, 0.15);
  for (int i = 0; i < 23; ++i) {
    CHECK(s.scores.row(i).sum() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.scores.row(i).minCoeff() >= 0.0);
  }
}

TEST_CASE("ppr rejects bad alpha and isolated nodes") {
  auto gm = tagcl::build_matrices_from_adjacency(k2());
  CHECK_THROWS_AS(tagcl::ppr_importance(gm, 0.0), tagcl::ValidationError);
  CHECK_THROWS_AS(tagcl::ppr_importance(gm, 1.5), tagcl::ValidationError);
  Eigen::MatrixXd iso = Eigen::MatrixXd::Zero(3, 3);
  iso(0, 1) = iso(1, 0) = 1.0;
  auto gm_iso = tagcl::build_matrices_from_adjacency(iso);
  CHECK_THROWS_AS(tagcl::ppr_importance(gm_iso, 0.15), tagcl::ValidationError);
}

TEST_CASE("one_step variant is the uninverted operator") {
  auto a = random_connected(9, 13ull);
  auto gm = tagcl::build_matrices_from_adjacency(a);
  double alpha = 0.3;
  auto s = tagcl::ppr_importance(gm, alpha, tagcl::PprVariant::one_step);
  Eigen::MatrixXd expect =
      alpha * (Eigen::MatrixXd::Identity(9, 9) - (1.0 - alpha) * gm.col_norm_adjacency)
                  .transpose();
  CHECK((s.scores - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("top_rank sorts descending with smaller-index ties") {
  Eigen::VectorXd v(3);
  v << 0.1, 0.9, 0.5;
  CHECK(tagcl::top_rank(v, 2) == std::vector<int>{1, 2});
  Eigen::VectorXd t(3);
  t << 0.4, 0.4, 0.1;
  CHECK(tagcl::top_rank(t, 1) == std::vector<int>{0});
  CHECK(tagcl::top_rank(t, 3) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(tagcl::top_rank(t, 4), tagcl::ValidationError);
}

TEST_CASE("top_rank has the prefix property") {
  tagcl::RngStream rng(21);
  Eigen::VectorXd v(12);
  for (int i = 0; i < 12; ++i) v(i) = rng.uniform();
  v(3) = v(7);  // force one tie
  auto full = tagcl::top_rank(v, 12);
  for (int k = 0; k <= 12; ++k) {
    auto part = tagcl::top_rank(v, k);
    CHECK(std::vector<int>(full.begin(), full.begin() + k) == part);
  }
}

TEST_CASE("sample_subgraph on K2 is the whole graph") {
  auto g = graph_from(k2());
  auto s = tagcl::ppr_importance(tagcl::build_matrices(g), 0.5);
  auto sub = tagcl::sample_subgraph(g, s, 0, 2);
  CHECK(sub.center == 0);
  CHECK(sub.member_ids == std::vector<int>{0, 1});
  Eigen::MatrixXd expect(2, 2);
  expect << 0, 1, 1, 0;
  CHECK(sub.adjacency == expect);
  CHECK(sub.tokens.size() == 2);
}

TEST_CASE("star leaf picks the hub as its top member") {
  auto g = graph_from(star(4));
  auto s = tagcl::ppr_importance(tagcl::build_matrices(g), 0.15);
  auto sub = tagcl::sample_subgraph(g, s, 1, 2);
  CHECK(sub.member_ids == std::vector<int>{1, 0});
  CHECK(sub.adjacency(0, 1) == 1.0);
}

TEST_CASE("sample_subgraph k=1 degenerates to the center") {
  auto g = graph_from(star(2));
  auto s = tagcl::ppr_importance(tagcl::build_matrices(g), 0.15);
  auto sub = tagcl::sample_subgraph(g, s, 2, 1);
  CHECK(sub.member_ids == std::vector<int>{2});
  CHECK(sub.adjacency.sum() == 0.0);
  CHECK_THROWS_AS(tagcl::sample_subgraph(g, s, 2, 0), tagcl::ValidationError);
  CHECK_THROWS_AS(tagcl::sample_subgraph(g, s, 2, 4), tagcl::ValidationError);
}

TEST_CASE("subgraph members grow as a prefix chain") {
  auto g = graph_from(random_connected(11, 31ull));
  auto s = tagcl::ppr_importance(tagcl::build_matrices(g), 0.15);
  auto big = tagcl::sample_subgraph(g, s, 4, 11);
  for (int k = 1; k <= 11; ++k) {
    auto sub = tagcl::sample_subgraph(g, s, 4, k);
    CHECK(std::vector<int>(big.member_ids.begin(), big.member_ids.begin() + k) ==
          sub.member_ids);
  }
}

TEST_CASE("most_important_neighbor follows the score row") {
  auto g2 = graph_from(k2());
  auto s2 = tagcl::ppr_importance(tagcl::build_matrices(g2), 0.5);
  CHECK(tagcl::most_important_neighbor(s2, 0) == 1);

  auto gs = graph_from(star(4));
  auto ss = tagcl::ppr_importance(tagcl::build_matrices(gs), 0.15);
  CHECK(tagcl::most_important_neighbor(ss, 3) == 0);  // leaf -> hub

  Eigen::MatrixXd tri = Eigen::MatrixXd::Ones(3, 3);
  tri.diagonal().setZero();
  auto st = tagcl::ppr_importance(tagcl::build_matrices_from_adjacency(tri), 0.15);
  CHECK(tagcl::most_important_neighbor(st, 0) == 1);  // symmetric tie
  CHECK(tagcl::most_important_neighbor(st, 2) == 0);

  tagcl::PprScores single;
  single.scores = Eigen::MatrixXd::Ones(1, 1);
  CHECK_THROWS_AS(tagcl::most_important_neighbor(single, 0), tagcl::ValidationError);
}
