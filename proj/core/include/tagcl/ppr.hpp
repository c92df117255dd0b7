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

#ifndef TAGCL_PPR_HPP_
#define TAGCL_PPR_HPP_

#include <Eigen/Dense>
#include <vector>

#include "tagcl/graph.hpp"

namespace tagcl {

// exact solves the stationary equation pi_i = alpha e_i + (1 - alpha) A_col pi_i
// directly; one_step replaces the resolvent with its uninverted first-order
// form alpha (I - (1 - alpha) A_col), kept around to study how much the cheap
// approximation loses.
enum class PprVariant { exact, one_step };

// scores(i, j) is the importance of node j in the walk personalized at i.
// Exact rows sum to 1; one_step rows do not.
struct PprScores {
  double alpha = 0.0;
  PprVariant variant = PprVariant::exact;
  Eigen::MatrixXd scores;
};

// Requires alpha in (0, 1] and no isolated nodes (a zero-degree node breaks
// column stochasticity, so the walk would leak mass).
PprScores ppr_importance(const GraphMatrices& gm, double alpha,
                         PprVariant variant = PprVariant::exact);

// Reference implementation: `steps` rounds of pi <- alpha e_i + (1-alpha) A_col pi
// from pi = e_i, all personalizations at once. Linear convergence at rate
// (1 - alpha) per step.
Eigen::MatrixXd ppr_power_iteration(const GraphMatrices& gm, double alpha, int steps);

// Indices of the k largest entries in descending score order; equal scores
// break toward the smaller index. The result for a smaller k is always a
// prefix of the result for a larger k.
std::vector<int> top_rank(const Eigen::VectorXd& scores, int k);

// Context subgraph of total size k: the center plus the k-1 highest scoring
// other nodes of the center's personalized row, with adjacency and token
// sequences restricted to the members (in member order).
struct ContextSubgraph {
  int center = 0;
  std::vector<int> member_ids;            // center first, distinct
  Eigen::MatrixXd adjacency;              // k x k restriction of A
  std::vector<std::vector<int>> tokens;   // member token sequences
};

ContextSubgraph sample_subgraph(const TextAttributedGraph& g, const PprScores& s, int center, int k);

// argmax over j != center of scores(center, j), ties toward the smaller
// index. Requires at least two nodes.
int most_important_neighbor(const PprScores& s, int center);

}  // namespace tagcl

#endif  // TAGCL_PPR_HPP_
