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

#include "tagcl/ppr.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <limits>
#include <numeric>

namespace tagcl {
namespace {

void require_no_isolated(const GraphMatrices& gm) {
  for (Eigen::Index i = 0; i < gm.degree.size(); ++i) {
    if (gm.degree(i) <= 0.0)
      throw ValidationError("ppr: node " + std::to_string(i) + " is isolated");
  }
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("ppr: alpha must be in (0, 1]");
}

}  // namespace

PprScores ppr_importance(const GraphMatrices& gm, double alpha, PprVariant variant) {
  require_alpha(alpha);
  require_no_isolated(gm);
  const Eigen::Index n = gm.col_norm_adjacency.rows();
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(n, n) - (1.0 - alpha) * gm.col_norm_adjacency;
  PprScores out;
  out.alpha = alpha;
  out.variant = variant;
  if (variant == PprVariant::one_step) {
    out.scores = alpha * m.transpose();
    return out;
  }
  // pi_i = alpha (I - (1-alpha) A_col)^{-1} e_i, stacked as rows of S.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m.transpose());
  out.scores = alpha * lu.solve(Eigen::MatrixXd::Identity(n, n));
  double residual =
      (m.transpose() * (out.scores / alpha) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!out.scores.allFinite() || residual > 1e-8)
    throw NumericalError("ppr: linear solve failed");
  return out;
}

Eigen::MatrixXd ppr_power_iteration(const GraphMatrices& gm, double alpha, int steps) {
  require_alpha(alpha);
  require_no_isolated(gm);
  if (steps < 0) throw ValidationError("ppr_power_iteration: steps must be non-negative");
  const Eigen::Index n = gm.col_norm_adjacency.rows();
  // Columns of p are the per-center iterates; returned row-major per center.
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd teleport = alpha * Eigen::MatrixXd::Identity(n, n);
  for (int t = 0; t < steps; ++t) {
    p = teleport + (1.0 - alpha) * (gm.col_norm_adjacency * p);
  }
  return p.transpose();
}

std::vector<int> top_rank(const Eigen::VectorXd& scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k < 0 || k > n) throw ValidationError("top_rank: k out of range");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return scores(a) > scores(b); });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

ContextSubgraph sample_subgraph(const TextAttributedGraph& g, const PprScores& s, int center, int k) {
  if (s.scores.rows() != g.node_count) throw ValidationError("sample_subgraph: score shape mismatch");
  if (center < 0 || center >= g.node_count)
    throw ValidationError("sample_subgraph: center out of range");
  if (k < 1 || k > g.node_count) throw ValidationError("sample_subgraph: k out of range");
  ContextSubgraph sub;
  sub.center = center;
  sub.member_ids.push_back(center);
  // Mask the center out of its own row so it cannot occupy a ranked slot.
  Eigen::VectorXd row = s.scores.row(center).transpose();
  row(center) = -std::numeric_limits<double>::infinity();
  for (int j : top_rank(row, k - 1)) sub.member_ids.push_back(j);
  const int size = static_cast<int>(sub.member_ids.size());
  sub.adjacency.resize(size, size);
  for (int a = 0; a < size; ++a) {
    sub.tokens.push_back(g.tokens[static_cast<std::size_t>(sub.member_ids[static_cast<std::size_t>(a)])]);
    for (int b = 0; b < size; ++b) {
      sub.adjacency(a, b) = g.adjacency(sub.member_ids[static_cast<std::size_t>(a)],
                                        sub.member_ids[static_cast<std::size_t>(b)]);
    }
  }
  return sub;
}

int most_important_neighbor(const PprScores& s, int center) {
  const int n = static_cast<int>(s.scores.rows());
  if (center < 0 || center >= n)
    throw ValidationError("most_important_neighbor: center out of range");
  if (n < 2) throw ValidationError("most_important_neighbor: need at least two nodes");
  int best = -1;
  for (int j = 0; j < n; ++j) {
    if (j == center) continue;
    if (best < 0 || s.scores(center, j) > s.scores(center, best)) best = j;
  }
  return best;
}

}  // namespace tagcl
