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

#ifndef TAGCL_EVAL_HPP_
#define TAGCL_EVAL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "tagcl/encoder.hpp"
#include "tagcl/graph.hpp"
#include "tagcl/rng.hpp"

namespace tagcl {

// Pessimistic competition rank of the target among the negatives: 1 plus the
// number of negatives whose dot-product score is >= the target's score. Ties
// count against the target, so a degenerate constant scorer cannot look good.
int pessimistic_rank(const Eigen::VectorXd& query, const Eigen::VectorXd& target,
                     const std::vector<Eigen::VectorXd>& negatives);

struct RankMetrics {
  double precision_at_1 = 0.0;
  double mrr = 0.0;
  double ndcg = 0.0;
  int queries = 0;
};

// Means over queries: rank==1 indicator, 1/rank, and 1/log2(1+rank). With a
// positive ndcg_cutoff, ranks beyond the cutoff contribute zero gain.
RankMetrics rank_metrics(const std::vector<int>& ranks, int ndcg_cutoff = 0);

struct EdgeSplit {
  std::vector<std::pair<int, int>> train, val, test;
};

// Random edge split by the given fractions (test takes the remainder).
EdgeSplit split_edges(const TextAttributedGraph& g, double train_frac, double val_frac,
                      RngStream& rng);

struct LinkEvalConfig {
  int negatives_per_query = 50;
  int ndcg_cutoff = 0;
};

struct LinkEvalResult {
  RankMetrics metrics;
  std::vector<int> ranks;  // one per eval edge, in edge order
};

// Scores each eval edge (u, v) as query u against target v plus sampled
// negative nodes: drawn without replacement, excluding u, v and u's training
// neighbors. A pool smaller than negatives_per_query is an error.
LinkEvalResult link_prediction_eval(const Eigen::MatrixXd& embeddings,
                                    const std::vector<std::pair<int, int>>& eval_edges,
                                    const std::vector<std::vector<int>>& train_neighbors,
                                    const LinkEvalConfig& cfg, RngStream& rng);

// Neighbor-mixed summary embedding of every node, rows indexed by node. The
// graph passed in decides which structure the encoder sees, so pass the
// training view to keep held-out edges invisible.
Eigen::MatrixXd encode_all_nodes(const EncoderParams& p, const EncoderConfig& cfg,
                                 const TextAttributedGraph& g);

struct ProbeConfig {
  int hidden_dim = 32;
  int epochs = 200;
  double learning_rate = 1e-2;
  double train_frac = 0.7;
  double val_frac = 0.1;
  std::uint64_t seed = 0;
};

struct ProbeSplit {
  std::vector<int> train, val, test;
};

// Per-class shuffle and slice, so every class is represented in the training
// portion (requires at least one example per class).
ProbeSplit stratified_split(const std::vector<int>& labels, double train_frac, double val_frac,
                            RngStream& rng);

struct ProbeResult {
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  int classes = 0;
};

// Two-layer MLP (ReLU, softmax cross-entropy, Adam, full-batch) trained on
// frozen embeddings. The epoch with the best validation accuracy is the one
// evaluated on test; with an empty validation set the final epoch is used.
ProbeResult train_probe(const Eigen::MatrixXd& embeddings, const std::vector<int>& labels,
                        const ProbeSplit& split, const ProbeConfig& cfg);

// Stratified split + train_probe.
ProbeResult node_classification_probe(const Eigen::MatrixXd& embeddings,
                                      const std::vector<int>& labels, const ProbeConfig& cfg);

}  // namespace tagcl

#endif  // TAGCL_EVAL_HPP_
