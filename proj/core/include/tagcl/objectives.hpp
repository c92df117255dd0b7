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

#ifndef TAGCL_OBJECTIVES_HPP_
#define TAGCL_OBJECTIVES_HPP_

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "tagcl/autodiff.hpp"
#include "tagcl/encoder.hpp"
#include "tagcl/graph.hpp"
#include "tagcl/ppr.hpp"
#include "tagcl/rng.hpp"

namespace tagcl {

// One contrastive batch of embeddings: anchor m pulls toward positives[m] and
// pushes against each vector in negatives[m]. Negative lists may be ragged
// but never empty.
struct ContrastBatch {
  std::vector<Eigen::VectorXd> anchors;
  std::vector<Eigen::VectorXd> positives;
  std::vector<std::vector<Eigen::VectorXd>> negatives;
};

// High-frequency-controlled contrastive loss
//
//   -2 alpha E[f(v)^T f(v+)] + E[(f(v)^T f(v-))^2]
//
// realized as the mean over anchors of
//
//   -2 alpha <a_m, p_m> + mean over m's negatives of <a_m, n>^2.
//
// alpha in [0, 1] damps the pull toward positives, which shifts the optimum
// away from the flattest graph signals.
double hfc_loss(const ContrastBatch& b, double alpha);

// The plain spectral contrastive loss -2 E[f(v)^T f(v+)] + E[(f(v)^T f(v-))^2].
// Matches hfc_loss at alpha = 1 term for term.
double spectral_loss(const ContrastBatch& b);

// Tape twin of hfc_loss, same summation order.
struct TapeBatch {
  std::vector<ad::Var> anchors;                 // 1 x dim rows
  std::vector<ad::Var> positives;
  std::vector<std::vector<ad::Var>> negatives;
};
ad::Var hfc_loss_on_tape(ad::Tape& tape, const TapeBatch& b, double alpha);

// Node-specific temperature: mean token-to-summary distance, tempered by the
// log sequence length,
//
//   tau = sum_i ||h_xi - h_v|| / (L * ln(L + epsilon)).
//
// token_rows holds the L final token hidden states (no summary, no padding).
double node_temperature(const Eigen::MatrixXd& token_rows, const Eigen::RowVectorXd& node_embedding,
                        double epsilon);

// <a, b> / tau. Requires tau > 0.
double scaled_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tau);

// Scores each candidate with scaled_similarity(candidate, query, tau of the
// candidate's owner) and keeps ceil(ratio * n) of them. By default the LEAST
// similar survive: candidates too close to the query share its semantics and
// would be misleading negatives. keep_most_similar flips that, for studying
// the opposite reading. Ties break toward the smaller index. Returns
// candidate indices in their input order.
std::vector<int> select_negatives(const std::vector<Eigen::VectorXd>& candidates,
                                  const Eigen::VectorXd& query, const std::vector<double>& taus,
                                  double ratio, bool keep_most_similar = false);

// Mixing plan for hard negatives: the top half of candidates by similarity to
// the anchor (at least one, ties toward the smaller index) each get pulled
// toward the anchor, n_i' = beta n_i + (1-beta) a, beta ~ U(beta_min,
// beta_max). beta[i] < 0 leaves candidate i as is.
struct MixPlan {
  std::vector<double> beta;
};
MixPlan plan_hard_negative_mix(const std::vector<double>& sims, double beta_min, double beta_max,
                               RngStream& rng);
std::vector<Eigen::VectorXd> mix_hard_negatives(const Eigen::VectorXd& anchor,
                                                const std::vector<Eigen::VectorXd>& candidates,
                                                const MixPlan& plan);

// Non-identity permutation of [0, n), for corrupting positive pairings.
// Requires n >= 2.
std::vector<int> shuffle_corruption(int n, RngStream& rng);

struct LossWeights {
  double tc = 1.0, nc = 1.0, sc = 1.0, tnc = 1.0, nsc = 1.0;
};

struct ObjectiveConfig {
  double alpha = 0.5;  // high-frequency control strength
  LossWeights weights;
  double select_ratio = 0.5;       // fraction of token-level negatives kept
  bool keep_most_similar = false;  // flip negative selection to keep-highest
  double tau_epsilon = 1.0;
  double mix_beta_min = 0.5;
  double mix_beta_max = 1.0;
  int span_min = 1;                // masked span length bounds
  int span_max = 3;
  int subgraph_k = 3;              // context subgraph size, center included
  void validate() const;
};

// Everything a batch of losses needs; the tape and cache live for one batch.
struct BatchContext {
  ad::Tape& tape;
  const TapeParams& tp;
  const EncoderConfig& cfg;
  const TextAttributedGraph& g;  // the view training runs on
  const PprScores& ppr;
  const ObjectiveConfig& ocfg;
};

// Memoizes per-node tape encodings within one batch so that a node encoded by
// several loss terms (or as a neighbor of several anchors) costs one forward.
class EncodingCache {
 public:
  explicit EncodingCache(BatchContext& ctx) : ctx_(ctx) {}

  const TapeEncoding& text(int v);                  // text-only pass
  ad::Var text_summary(int v);
  const TapeEncoding& masked(int v, MaskSpan span); // text-only with a masked span
  const TapeEncoding& mixed(int v);                 // with neighbor mixing
  ad::Var node_embedding(int v);
  double node_tau(int v);                           // from the mixed encoding
  // Context subgraph with k clamped to the nodes available.
  const ContextSubgraph& subgraph(int v);
  ad::Var subgraph_rep(int v);

 private:
  BatchContext& ctx_;
  std::map<int, TapeEncoding> text_;
  std::map<std::tuple<int, int, int>, TapeEncoding> masked_;
  std::map<int, TapeEncoding> mixed_;
  std::map<int, ContextSubgraph> subgraphs_;
  std::map<int, ad::Var> subgraph_reps_;
};

// Frozen discrete choices of one batch. Random draws and value-dependent
// selections happen once, in plan_batch; the loss builders are deterministic
// functions of (parameters, plan) after that. This is what makes a finite
// difference check of the analytic gradient meaningful.
struct BatchPlan {
  std::vector<int> anchors;
  std::vector<MaskSpan> tc_spans;              // per anchor
  std::vector<std::vector<int>> tc_negatives;  // anchor-list indices, input order
  std::vector<MixPlan> nc_mix;                 // per anchor, over the other anchors
  std::vector<int> tnc_perm;                   // empty when unused or M < 2
  std::vector<int> nsc_perm;
};

BatchPlan plan_batch(BatchContext& ctx, EncodingCache& cache, const std::vector<int>& anchors,
                     RngStream& rng);

// Per-term losses. Each returns the hfc loss of the batch the term assembles.
ad::Var tc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan);
ad::Var nc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan);
ad::Var sc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan);
ad::Var tnc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan);
ad::Var nsc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan);

struct LossBreakdown {
  std::optional<ad::Var> tc, nc, sc, tnc, nsc;
  ad::Var total;
};

// Weighted sum of the enabled terms (weight > 0), built in a fixed order.
LossBreakdown total_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan);

}  // namespace tagcl

#endif  // TAGCL_OBJECTIVES_HPP_
