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

#ifndef TAGCL_TRAINER_HPP_
#define TAGCL_TRAINER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tagcl/encoder.hpp"
#include "tagcl/eval.hpp"
#include "tagcl/graph.hpp"
#include "tagcl/objectives.hpp"

namespace tagcl {

struct TrainerConfig {
  std::uint64_t seed = 1;
  int dim = 16;
  int layers = 2;
  int max_seq_len = 16;
  double learning_rate = 1e-2;  // zero is allowed and leaves parameters at init
  int batch_size = 64;
  int max_epochs = 100;
  int patience = 2;            // epochs without validation improvement
  double train_frac = 0.7;     // edge split
  double val_frac = 0.1;
  double train_fraction = 1.0; // share of the train split actually used
  double ppr_alpha = 0.15;
  int neighbor_cap = 0;        // per-node neighbor budget per epoch, 0 = uncapped
  int val_negatives = 50;
  ObjectiveConfig objective;
  bool quiet = true;           // epoch lines to stderr when false
  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double total = 0.0;
  // Per-term batch means; a disabled term reports NaN.
  double tc = 0.0, nc = 0.0, sc = 0.0, tnc = 0.0, nsc = 0.0;
  double val_p_at_1 = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  EncoderConfig encoder_cfg;
  EncoderParams params;  // parameters of the best validation epoch
  std::vector<EpochStats> history;
  EdgeSplit split;
  TextAttributedGraph train_view;  // nodes of g, training edges only
  int best_epoch = -1;
  double best_val_p_at_1 = 0.0;
};

// Contrastive training on the training edge split. Only the training view is
// visible to the encoder, the importance scores and the validation negatives.
// Nodes in excluded_nodes lose their incident edges and are never anchors, so
// they stay unseen for inductive evaluation. Early stopping tracks validation
// precision-at-1.
TrainResult train(const TextAttributedGraph& g, const TrainerConfig& cfg,
                  const std::vector<int>& excluded_nodes = {});

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history);

// Central-difference check of the tape gradients, per loss term, on small
// random instances. Discrete choices are planned once and frozen, so the
// compared function is differentiable at the evaluation point. Relative error
// uses |a - n| / max(1, |a|, |n|).
struct GradCheckTerm {
  std::string name;
  double max_rel_err = 0.0;
  int instances = 0;
  int coordinates = 0;
};

struct GradCheckReport {
  std::vector<GradCheckTerm> terms;
  double worst = 0.0;
  bool pass(double tol) const { return worst < tol; }
};

GradCheckReport check_gradients(int instances_per_term, std::uint64_t seed, double fd_step = 1e-5);

// Minimizes || (I - alpha L_sym) - F F^T ||_F^2 over an unconstrained N x K
// factor by plain gradient descent and compares the result with the
// closed-form eigendecomposition optimum: the residuals should coincide and,
// when the eigengap at K is healthy, the learned column space should line up
// with the top-K eigenspace.
struct Lemma1Report {
  int nodes = 0;
  double alpha = 0.0;
  int rank = 0;
  double descent_residual = 0.0;
  double oracle_residual = 0.0;
  double ratio = 0.0;            // descent / oracle (1 when oracle is 0 and descent <= tiny)
  double principal_angle = 0.0;  // radians, largest angle between the spaces
  double eigengap = 0.0;         // lambda_K - lambda_{K+1} of the kernel
  int steps = 0;
  std::vector<double> trace;     // residual before each step, plus the final one
};

Lemma1Report verify_lemma1(const GraphMatrices& gm, double alpha, int rank, int max_steps,
                           std::uint64_t seed, double learning_rate = 1e-2);

}  // namespace tagcl

#endif  // TAGCL_TRAINER_HPP_
