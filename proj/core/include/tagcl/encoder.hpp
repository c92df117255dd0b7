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

#ifndef TAGCL_ENCODER_HPP_
#define TAGCL_ENCODER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tagcl/autodiff.hpp"
#include "tagcl/graph.hpp"
#include "tagcl/ppr.hpp"

namespace tagcl {

// The text encoder is a small single-head transformer with the graph folded
// in: after every block, the summary slot of a node absorbs a gated mean of
// its neighbors' text-only summaries. Sequence layout is
//
//   row 0              summary slot, positional embedding only
//   rows 1..L          tokens (masked positions use the reserved table row)
//   rows L+1..T-1      padding, positional embedding only
//
// There is no layer normalization and no attention masking; padded rows take
// part in attention. Blocks are pre-activation-free: attention + residual,
// then a linear two-layer map + residual. Sequences longer than the window
// keep their first max_seq_len - 1 tokens.
struct EncoderConfig {
  int vocab_size = 0;   // token table rows, including the reserved mask row
  int dim = 16;
  int layers = 2;
  int max_seq_len = 16;  // summary slot plus at most max_seq_len - 1 tokens
  std::uint64_t seed = 1;

  int mask_token() const { return vocab_size - 1; }
  int max_tokens() const { return max_seq_len - 1; }
  void validate() const;

  // vocab_size = graph vocabulary + 1 reserved mask row.
  static EncoderConfig for_graph(const TextAttributedGraph& g, int dim, int layers,
                                 int max_seq_len, std::uint64_t seed);
};

struct EncoderLayerParams {
  Eigen::MatrixXd wq, wk, wv;  // dim x dim
  Eigen::MatrixXd w1;          // dim x 4*dim
  Eigen::MatrixXd w2;          // 4*dim x dim
  Eigen::MatrixXd b1;          // 1 x 4*dim
  Eigen::MatrixXd b2;          // 1 x dim
  double gate = 1.0;           // neighbor mixing strength
};

struct EncoderParams {
  Eigen::MatrixXd token_table;  // vocab_size x dim
  Eigen::MatrixXd pos_table;    // max_seq_len x dim
  std::vector<EncoderLayerParams> layers;

  Eigen::Index parameter_count() const;
  Eigen::VectorXd to_flat() const;
  void from_flat(const Eigen::VectorXd& flat);
};

// Uniform init in [-1/sqrt(dim), 1/sqrt(dim)] for every table and weight,
// zero biases, gate 1.
EncoderParams init_encoder(const EncoderConfig& cfg);

// Inclusive token-row range [first, last], 1-based rows of the hidden matrix.
using MaskSpan = std::pair<int, int>;

// ---- tape-level forward (training path) ----

struct TapeLayerParams {
  ad::Var wq, wk, wv, w1, b1, w2, b2, gate;
};

struct TapeParams {
  ad::Var token_table, pos_table;
  std::vector<TapeLayerParams> layers;
};

TapeParams lift_params(ad::Tape& tape, const EncoderParams& p);

// Gradients of the lifted parameters after Tape::backward, flattened in the
// same order as EncoderParams::to_flat.
Eigen::VectorXd flat_param_grads(const TapeParams& tp);

struct TapeEncoding {
  ad::Var hiddens;  // max_seq_len x dim
  ad::Var summary;  // 1 x dim, row 0 of hiddens
  int token_count = 0;
};

// neighbor_summaries are text-only summaries of the node's neighbors (one hop,
// no recursion); pass an empty vector for a text-only encoding.
TapeEncoding encode_on_tape(ad::Tape& tape, const TapeParams& tp, const EncoderConfig& cfg,
                            const std::vector<int>& tokens,
                            const std::vector<ad::Var>& neighbor_summaries,
                            const std::optional<MaskSpan>& mask = std::nullopt);

// Mean of token rows [first, last] of the final hidden matrix.
ad::Var span_representation_on_tape(ad::Tape& tape, const TapeEncoding& enc, int first, int last);

// Mean over all token rows.
ad::Var sequence_representation_on_tape(ad::Tape& tape, const TapeEncoding& enc);

// Members are encoded with their co-members' text summaries as neighbors,
// then mean-read-out. member_text_summaries[i] belongs to sub.member_ids[i].
ad::Var encode_subgraph_on_tape(ad::Tape& tape, const TapeParams& tp, const EncoderConfig& cfg,
                                const TextAttributedGraph& g, const ContextSubgraph& sub,
                                const std::vector<ad::Var>& member_text_summaries);

// ---- value-level forward (inference path) ----

struct NodeEncoding {
  Eigen::MatrixXd token_hiddens;   // max_seq_len x dim final hidden states
  Eigen::VectorXd node_embedding;  // summary after neighbor mixing
  Eigen::VectorXd text_summary;    // summary of the text-only pass
  int token_count = 0;
};

NodeEncoding encode_node(const EncoderParams& p, const EncoderConfig& cfg,
                         const TextAttributedGraph& g, int v,
                         const std::optional<MaskSpan>& mask = std::nullopt);

Eigen::VectorXd span_representation(const NodeEncoding& enc, int first, int last);
Eigen::VectorXd sequence_representation(const NodeEncoding& enc);

Eigen::VectorXd encode_subgraph(const EncoderParams& p, const EncoderConfig& cfg,
                                const TextAttributedGraph& g, const ContextSubgraph& sub);

// ---- checkpoints ----
//
// Binary, little-endian, bit-exact round trip of config and parameters.
void save_checkpoint(const std::string& path, const EncoderConfig& cfg, const EncoderParams& p);
std::pair<EncoderConfig, EncoderParams> load_checkpoint(const std::string& path);

}  // namespace tagcl

#endif  // TAGCL_ENCODER_HPP_
