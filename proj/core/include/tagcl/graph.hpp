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

#ifndef TAGCL_GRAPH_HPP_
#define TAGCL_GRAPH_HPP_

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tagcl {

// Malformed input: files, configs, arguments out of range. Messages for file
// input carry "path:line:".
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation produced non-finite or otherwise unusable numbers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An undirected text-attributed graph: simple unweighted edges, one non-empty
// token sequence per node, optional per-node class labels.
//
// Token ids index a shared vocabulary; token_names maps an id back to its
// surface string. Node order is load order and is the only node identity the
// numeric code uses; node_ids keeps the external names for round-tripping.
struct TextAttributedGraph {
  int node_count = 0;
  Eigen::MatrixXd adjacency;                // N x N, symmetric 0/1, zero diagonal
  std::vector<std::vector<int>> neighbors;  // per node, ascending
  std::vector<std::vector<int>> tokens;     // per node, non-empty token ids
  int vocab_size = 0;
  std::vector<std::string> token_names;     // id -> string, size vocab_size
  std::vector<std::string> node_ids;
  std::optional<std::vector<int>> labels;   // class ids, all nodes or none

  int degree(int v) const { return static_cast<int>(neighbors[static_cast<std::size_t>(v)].size()); }

  // Edges as (u, v) with u < v, ordered lexicographically.
  std::vector<std::pair<int, int>> edge_list() const;
};

// Dense operators derived from the adjacency. Isolated nodes get zero rows and
// columns in the normalized operators instead of a division by zero.
struct GraphMatrices {
  Eigen::VectorXd degree;
  Eigen::MatrixXd laplacian;             // D - A
  Eigen::MatrixXd sym_laplacian;         // D^{-1/2} (D - A) D^{-1/2}
  Eigen::MatrixXd col_norm_adjacency;    // A D^{-1}, columns sum to 1
};

// Checks structural invariants (symmetry, zero diagonal, non-empty token
// sequences, label coverage, id ranges). Throws ValidationError.
void validate_graph(const TextAttributedGraph& g);

GraphMatrices build_matrices(const TextAttributedGraph& g);
GraphMatrices build_matrices_from_adjacency(const Eigen::MatrixXd& adjacency);

// Text format, one record per line:
//
//   tag 1 <num_nodes> <num_edges>
//   node <id> <label|-> <token> [<token> ...]
//   edge <id> <id>
//
// Node lines come first and define the node order; token ids are assigned by
// first appearance. Edge lines reference declared node ids and list each
// undirected edge once. Malformed input raises ValidationError with the
// offending line number.
TextAttributedGraph load_tag(const std::string& path);
void save_tag(const TextAttributedGraph& g, const std::string& path);

// Graph restricted to a subset of edges (same nodes, tokens and labels).
TextAttributedGraph edge_subgraph(const TextAttributedGraph& g,
                                  const std::vector<std::pair<int, int>>& edges);

}  // namespace tagcl

#endif  // TAGCL_GRAPH_HPP_
