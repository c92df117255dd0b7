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

#include "tagcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tagcl {
namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw ValidationError(path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& s, const std::string& path, int line, const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) fail(path, line, what + " is not an integer: '" + s + "'");
    return v;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    fail(path, line, what + " is not an integer: '" + s + "'");
  }
}

}  // namespace

std::vector<std::pair<int, int>> TextAttributedGraph::edge_list() const {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < node_count; ++u) {
    for (int v : neighbors[static_cast<std::size_t>(u)]) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

void validate_graph(const TextAttributedGraph& g) {
  const int n = g.node_count;
  if (n < 0) throw ValidationError("node_count is negative");
  if (g.adjacency.rows() != n || g.adjacency.cols() != n)
    throw ValidationError("adjacency shape does not match node_count");
  if (static_cast<int>(g.neighbors.size()) != n || static_cast<int>(g.tokens.size()) != n ||
      static_cast<int>(g.node_ids.size()) != n)
    throw ValidationError("per-node array length does not match node_count");
  if (static_cast<int>(g.token_names.size()) != g.vocab_size)
    throw ValidationError("token_names length does not match vocab_size");
  for (int i = 0; i < n; ++i) {
    if (g.adjacency(i, i) != 0.0) throw ValidationError("adjacency has a nonzero diagonal entry");
    for (int j = 0; j < n; ++j) {
      double a = g.adjacency(i, j);
      if (a != 0.0 && a != 1.0) throw ValidationError("adjacency entry is not 0 or 1");
      if (a != g.adjacency(j, i)) throw ValidationError("adjacency is not symmetric");
    }
  }
  for (int v = 0; v < n; ++v) {
    const auto& nb = g.neighbors[static_cast<std::size_t>(v)];
    if (!std::is_sorted(nb.begin(), nb.end())) throw ValidationError("neighbor list is not sorted");
    double row_sum = g.adjacency.row(v).sum();
    if (static_cast<int>(nb.size()) != static_cast<int>(row_sum))
      throw ValidationError("neighbor list disagrees with adjacency");
    for (int u : nb) {
      if (u < 0 || u >= n) throw ValidationError("neighbor index out of range");
      if (g.adjacency(v, u) != 1.0) throw ValidationError("neighbor list disagrees with adjacency");
    }
    if (g.tokens[static_cast<std::size_t>(v)].empty())
      throw ValidationError("node " + std::to_string(v) + " has an empty token sequence");
    for (int t : g.tokens[static_cast<std::size_t>(v)]) {
      if (t < 0 || t >= g.vocab_size) throw ValidationError("token id out of vocabulary range");
    }
  }
  if (g.labels) {
    if (static_cast<int>(g.labels->size()) != n)
      throw ValidationError("labels, when present, must cover every node");
    for (int c : *g.labels) {
      if (c < 0) throw ValidationError("label is negative");
    }
  }
}

GraphMatrices build_matrices_from_adjacency(const Eigen::MatrixXd& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n) throw ValidationError("build_matrices: adjacency is not square");
  GraphMatrices m;
  m.degree = adjacency.rowwise().sum();
  m.laplacian = Eigen::MatrixXd(m.degree.asDiagonal()) - adjacency;
  Eigen::VectorXd dinv_sqrt(n), dinv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = m.degree(i);
    dinv_sqrt(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    dinv(i) = d > 0.0 ? 1.0 / d : 0.0;
  }
  m.sym_laplacian = dinv_sqrt.asDiagonal() * m.laplacian * dinv_sqrt.asDiagonal();
  m.col_norm_adjacency = adjacency * dinv.asDiagonal();
  return m;
}

GraphMatrices build_matrices(const TextAttributedGraph& g) {
  return build_matrices_from_adjacency(g.adjacency);
}

TextAttributedGraph load_tag(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");

  TextAttributedGraph g;
  std::unordered_map<std::string, int> node_index;
  std::unordered_map<std::string, int> token_index;
  std::vector<int> node_lines;          // for label coverage diagnostics
  std::vector<bool> labeled;
  std::vector<int> labels;
  std::unordered_set<long long> seen_edges;
  std::vector<std::pair<int, int>> edges;

  int declared_nodes = -1;
  int declared_edges = -1;
  bool header_seen = false;
  bool edges_started = false;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::vector<std::string> f = split_ws(raw);
    if (f.empty() || f[0][0] == '#') continue;

    if (!header_seen) {
      if (f[0] != "tag") fail(path, line_no, "expected header 'tag 1 <nodes> <edges>'");
      if (f.size() != 4) fail(path, line_no, "header must have 4 fields");
      if (f[1] != "1") fail(path, line_no, "unsupported format version '" + f[1] + "'");
      declared_nodes = parse_int(f[2], path, line_no, "node count");
      declared_edges = parse_int(f[3], path, line_no, "edge count");
      if (declared_nodes < 0 || declared_edges < 0)
        fail(path, line_no, "header counts must be non-negative");
      header_seen = true;
      continue;
    }

    if (f[0] == "node") {
      if (edges_started) fail(path, line_no, "node line after the first edge line");
      if (f.size() < 4) fail(path, line_no, "node line needs an id, a label and at least one token");
      const std::string& id = f[1];
      if (node_index.count(id)) fail(path, line_no, "duplicate node id '" + id + "'");
      int idx = static_cast<int>(g.node_ids.size());
      if (idx >= declared_nodes) fail(path, line_no, "more node lines than the header declares");
      node_index.emplace(id, idx);
      g.node_ids.push_back(id);
      node_lines.push_back(line_no);
      if (f[2] == "-") {
        labeled.push_back(false);
        labels.push_back(-1);
      } else {
        int c = parse_int(f[2], path, line_no, "label");
        if (c < 0) fail(path, line_no, "label must be non-negative");
        labeled.push_back(true);
        labels.push_back(c);
      }
      std::vector<int> toks;
      toks.reserve(f.size() - 3);
      for (std::size_t k = 3; k < f.size(); ++k) {
        auto [it, fresh] = token_index.emplace(f[k], static_cast<int>(g.token_names.size()));
        if (fresh) g.token_names.push_back(f[k]);
        toks.push_back(it->second);
      }
      g.tokens.push_back(std::move(toks));
    } else if (f[0] == "edge") {
      edges_started = true;
      if (f.size() != 3) fail(path, line_no, "edge line must have exactly 2 node ids");
      auto u_it = node_index.find(f[1]);
      if (u_it == node_index.end()) fail(path, line_no, "edge references unknown node '" + f[1] + "'");
      auto v_it = node_index.find(f[2]);
      if (v_it == node_index.end()) fail(path, line_no, "edge references unknown node '" + f[2] + "'");
      int u = u_it->second, v = v_it->second;
      if (u == v) fail(path, line_no, "self loops are not allowed");
      long long key = static_cast<long long>(std::min(u, v)) * (static_cast<long long>(declared_nodes) + 1) + std::max(u, v);
      if (!seen_edges.insert(key).second) fail(path, line_no, "duplicate edge");
      if (static_cast<int>(edges.size()) >= declared_edges)
        fail(path, line_no, "more edge lines than the header declares");
      edges.emplace_back(u, v);
    } else {
      fail(path, line_no, "unknown record type '" + f[0] + "'");
    }
  }

  if (!header_seen) fail(path, line_no == 0 ? 1 : line_no, "missing header line");
  if (static_cast<int>(g.node_ids.size()) != declared_nodes)
    fail(path, line_no, "header declares " + std::to_string(declared_nodes) + " nodes, found " +
                            std::to_string(g.node_ids.size()));
  if (static_cast<int>(edges.size()) != declared_edges)
    fail(path, line_no, "header declares " + std::to_string(declared_edges) + " edges, found " +
                            std::to_string(edges.size()));

  g.node_count = declared_nodes;
  g.vocab_size = static_cast<int>(g.token_names.size());
  g.adjacency = Eigen::MatrixXd::Zero(g.node_count, g.node_count);
  g.neighbors.assign(static_cast<std::size_t>(g.node_count), {});
  for (auto [u, v] : edges) {
    g.adjacency(u, v) = 1.0;
    g.adjacency(v, u) = 1.0;
    g.neighbors[static_cast<std::size_t>(u)].push_back(v);
    g.neighbors[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());

  bool any_labeled = std::find(labeled.begin(), labeled.end(), true) != labeled.end();
  if (any_labeled) {
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      if (!labeled[i])
        fail(path, node_lines[i], "node '" + g.node_ids[i] + "' is missing a label while other nodes are labeled");
    }
    g.labels = labels;
  }

  validate_graph(g);
  return g;
}

void save_tag(const TextAttributedGraph& g, const std::string& path) {
  validate_graph(g);
  for (const std::string& name : g.token_names) {
    if (name.empty() || name.find_first_of(" \t\n\r") != std::string::npos)
      throw ValidationError("token name unsuitable for the text format: '" + name + "'");
  }
  for (const std::string& id : g.node_ids) {
    if (id.empty() || id.find_first_of(" \t\n\r") != std::string::npos)
      throw ValidationError("node id unsuitable for the text format: '" + id + "'");
  }
  auto edges = g.edge_list();
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  out << "tag 1 " << g.node_count << " " << edges.size() << "\n";
  for (int v = 0; v < g.node_count; ++v) {
    out << "node " << g.node_ids[static_cast<std::size_t>(v)] << " ";
    if (g.labels)
      out << (*g.labels)[static_cast<std::size_t>(v)];
    else
      out << "-";
    for (int t : g.tokens[static_cast<std::size_t>(v)]) out << " " << g.token_names[static_cast<std::size_t>(t)];
    out << "\n";
  }
  for (auto [u, v] : edges)
    out << "edge " << g.node_ids[static_cast<std::size_t>(u)] << " " << g.node_ids[static_cast<std::size_t>(v)] << "\n";
  if (!out) throw ValidationError(path + ": write failed");
}

TextAttributedGraph edge_subgraph(const TextAttributedGraph& g,
                                  const std::vector<std::pair<int, int>>& edges) {
  TextAttributedGraph out = g;
  out.adjacency = Eigen::MatrixXd::Zero(g.node_count, g.node_count);
  out.neighbors.assign(static_cast<std::size_t>(g.node_count), {});
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= g.node_count || v >= g.node_count || u == v)
      throw ValidationError("edge_subgraph: edge endpoint out of range");
    if (out.adjacency(u, v) == 0.0) {
      out.adjacency(u, v) = 1.0;
      out.adjacency(v, u) = 1.0;
      out.neighbors[static_cast<std::size_t>(u)].push_back(v);
      out.neighbors[static_cast<std::size_t>(v)].push_back(u);
    }
  }
  for (auto& nb : out.neighbors) std::sort(nb.begin(), nb.end());
  return out;
}

}  // namespace tagcl
