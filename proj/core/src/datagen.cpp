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

#include "tagcl/datagen.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "tagcl/rng.hpp"

namespace tagcl {

void GenConfig::validate() const {
  if (nodes < 2) throw ValidationError("gen: need at least 2 nodes");
  if (communities < 1 || nodes < 2 * communities)
    throw ValidationError("gen: need at least two nodes per community");
  if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0))
    throw ValidationError("gen: edge probabilities must be in [0, 1]");
  if (tokens_per_node < 1) throw ValidationError("gen: tokens_per_node must be positive");
  if (vocab_per_community < 1) throw ValidationError("gen: vocab_per_community must be positive");
  if (!(shared_vocab_fraction >= 0.0 && shared_vocab_fraction <= 1.0))
    throw ValidationError("gen: shared_vocab_fraction must be in [0, 1]");
}

TextAttributedGraph generate_planted_tag(const GenConfig& cfg) {
  cfg.validate();
  RngStream rng(derive_seed(cfg.seed, 0x67656e00ULL));
  const int n = cfg.nodes;
  const int c = cfg.communities;

  TextAttributedGraph g;
  g.node_count = n;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> comm(static_cast<std::size_t>(n));
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) comm[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] = i % c;

  auto link = [&](int u, int v) {
    g.adjacency(u, v) = 1.0;
    g.adjacency(v, u) = 1.0;
  };
  // Edge sets leaving any node isolated are redrawn whole, so the accepted
  // graph is an SBM draw conditioned on minimum degree 1.
  constexpr int kMaxRedraws = 100;
  bool covered = false;
  for (int attempt = 0; attempt < kMaxRedraws && !covered; ++attempt) {
    g.adjacency.setZero();
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        double p = comm[static_cast<std::size_t>(u)] == comm[static_cast<std::size_t>(v)]
                       ? cfg.p_in
                       : cfg.p_out;
        if (rng.bernoulli(p)) link(u, v);
      }
    }
    covered = true;
    for (int v = 0; v < n && covered; ++v) covered = g.adjacency.row(v).sum() > 0.0;
  }
  if (!covered)
    throw ValidationError("gen: minimum degree 1 not reached after 100 edge redraws");
  g.neighbors.assign(static_cast<std::size_t>(n), {});
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (v != u && g.adjacency(u, v) != 0.0) g.neighbors[static_cast<std::size_t>(u)].push_back(v);

  // Tokens: ids assigned on first use, matching loader semantics.
  std::unordered_map<std::string, int> token_index;
  auto token_id = [&](const std::string& name) {
    auto [it, fresh] = token_index.emplace(name, static_cast<int>(g.token_names.size()));
    if (fresh) g.token_names.push_back(name);
    return it->second;
  };
  for (int v = 0; v < n; ++v) {
    g.node_ids.push_back("n" + std::to_string(v));
    std::vector<int> toks;
    toks.reserve(static_cast<std::size_t>(cfg.tokens_per_node));
    for (int t = 0; t < cfg.tokens_per_node; ++t) {
      bool shared = cfg.shared_vocab_fraction > 0.0 && rng.bernoulli(cfg.shared_vocab_fraction);
      int w = rng.uniform_int(0, cfg.vocab_per_community - 1);
      std::string name = shared ? "sh_w" + std::to_string(w)
                                : "c" + std::to_string(comm[static_cast<std::size_t>(v)]) + "_w" +
                                      std::to_string(w);
      toks.push_back(token_id(name));
    }
    g.tokens.push_back(std::move(toks));
  }
  g.vocab_size = static_cast<int>(g.token_names.size());
  g.labels = labels;
  validate_graph(g);
  return g;
}

KvEntries gen_metadata(const GenConfig& cfg, const TextAttributedGraph& g) {
  auto edges = g.edge_list();
  std::size_t within = 0;
  if (g.labels) {
    for (auto [u, v] : edges) {
      if ((*g.labels)[static_cast<std::size_t>(u)] == (*g.labels)[static_cast<std::size_t>(v)])
        ++within;
    }
  }
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  KvEntries kv;
  kv.emplace_back("nodes", std::to_string(cfg.nodes));
  kv.emplace_back("communities", std::to_string(cfg.communities));
  kv.emplace_back("p_in", num(cfg.p_in));
  kv.emplace_back("p_out", num(cfg.p_out));
  kv.emplace_back("tokens_per_node", std::to_string(cfg.tokens_per_node));
  kv.emplace_back("vocab_per_community", std::to_string(cfg.vocab_per_community));
  kv.emplace_back("shared_vocab_fraction", num(cfg.shared_vocab_fraction));
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("edges", std::to_string(edges.size()));
  kv.emplace_back("vocab_size", std::to_string(g.vocab_size));
  kv.emplace_back("within_community_edge_fraction",
                  edges.empty() ? "0" : num(static_cast<double>(within) / static_cast<double>(edges.size())));
  return kv;
}

}  // namespace tagcl
