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

#ifndef TAGCL_DATAGEN_HPP_
#define TAGCL_DATAGEN_HPP_

#include <cstdint>

#include "tagcl/graph.hpp"
#include "tagcl/kv.hpp"

namespace tagcl {

// Planted-partition graph with per-community token pools. Node i belongs to
// community i mod communities (labels record it). Edges are independent
// Bernoulli draws: p_in inside a community, p_out across; draws that leave a
// node isolated are redrawn whole, up to 100 times, then rejected. Tokens are
// drawn per position: from a shared pool with probability
// shared_vocab_fraction, from the community pool otherwise. The same seed
// always yields the same graph.
struct GenConfig {
  int nodes = 200;
  int communities = 2;
  double p_in = 0.15;
  double p_out = 0.01;
  int tokens_per_node = 8;
  int vocab_per_community = 30;
  double shared_vocab_fraction = 0.0;
  std::uint64_t seed = 1;
  void validate() const;
};

TextAttributedGraph generate_planted_tag(const GenConfig& cfg);

// Sidecar metadata: the generating config plus derived stats (edge count,
// fraction of within-community edges).
KvEntries gen_metadata(const GenConfig& cfg, const TextAttributedGraph& g);

}  // namespace tagcl

#endif  // TAGCL_DATAGEN_HPP_
