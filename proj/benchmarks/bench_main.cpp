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

#include <benchmark/benchmark.h>

#include "tagcl/datagen.hpp"
#include "tagcl/encoder.hpp"
#include "tagcl/objectives.hpp"
#include "tagcl/ppr.hpp"
#include "tagcl/spectral.hpp"

namespace {

tagcl::TextAttributedGraph bench_graph(int nodes) {
  tagcl::GenConfig gc;
  gc.nodes = nodes;
  gc.communities = 4;
  gc.p_in = 0.5;  // dense enough that the smallest size has no isolated nodes
  gc.p_out = 0.05;
  gc.tokens_per_node = 8;
  gc.vocab_per_community = 30;
  gc.seed = 7;
  return tagcl::generate_planted_tag(gc);
}

void bm_eigendecompose(benchmark::State& state) {
  auto g = bench_graph(static_cast<int>(state.range(0)));
  auto gm = tagcl::build_matrices(g);
  for (auto _ : state) {
    auto d = tagcl::eigendecompose(gm.sym_laplacian);
    benchmark::DoNotOptimize(d.eigenvalues);
  }
}
BENCHMARK(bm_eigendecompose)->Arg(32)->Arg(64)->Arg(128);

void bm_ppr_direct(benchmark::State& state) {
  auto g = bench_graph(static_cast<int>(state.range(0)));
  auto gm = tagcl::build_matrices(g);
  for (auto _ : state) {
    auto s = tagcl::ppr_importance(gm, 0.15);
    benchmark::DoNotOptimize(s.scores);
  }
}
BENCHMARK(bm_ppr_direct)->Arg(64)->Arg(128);

void bm_encode_node(benchmark::State& state) {
  auto g = bench_graph(128);
  auto cfg = tagcl::EncoderConfig::for_graph(g, 16, 2, 16, 3);
  auto params = tagcl::init_encoder(cfg);
  int v = 0;
  for (auto _ : state) {
    auto enc = tagcl::encode_node(params, cfg, g, v);
    benchmark::DoNotOptimize(enc.node_embedding);
    v = (v + 1) % g.node_count;
  }
}
BENCHMARK(bm_encode_node);

void bm_batch_loss_backward(benchmark::State& state) {
  auto g = bench_graph(128);
  auto cfg = tagcl::EncoderConfig::for_graph(g, 16, 2, 16, 3);
  auto params = tagcl::init_encoder(cfg);
  auto ppr = tagcl::ppr_importance(tagcl::build_matrices(g), 0.15);
  tagcl::ObjectiveConfig ocfg;
  std::vector<int> anchors;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) anchors.push_back(i);
  std::uint64_t draw = 0;
  for (auto _ : state) {
    tagcl::RngStream rng(tagcl::derive_seed(11, draw++));
    tagcl::ad::Tape tape;
    auto tp = tagcl::lift_params(tape, params);
    tagcl::BatchContext ctx{tape, tp, cfg, g, ppr, ocfg};
    tagcl::EncodingCache cache(ctx);
    auto plan = tagcl::plan_batch(ctx, cache, anchors, rng);
    auto loss = tagcl::total_loss(ctx, cache, plan);
    tape.backward(loss.total);
    benchmark::DoNotOptimize(tagcl::flat_param_grads(tp));
  }
}
BENCHMARK(bm_batch_loss_backward)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
