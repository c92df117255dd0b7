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

#include "tagcl/trainer.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <unordered_set>

#include "tagcl/optim.hpp"
#include "tagcl/ppr.hpp"
#include "tagcl/spectral.hpp"

namespace tagcl {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Importance scores over the full node set: computed on the induced subgraph
// of non-isolated nodes, scattered back with zero rows and columns elsewhere.
PprScores scattered_ppr(const TextAttributedGraph& view, double alpha) {
  std::vector<int> core;
  for (int v = 0; v < view.node_count; ++v) {
    if (view.degree(v) > 0) core.push_back(v);
  }
  if (core.size() < 2) throw ValidationError("train: training view has no usable edges");
  Eigen::MatrixXd a(core.size(), core.size());
  for (std::size_t i = 0; i < core.size(); ++i)
    for (std::size_t j = 0; j < core.size(); ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          view.adjacency(core[i], core[j]);
  PprScores small = ppr_importance(build_matrices_from_adjacency(a), alpha);
  PprScores full;
  full.alpha = alpha;
  full.variant = small.variant;
  full.scores = Eigen::MatrixXd::Zero(view.node_count, view.node_count);
  for (std::size_t i = 0; i < core.size(); ++i)
    for (std::size_t j = 0; j < core.size(); ++j)
      full.scores(core[i], core[j]) = small.scores(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j));
  return full;
}

double epoch_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_finite(const LossBreakdown& loss, int epoch, int batch) {
  if (std::isfinite(loss.total.value()(0, 0))) return;
  auto bad = [](const std::optional<ad::Var>& t) {
    return t.has_value() && !std::isfinite(t->value()(0, 0));
  };
  const char* term = "total";
  if (bad(loss.tc)) term = "tc";
  else if (bad(loss.nc)) term = "nc";
  else if (bad(loss.sc)) term = "sc";
  else if (bad(loss.tnc)) term = "tnc";
  else if (bad(loss.nsc)) term = "nsc";
  throw NumericalError("train: non-finite " + std::string(term) + " loss in epoch " +
                       std::to_string(epoch) + ", batch " + std::to_string(batch));
}

}  // namespace

void TrainerConfig::validate() const {
  objective.validate();
  if (dim < 1 || layers < 1 || max_seq_len < 2) throw ValidationError("trainer: bad encoder shape");
  if (!(learning_rate >= 0.0)) throw ValidationError("trainer: learning rate must be non-negative");
  if (batch_size < 1) throw ValidationError("trainer: batch_size must be positive");
  if (max_epochs < 1) throw ValidationError("trainer: max_epochs must be positive");
  if (patience < 1) throw ValidationError("trainer: patience must be positive");
  if (neighbor_cap < 0) throw ValidationError("trainer: neighbor_cap must be non-negative");
  if (!(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0))
    throw ValidationError("trainer: bad split fractions");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw ValidationError("trainer: train_fraction must be in (0, 1]");
  if (!(ppr_alpha > 0.0 && ppr_alpha <= 1.0)) throw ValidationError("trainer: bad ppr_alpha");
  if (val_negatives < 1) throw ValidationError("trainer: val_negatives must be positive");
}

TrainResult train(const TextAttributedGraph& g, const TrainerConfig& cfg,
                  const std::vector<int>& excluded_nodes) {
  cfg.validate();
  validate_graph(g);
  std::unordered_set<int> excluded(excluded_nodes.begin(), excluded_nodes.end());
  for (int v : excluded_nodes) {
    if (v < 0 || v >= g.node_count) throw ValidationError("train: excluded node out of range");
  }

  RngStream split_rng(derive_seed(cfg.seed, 0x73706c6974ULL));
  EdgeSplit split = split_edges(g, cfg.train_frac, cfg.val_frac, split_rng);

  std::vector<std::pair<int, int>> train_edges = split.train;
  if (cfg.train_fraction < 1.0) {
    RngStream sub_rng(derive_seed(cfg.seed, 0x73756273ULL));
    sub_rng.shuffle(train_edges);
    auto keep = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        1, static_cast<std::ptrdiff_t>(
               std::ceil(cfg.train_fraction * static_cast<double>(train_edges.size())))));
    train_edges.resize(std::min(keep, train_edges.size()));
  }
  if (!excluded.empty()) {
    std::erase_if(train_edges, [&](const std::pair<int, int>& e) {
      return excluded.count(e.first) || excluded.count(e.second);
    });
  }
  if (train_edges.empty()) throw ValidationError("train: no training edges left");

  TrainResult res;
  res.split = split;
  res.train_view = edge_subgraph(g, train_edges);
  const TextAttributedGraph& view = res.train_view;

  std::vector<int> pool;
  for (int v = 0; v < g.node_count; ++v) {
    if (!excluded.count(v) && view.degree(v) > 0) pool.push_back(v);
  }
  if (pool.size() < 2) throw ValidationError("train: fewer than two usable anchors");

  PprScores ppr = scattered_ppr(view, cfg.ppr_alpha);
  res.encoder_cfg = EncoderConfig::for_graph(g, cfg.dim, cfg.layers, cfg.max_seq_len, cfg.seed);
  EncoderParams params = init_encoder(res.encoder_cfg);
  Eigen::VectorXd flat = params.to_flat();
  Adam opt(flat.size(), AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});

  const bool val_available = !split.val.empty();
  Eigen::VectorXd best_flat = flat;
  double best_p1 = -1.0;
  int best_epoch = 0;
  int since_best = 0;
  const LossWeights& w = cfg.objective.weights;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    RngStream order_rng(derive_seed(cfg.seed, 0x6f72646572ULL, static_cast<std::uint64_t>(epoch)));
    std::vector<int> order = pool;
    order_rng.shuffle(order);

    // Per-epoch neighbor budget: nodes over the cap keep a random subset for
    // this epoch's encodings. Importance scores stay those of the full view.
    const TextAttributedGraph* epoch_view = &view;
    TextAttributedGraph capped;
    if (cfg.neighbor_cap > 0) {
      capped = view;
      RngStream cap_rng(derive_seed(cfg.seed, 0x6e636170ULL, static_cast<std::uint64_t>(epoch)));
      for (auto& nbrs : capped.neighbors) {
        int deg = static_cast<int>(nbrs.size());
        if (deg <= cfg.neighbor_cap) continue;
        std::vector<int> kept;
        for (int i : cap_rng.sample_without_replacement(deg, cfg.neighbor_cap))
          kept.push_back(nbrs[static_cast<std::size_t>(i)]);
        std::sort(kept.begin(), kept.end());
        nbrs = std::move(kept);
      }
      epoch_view = &capped;
    }

    std::vector<std::vector<int>> chunks;
    for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
      chunks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                          order.begin() + static_cast<std::ptrdiff_t>(std::min(
                              order.size(), at + static_cast<std::size_t>(cfg.batch_size))));
    }
    // A lone trailing anchor cannot form a contrastive batch; fold it back.
    if (chunks.size() > 1 && chunks.back().size() == 1) {
      chunks[chunks.size() - 2].push_back(chunks.back()[0]);
      chunks.pop_back();
    }

    double sum_total = 0.0, sum_tc = 0.0, sum_nc = 0.0, sum_sc = 0.0, sum_tnc = 0.0, sum_nsc = 0.0;
    int batches = 0;
    for (const std::vector<int>& chunk : chunks) {
      RngStream batch_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch) + 0x10000ULL,
                                      static_cast<std::uint64_t>(batches)));
      params.from_flat(flat);
      ad::Tape tape;
      TapeParams tp = lift_params(tape, params);
      BatchContext ctx{tape, tp, res.encoder_cfg, *epoch_view, ppr, cfg.objective};
      EncodingCache cache(ctx);
      BatchPlan plan = plan_batch(ctx, cache, chunk, batch_rng);
      LossBreakdown loss = total_loss(ctx, cache, plan);
      check_finite(loss, epoch, batches);
      tape.backward(loss.total);
      Eigen::VectorXd grad = flat_param_grads(tp);
      opt.step(flat, grad);

      sum_total += loss.total.value()(0, 0);
      if (loss.tc) sum_tc += loss.tc->value()(0, 0);
      if (loss.nc) sum_nc += loss.nc->value()(0, 0);
      if (loss.sc) sum_sc += loss.sc->value()(0, 0);
      if (loss.tnc) sum_tnc += loss.tnc->value()(0, 0);
      if (loss.nsc) sum_nsc += loss.nsc->value()(0, 0);
      ++batches;
    }

    params.from_flat(flat);
    EpochStats st;
    st.epoch = epoch;
    st.total = sum_total / batches;
    st.tc = w.tc > 0.0 ? sum_tc / batches : kNan;
    st.nc = w.nc > 0.0 ? sum_nc / batches : kNan;
    st.sc = w.sc > 0.0 ? sum_sc / batches : kNan;
    st.tnc = w.tnc > 0.0 ? sum_tnc / batches : kNan;
    st.nsc = w.nsc > 0.0 ? sum_nsc / batches : kNan;

    if (val_available) {
      Eigen::MatrixXd emb = encode_all_nodes(params, res.encoder_cfg, view);
      RngStream val_rng(derive_seed(cfg.seed, 0x76616cULL, static_cast<std::uint64_t>(epoch)));
      LinkEvalConfig lc;
      lc.negatives_per_query = cfg.val_negatives;
      LinkEvalResult lv = link_prediction_eval(emb, split.val, view.neighbors, lc, val_rng);
      st.val_p_at_1 = lv.metrics.precision_at_1;
    } else {
      st.val_p_at_1 = kNan;
    }
    st.seconds = epoch_seconds(t0);
    res.history.push_back(st);
    if (!cfg.quiet) {
      std::cerr << "epoch " << epoch << " loss " << st.total << " val_p@1 " << st.val_p_at_1
                << " (" << st.seconds << "s)\n";
    }

    if (val_available) {
      if (st.val_p_at_1 > best_p1) {
        best_p1 = st.val_p_at_1;
        best_flat = flat;
        best_epoch = epoch;
        since_best = 0;
      } else {
        ++since_best;
        if (since_best >= cfg.patience) break;
      }
    } else {
      best_flat = flat;
      best_epoch = epoch;
    }
  }

  res.params = init_encoder(res.encoder_cfg);
  res.params.from_flat(best_flat);
  res.best_epoch = best_epoch;
  res.best_val_p_at_1 = val_available ? best_p1 : kNan;
  return res;
}

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  out << "epoch,l_tc,l_nc,l_sc,l_tnc,l_nsc,total,val_p1,seconds\n";
  out.precision(17);
  auto field = [&](double v) {
    if (std::isnan(v))
      out << ",";
    else
      out << "," << v;
  };
  for (const auto& st : history) {
    out << st.epoch;
    field(st.tc);
    field(st.nc);
    field(st.sc);
    field(st.tnc);
    field(st.nsc);
    field(st.total);
    field(st.val_p_at_1);
    field(st.seconds);
    out << "\n";
  }
  if (!out) throw ValidationError(path + ": write failed");
}

// ---- gradient checking ----

namespace {

TextAttributedGraph tiny_graph(RngStream& rng, int n, int vocab, int tok_min, int tok_max) {
  TextAttributedGraph g;
  g.node_count = n;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  auto link = [&](int u, int v) {
    g.adjacency(u, v) = 1.0;
    g.adjacency(v, u) = 1.0;
  };
  for (int v = 1; v < n; ++v) link(v, rng.uniform_int(0, v - 1));
  // One chord to make a few cycles show up in the importance scores.
  int u = rng.uniform_int(0, n - 1);
  int v = rng.uniform_int(0, n - 1);
  if (u != v) link(u, v);
  g.neighbors.assign(static_cast<std::size_t>(n), {});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (g.adjacency(a, b) != 0.0 && b != a) g.neighbors[static_cast<std::size_t>(a)].push_back(b);
  g.vocab_size = vocab;
  for (int t = 0; t < vocab; ++t) g.token_names.push_back("w" + std::to_string(t));
  for (int i = 0; i < n; ++i) {
    g.node_ids.push_back("n" + std::to_string(i));
    int len = rng.uniform_int(tok_min, tok_max);
    std::vector<int> toks;
    for (int t = 0; t < len; ++t) toks.push_back(rng.uniform_int(0, vocab - 1));
    g.tokens.push_back(std::move(toks));
  }
  validate_graph(g);
  return g;
}

enum class Term { tc, nc, sc, tnc, nsc };

ad::Var build_term(Term term, BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan) {
  switch (term) {
    case Term::tc:
      return tc_loss(ctx, cache, plan);
    case Term::nc:
      return nc_loss(ctx, cache, plan);
    case Term::sc:
      return sc_loss(ctx, cache, plan);
    case Term::tnc:
      return tnc_loss(ctx, cache, plan);
    case Term::nsc:
      return nsc_loss(ctx, cache, plan);
  }
  throw std::logic_error("unknown term");
}

double term_value(Term term, const EncoderParams& params, const EncoderConfig& ecfg,
                  const TextAttributedGraph& g, const PprScores& ppr, const ObjectiveConfig& ocfg,
                  const BatchPlan& plan) {
  ad::Tape tape;
  TapeParams tp = lift_params(tape, params);
  BatchContext ctx{tape, tp, ecfg, g, ppr, ocfg};
  EncodingCache cache(ctx);
  return build_term(term, ctx, cache, plan).value()(0, 0);
}

}  // namespace

GradCheckReport check_gradients(int instances_per_term, std::uint64_t seed, double fd_step) {
  if (instances_per_term < 1) throw ValidationError("check_gradients: need at least one instance");
  if (!(fd_step > 0.0)) throw ValidationError("check_gradients: step must be positive");
  const std::pair<Term, const char*> terms[] = {
      {Term::tc, "tc"}, {Term::nc, "nc"}, {Term::sc, "sc"}, {Term::tnc, "tnc"}, {Term::nsc, "nsc"}};
  GradCheckReport report;
  for (std::size_t t = 0; t < 5; ++t) {
    GradCheckTerm tr;
    tr.name = terms[t].second;
    tr.instances = instances_per_term;
    for (int inst = 0; inst < instances_per_term; ++inst) {
      RngStream rng(derive_seed(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(inst)));
      TextAttributedGraph g = tiny_graph(rng, 5, 7, 2, 5);
      EncoderConfig ecfg = EncoderConfig::for_graph(g, 4, 1, 6, rng.next_u64());
      EncoderParams params = init_encoder(ecfg);
      ObjectiveConfig ocfg;
      ocfg.alpha = 0.25 + 0.25 * static_cast<double>(inst % 3);
      ocfg.span_max = 2;
      ocfg.subgraph_k = 2;
      ocfg.weights = LossWeights{0, 0, 0, 0, 0};
      switch (terms[t].first) {
        case Term::tc: ocfg.weights.tc = 1; break;
        case Term::nc: ocfg.weights.nc = 1; break;
        case Term::sc: ocfg.weights.sc = 1; break;
        case Term::tnc: ocfg.weights.tnc = 1; break;
        case Term::nsc: ocfg.weights.nsc = 1; break;
      }
      PprScores ppr = ppr_importance(build_matrices(g), 0.15);
      std::vector<int> anchors = rng.sample_without_replacement(g.node_count, 3);

      ad::Tape tape;
      TapeParams tp = lift_params(tape, params);
      BatchContext ctx{tape, tp, ecfg, g, ppr, ocfg};
      EncodingCache cache(ctx);
      BatchPlan plan = plan_batch(ctx, cache, anchors, rng);
      ad::Var loss = build_term(terms[t].first, ctx, cache, plan);
      tape.backward(loss);
      Eigen::VectorXd analytic = flat_param_grads(tp);

      Eigen::VectorXd flat = params.to_flat();
      tr.coordinates += static_cast<int>(flat.size());
      EncoderParams probe = params;
      for (Eigen::Index c = 0; c < flat.size(); ++c) {
        Eigen::VectorXd x = flat;
        x(c) = flat(c) + fd_step;
        probe.from_flat(x);
        double up = term_value(terms[t].first, probe, ecfg, g, ppr, ocfg, plan);
        x(c) = flat(c) - fd_step;
        probe.from_flat(x);
        double down = term_value(terms[t].first, probe, ecfg, g, ppr, ocfg, plan);
        double fd = (up - down) / (2.0 * fd_step);
        double rel = std::abs(analytic(c) - fd) /
                     std::max({1.0, std::abs(analytic(c)), std::abs(fd)});
        tr.max_rel_err = std::max(tr.max_rel_err, rel);
      }
    }
    report.worst = std::max(report.worst, tr.max_rel_err);
    report.terms.push_back(std::move(tr));
  }
  return report;
}

// ---- factorization vs eigendecomposition ----

Lemma1Report verify_lemma1(const GraphMatrices& gm, double alpha, int rank, int max_steps,
                           std::uint64_t seed, double learning_rate) {
  if (max_steps < 1) throw ValidationError("verify_lemma1: max_steps must be positive");
  if (!(learning_rate > 0.0)) throw ValidationError("verify_lemma1: learning rate must be positive");
  HfcKernel kern = hfc_kernel(gm, alpha);
  const int n = static_cast<int>(kern.kernel.rows());
  if (rank < 1 || rank > n) throw ValidationError("verify_lemma1: rank out of range");

  RankKFactor oracle = best_rank_k(kern, rank);
  SpectralDecomposition d = eigendecompose(kern.kernel);

  Lemma1Report rep;
  rep.nodes = n;
  rep.alpha = alpha;
  rep.rank = rank;
  rep.oracle_residual = oracle.residual;
  rep.eigengap = rank < n ? d.eigenvalues(n - rank) - d.eigenvalues(n - rank - 1)
                          : std::numeric_limits<double>::infinity();

  RngStream rng(derive_seed(seed, 0x6c656d6dULL));
  Eigen::MatrixXd f(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) f(i, j) = rng.uniform(-0.5, 0.5);

  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_f = f;
  int stall = 0;
  rep.trace.reserve(static_cast<std::size_t>(max_steps) + 1);
  for (int t = 0;; ++t) {
    Eigen::MatrixXd r = kern.kernel - f * f.transpose();
    double residual = r.squaredNorm();
    rep.trace.push_back(residual);
    if (!std::isfinite(best) || residual < best - 1e-14 * std::max(1.0, best)) {
      best = residual;
      best_f = f;
      stall = 0;
    } else if (++stall > 200) {
      break;
    }
    if (t == max_steps) break;
    f += (4.0 * learning_rate) * (r * f);
  }
  rep.steps = static_cast<int>(rep.trace.size()) - 1;
  rep.descent_residual = best;
  if (rep.oracle_residual > 1e-12) {
    rep.ratio = rep.descent_residual / rep.oracle_residual;
  } else {
    rep.ratio = rep.descent_residual <= 1e-9 ? 1.0 : std::numeric_limits<double>::infinity();
  }

  // Largest principal angle between the descent space and the top-rank
  // eigenspace: smallest singular value of Qf^T U_top.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(best_f);
  Eigen::MatrixXd qf = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
  Eigen::MatrixXd u_top(n, rank);
  for (int j = 0; j < rank; ++j) u_top.col(j) = d.eigenvectors.col(n - 1 - j);
  Eigen::MatrixXd m = qf.transpose() * u_top;
  SpectralDecomposition md = eigendecompose(m.transpose() * m);
  double cos_max = std::sqrt(std::max(0.0, md.eigenvalues(0)));
  rep.principal_angle = std::acos(std::min(1.0, cos_max));
  return rep;
}

}  // namespace tagcl
