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

#include "tagcl/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tagcl {
namespace {

void check_batch_shape(std::size_t anchors, std::size_t positives, std::size_t negatives) {
  if (anchors == 0) throw ValidationError("contrastive batch is empty");
  if (positives != anchors || negatives != anchors)
    throw ValidationError("contrastive batch arrays must have equal length");
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("hfc_loss: alpha must be in [0, 1]");
}

std::vector<int> rank_by_score(const std::vector<double>& scores, bool descending) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double sa = scores[static_cast<std::size_t>(a)], sb = scores[static_cast<std::size_t>(b)];
    if (sa != sb) return descending ? sa > sb : sa < sb;
    return a < b;
  });
  return order;
}

void check_batch_dims(const ContrastBatch& b) {
  const Eigen::Index d = b.anchors[0].size();
  for (std::size_t i = 0; i < b.anchors.size(); ++i) {
    if (b.anchors[i].size() != d || b.positives[i].size() != d)
      throw ValidationError("contrastive batch: dimension mismatch");
    if (b.negatives[i].empty()) throw ValidationError("contrastive batch: empty negative list");
    for (const auto& nv : b.negatives[i])
      if (nv.size() != d) throw ValidationError("contrastive batch: dimension mismatch");
  }
}

}  // namespace

double hfc_loss(const ContrastBatch& b, double alpha) {
  check_alpha(alpha);
  check_batch_shape(b.anchors.size(), b.positives.size(), b.negatives.size());
  check_batch_dims(b);
  const std::size_t m = b.anchors.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double neg = 0.0;
    for (const auto& nv : b.negatives[i]) {
      double d = b.anchors[i].dot(nv);
      neg += d * d;
    }
    neg /= static_cast<double>(b.negatives[i].size());
    total += -2.0 * alpha * b.anchors[i].dot(b.positives[i]) + neg;
  }
  return total / static_cast<double>(m);
}

double spectral_loss(const ContrastBatch& b) {
  check_batch_shape(b.anchors.size(), b.positives.size(), b.negatives.size());
  check_batch_dims(b);
  const std::size_t m = b.anchors.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double neg = 0.0;
    for (const auto& nv : b.negatives[i]) {
      double d = b.anchors[i].dot(nv);
      neg += d * d;
    }
    neg /= static_cast<double>(b.negatives[i].size());
    total += -2.0 * b.anchors[i].dot(b.positives[i]) + neg;
  }
  return total / static_cast<double>(m);
}

ad::Var hfc_loss_on_tape(ad::Tape& tape, const TapeBatch& b, double alpha) {
  check_alpha(alpha);
  check_batch_shape(b.anchors.size(), b.positives.size(), b.negatives.size());
  std::vector<ad::Var> terms;
  terms.reserve(b.anchors.size());
  for (std::size_t i = 0; i < b.anchors.size(); ++i) {
    if (b.negatives[i].empty()) throw ValidationError("contrastive batch: empty negative list");
    std::vector<ad::Var> neg_sq;
    neg_sq.reserve(b.negatives[i].size());
    for (const auto& nv : b.negatives[i])
      neg_sq.push_back(tape.square(tape.dot(b.anchors[i], nv)));
    ad::Var pos = tape.scale(tape.dot(b.anchors[i], b.positives[i]), -2.0 * alpha);
    terms.push_back(tape.add(pos, tape.mean_vars(neg_sq)));
  }
  return tape.mean_vars(terms);
}

double node_temperature(const Eigen::MatrixXd& token_rows, const Eigen::RowVectorXd& node_embedding,
                        double epsilon) {
  const Eigen::Index l = token_rows.rows();
  if (l < 1) throw ValidationError("node_temperature: no token rows");
  if (token_rows.cols() != node_embedding.cols())
    throw ValidationError("node_temperature: dimension mismatch");
  if (!(epsilon > 0.0)) throw ValidationError("node_temperature: epsilon must be positive");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l; ++i) sum += (token_rows.row(i) - node_embedding).norm();
  return sum / (static_cast<double>(l) * std::log(static_cast<double>(l) + epsilon));
}

double scaled_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tau) {
  if (a.size() != b.size()) throw ValidationError("scaled_similarity: dimension mismatch");
  if (!(tau > 0.0)) throw ValidationError("scaled_similarity: tau must be positive");
  return a.dot(b) / tau;
}

std::vector<int> select_negatives(const std::vector<Eigen::VectorXd>& candidates,
                                  const Eigen::VectorXd& query, const std::vector<double>& taus,
                                  double ratio, bool keep_most_similar) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw ValidationError("select_negatives: ratio must be in (0, 1]");
  if (taus.size() != candidates.size())
    throw ValidationError("select_negatives: one tau per candidate required");
  if (candidates.empty()) throw ValidationError("select_negatives: no candidates");
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    scores[i] = scaled_similarity(candidates[i], query, taus[i]);
  std::vector<int> order = rank_by_score(scores, keep_most_similar);
  int keep = static_cast<int>(std::ceil(ratio * static_cast<double>(candidates.size())));
  keep = std::clamp(keep, 1, static_cast<int>(candidates.size()));
  order.resize(static_cast<std::size_t>(keep));
  std::sort(order.begin(), order.end());  // report in input order
  return order;
}

MixPlan plan_hard_negative_mix(const std::vector<double>& sims, double beta_min, double beta_max,
                               RngStream& rng) {
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max <= 1.0))
    throw ValidationError("mix: beta range must satisfy 0 < min <= max <= 1");
  const int n = static_cast<int>(sims.size());
  MixPlan plan;
  plan.beta.assign(static_cast<std::size_t>(n), -1.0);
  if (n < 1) return plan;
  std::vector<int> order = rank_by_score(sims, true);
  int hard = std::max(1, n / 2);
  for (int h = 0; h < hard; ++h) {
    int i = order[static_cast<std::size_t>(h)];
    plan.beta[static_cast<std::size_t>(i)] = rng.uniform(beta_min, beta_max);
  }
  return plan;
}

std::vector<Eigen::VectorXd> mix_hard_negatives(const Eigen::VectorXd& anchor,
                                                const std::vector<Eigen::VectorXd>& candidates,
                                                const MixPlan& plan) {
  if (plan.beta.size() != candidates.size())
    throw ValidationError("mix_hard_negatives: plan size mismatch");
  std::vector<Eigen::VectorXd> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double beta = plan.beta[i];
    if (beta < 0.0) {
      out[i] = candidates[i];
    } else {
      out[i] = beta * candidates[i] + (1.0 - beta) * anchor;
    }
  }
  return out;
}

std::vector<int> shuffle_corruption(int n, RngStream& rng) {
  if (n < 2) throw ValidationError("shuffle_corruption: need at least 2 items");
  for (;;) {
    std::vector<int> perm = rng.permutation(n);
    for (int i = 0; i < n; ++i) {
      if (perm[static_cast<std::size_t>(i)] != i) return perm;
    }
  }
}

void ObjectiveConfig::validate() const {
  check_alpha(alpha);
  if (weights.tc < 0 || weights.nc < 0 || weights.sc < 0 || weights.tnc < 0 || weights.nsc < 0)
    throw ValidationError("loss weights must be non-negative");
  if (!(select_ratio > 0.0 && select_ratio <= 1.0))
    throw ValidationError("select_ratio must be in (0, 1]");
  if (!(tau_epsilon > 0.0)) throw ValidationError("tau_epsilon must be positive");
  if (!(mix_beta_min > 0.0 && mix_beta_min <= mix_beta_max && mix_beta_max <= 1.0))
    throw ValidationError("mix beta range must satisfy 0 < min <= max <= 1");
  if (span_min < 1 || span_max < span_min) throw ValidationError("bad span length bounds");
  if (subgraph_k < 1) throw ValidationError("subgraph_k must be positive");
}

const TapeEncoding& EncodingCache::text(int v) {
  auto it = text_.find(v);
  if (it != text_.end()) return it->second;
  TapeEncoding e = encode_on_tape(ctx_.tape, ctx_.tp, ctx_.cfg,
                                  ctx_.g.tokens[static_cast<std::size_t>(v)], {});
  return text_.emplace(v, e).first->second;
}

ad::Var EncodingCache::text_summary(int v) { return text(v).summary; }

const TapeEncoding& EncodingCache::masked(int v, MaskSpan span) {
  auto key = std::make_tuple(v, span.first, span.second);
  auto it = masked_.find(key);
  if (it != masked_.end()) return it->second;
  TapeEncoding e = encode_on_tape(ctx_.tape, ctx_.tp, ctx_.cfg,
                                  ctx_.g.tokens[static_cast<std::size_t>(v)], {}, span);
  return masked_.emplace(key, e).first->second;
}

const TapeEncoding& EncodingCache::mixed(int v) {
  auto it = mixed_.find(v);
  if (it != mixed_.end()) return it->second;
  std::vector<ad::Var> nbrs;
  for (int u : ctx_.g.neighbors[static_cast<std::size_t>(v)]) nbrs.push_back(text_summary(u));
  TapeEncoding e = encode_on_tape(ctx_.tape, ctx_.tp, ctx_.cfg,
                                  ctx_.g.tokens[static_cast<std::size_t>(v)], nbrs);
  return mixed_.emplace(v, e).first->second;
}

ad::Var EncodingCache::node_embedding(int v) { return mixed(v).summary; }

double EncodingCache::node_tau(int v) {
  const TapeEncoding& e = mixed(v);
  Eigen::MatrixXd rows = e.hiddens.value().middleRows(1, e.token_count);
  return node_temperature(rows, e.summary.value().row(0), ctx_.ocfg.tau_epsilon);
}

const ContextSubgraph& EncodingCache::subgraph(int v) {
  auto it = subgraphs_.find(v);
  if (it != subgraphs_.end()) return it->second;
  int k = std::min(ctx_.ocfg.subgraph_k, ctx_.g.node_count);
  ContextSubgraph sub = sample_subgraph(ctx_.g, ctx_.ppr, v, k);
  return subgraphs_.emplace(v, std::move(sub)).first->second;
}

ad::Var EncodingCache::subgraph_rep(int v) {
  auto it = subgraph_reps_.find(v);
  if (it != subgraph_reps_.end()) return it->second;
  const ContextSubgraph& sub = subgraph(v);
  std::vector<ad::Var> texts;
  texts.reserve(sub.member_ids.size());
  for (int m : sub.member_ids) texts.push_back(text_summary(m));
  ad::Var rep = encode_subgraph_on_tape(ctx_.tape, ctx_.tp, ctx_.cfg, ctx_.g, sub, texts);
  return subgraph_reps_.emplace(v, rep).first->second;
}

BatchPlan plan_batch(BatchContext& ctx, EncodingCache& cache, const std::vector<int>& anchors,
                     RngStream& rng) {
  ctx.ocfg.validate();
  // One anchor cannot supply in-batch negatives to itself.
  if (anchors.size() < 2) throw ValidationError("plan_batch: need at least 2 anchors");
  for (int v : anchors) {
    if (v < 0 || v >= ctx.g.node_count) throw ValidationError("plan_batch: anchor out of range");
  }
  const int m = static_cast<int>(anchors.size());
  const LossWeights& w = ctx.ocfg.weights;
  BatchPlan plan;
  plan.anchors = anchors;

  if (w.tc > 0.0) {
    // Spans first (pure rng), then the value-dependent negative selection.
    for (int i = 0; i < m; ++i) {
      int v = anchors[static_cast<std::size_t>(i)];
      int l_tok = cache.text(v).token_count;
      int hi = std::min(ctx.ocfg.span_max, l_tok);
      int lo = std::min(ctx.ocfg.span_min, hi);
      int len = rng.uniform_int(lo, hi);
      int start = rng.uniform_int(1, l_tok - len + 1);
      plan.tc_spans.push_back({start, start + len - 1});
    }
    std::vector<Eigen::VectorXd> span_reps(static_cast<std::size_t>(m));
    std::vector<double> taus(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      int v = anchors[static_cast<std::size_t>(i)];
      MaskSpan s = plan.tc_spans[static_cast<std::size_t>(i)];
      const Eigen::MatrixXd& h = cache.text(v).hiddens.value();
      span_reps[static_cast<std::size_t>(i)] =
          h.middleRows(s.first, s.second - s.first + 1).colwise().mean().transpose();
      taus[static_cast<std::size_t>(i)] = cache.node_tau(v);
    }
    for (int i = 0; i < m; ++i) {
      int v = anchors[static_cast<std::size_t>(i)];
      // Score candidates against the anchor's node representation; each
      // candidate is tempered by its owner's tau.
      Eigen::VectorXd query = cache.mixed(v).summary.value().row(0).transpose();
      std::vector<Eigen::VectorXd> cands;
      std::vector<double> cand_taus;
      std::vector<int> owner;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        cands.push_back(span_reps[static_cast<std::size_t>(j)]);
        cand_taus.push_back(taus[static_cast<std::size_t>(j)]);
        owner.push_back(j);
      }
      std::vector<int> sel;
      for (int c : select_negatives(cands, query, cand_taus, ctx.ocfg.select_ratio,
                                    ctx.ocfg.keep_most_similar))
        sel.push_back(owner[static_cast<std::size_t>(c)]);
      plan.tc_negatives.push_back(std::move(sel));
    }
  }

  if (w.nc > 0.0) {
    for (int i = 0; i < m; ++i) {
      int v = anchors[static_cast<std::size_t>(i)];
      Eigen::VectorXd query = cache.text_summary(v).value().row(0).transpose();
      std::vector<double> sims;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        Eigen::VectorXd c =
            cache.text_summary(anchors[static_cast<std::size_t>(j)]).value().row(0).transpose();
        sims.push_back(c.dot(query));
      }
      plan.nc_mix.push_back(
          plan_hard_negative_mix(sims, ctx.ocfg.mix_beta_min, ctx.ocfg.mix_beta_max, rng));
    }
  }

  if (w.tnc > 0.0) plan.tnc_perm = shuffle_corruption(m, rng);
  if (w.nsc > 0.0) plan.nsc_perm = shuffle_corruption(m, rng);
  return plan;
}

ad::Var tc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan) {
  const int m = static_cast<int>(plan.anchors.size());
  if (static_cast<int>(plan.tc_spans.size()) != m || static_cast<int>(plan.tc_negatives.size()) != m)
    throw ValidationError("tc_loss: plan has no token-level choices");
  TapeBatch b;
  // Anchor: the span from the clean pass. Positive: the same positions after
  // the span is masked out, i.e. what the encoder reconstructs from context.
  std::vector<ad::Var> spans(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    int v = plan.anchors[static_cast<std::size_t>(i)];
    MaskSpan s = plan.tc_spans[static_cast<std::size_t>(i)];
    spans[static_cast<std::size_t>(i)] =
        span_representation_on_tape(ctx.tape, cache.text(v), s.first, s.second);
    b.anchors.push_back(spans[static_cast<std::size_t>(i)]);
    b.positives.push_back(
        span_representation_on_tape(ctx.tape, cache.masked(v, s), s.first, s.second));
  }
  b.negatives.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j : plan.tc_negatives[static_cast<std::size_t>(i)])
      b.negatives[static_cast<std::size_t>(i)].push_back(spans[static_cast<std::size_t>(j)]);
  }
  return hfc_loss_on_tape(ctx.tape, b, ctx.ocfg.alpha);
}

ad::Var nc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan) {
  const int m = static_cast<int>(plan.anchors.size());
  if (static_cast<int>(plan.nc_mix.size()) != m)
    throw ValidationError("nc_loss: plan has no node-level choices");
  TapeBatch b;
  for (int i = 0; i < m; ++i) {
    int v = plan.anchors[static_cast<std::size_t>(i)];
    const auto& nbrs = ctx.g.neighbors[static_cast<std::size_t>(v)];
    // An anchor isolated in the training view has no neighborhood positive;
    // it sits this term out (it still serves as a negative for the others).
    if (nbrs.empty()) continue;
    ad::Var anchor = cache.text_summary(v);
    b.anchors.push_back(anchor);
    std::vector<ad::Var> nbr_embs;
    nbr_embs.reserve(nbrs.size());
    for (int u : nbrs) nbr_embs.push_back(cache.node_embedding(u));
    b.positives.push_back(ctx.tape.mean_vars(nbr_embs));

    std::vector<ad::Var> negs;
    const MixPlan& mix = plan.nc_mix[static_cast<std::size_t>(i)];
    if (mix.beta.size() != static_cast<std::size_t>(m - 1))
      throw ValidationError("nc_loss: mix plan size mismatch");
    std::size_t c = 0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      ad::Var cand = cache.text_summary(plan.anchors[static_cast<std::size_t>(j)]);
      double beta = mix.beta[c++];
      if (beta < 0.0) {
        negs.push_back(cand);
      } else {
        negs.push_back(ctx.tape.add_scaled(cand, beta, anchor, 1.0 - beta));
      }
    }
    b.negatives.push_back(std::move(negs));
  }
  if (b.anchors.empty()) throw ValidationError("nc_loss: every anchor is isolated");
  return hfc_loss_on_tape(ctx.tape, b, ctx.ocfg.alpha);
}

ad::Var sc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan) {
  const int m = static_cast<int>(plan.anchors.size());
  TapeBatch b;
  for (int i = 0; i < m; ++i) {
    int v = plan.anchors[static_cast<std::size_t>(i)];
    b.anchors.push_back(cache.subgraph_rep(v));
    int nb = most_important_neighbor(ctx.ppr, v);
    b.positives.push_back(cache.subgraph_rep(nb));
  }
  b.negatives.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (j != i)
        b.negatives[static_cast<std::size_t>(i)].push_back(
            cache.subgraph_rep(plan.anchors[static_cast<std::size_t>(j)]));
    }
  }
  return hfc_loss_on_tape(ctx.tape, b, ctx.ocfg.alpha);
}

ad::Var tnc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan) {
  const int m = static_cast<int>(plan.anchors.size());
  if (static_cast<int>(plan.tnc_perm.size()) != m)
    throw ValidationError("tnc_loss: permutation size mismatch");
  TapeBatch b;
  for (int i = 0; i < m; ++i) {
    int j = plan.tnc_perm[static_cast<std::size_t>(i)];
    // A fixed point would hand the anchor its own positive as the negative;
    // that anchor sits the batch out. A non-identity permutation leaves at
    // least two participating anchors.
    if (j == i) continue;
    int v = plan.anchors[static_cast<std::size_t>(i)];
    b.anchors.push_back(sequence_representation_on_tape(ctx.tape, cache.text(v)));
    b.positives.push_back(cache.node_embedding(v));
    b.negatives.push_back({cache.node_embedding(plan.anchors[static_cast<std::size_t>(j)])});
  }
  return hfc_loss_on_tape(ctx.tape, b, ctx.ocfg.alpha);
}

ad::Var nsc_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan) {
  const int m = static_cast<int>(plan.anchors.size());
  if (static_cast<int>(plan.nsc_perm.size()) != m)
    throw ValidationError("nsc_loss: permutation size mismatch");
  TapeBatch b;
  for (int i = 0; i < m; ++i) {
    int j = plan.nsc_perm[static_cast<std::size_t>(i)];
    if (j == i) continue;
    int v = plan.anchors[static_cast<std::size_t>(i)];
    b.anchors.push_back(cache.node_embedding(v));
    b.positives.push_back(cache.subgraph_rep(v));
    b.negatives.push_back({cache.subgraph_rep(plan.anchors[static_cast<std::size_t>(j)])});
  }
  return hfc_loss_on_tape(ctx.tape, b, ctx.ocfg.alpha);
}

LossBreakdown total_loss(BatchContext& ctx, EncodingCache& cache, const BatchPlan& plan) {
  const LossWeights& w = ctx.ocfg.weights;
  LossBreakdown out;
  std::vector<ad::Var> weighted;
  if (w.tc > 0.0) {
    out.tc = tc_loss(ctx, cache, plan);
    weighted.push_back(ctx.tape.scale(*out.tc, w.tc));
  }
  if (w.nc > 0.0) {
    out.nc = nc_loss(ctx, cache, plan);
    weighted.push_back(ctx.tape.scale(*out.nc, w.nc));
  }
  if (w.sc > 0.0) {
    out.sc = sc_loss(ctx, cache, plan);
    weighted.push_back(ctx.tape.scale(*out.sc, w.sc));
  }
  if (w.tnc > 0.0) {
    out.tnc = tnc_loss(ctx, cache, plan);
    weighted.push_back(ctx.tape.scale(*out.tnc, w.tnc));
  }
  if (w.nsc > 0.0) {
    out.nsc = nsc_loss(ctx, cache, plan);
    weighted.push_back(ctx.tape.scale(*out.nsc, w.nsc));
  }
  if (weighted.empty()) throw ValidationError("total_loss: every term is disabled");
  out.total = ctx.tape.add_many(weighted);
  return out;
}

}  // namespace tagcl
