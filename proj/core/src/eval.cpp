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

#include "tagcl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "tagcl/optim.hpp"

namespace tagcl {

int pessimistic_rank(const Eigen::VectorXd& query, const Eigen::VectorXd& target,
                     const std::vector<Eigen::VectorXd>& negatives) {
  double truth = query.dot(target);
  int rank = 1;
  for (const auto& n : negatives) {
    if (query.dot(n) >= truth) ++rank;
  }
  return rank;
}

RankMetrics rank_metrics(const std::vector<int>& ranks, int ndcg_cutoff) {
  if (ranks.empty()) throw ValidationError("rank_metrics: no queries");
  if (ndcg_cutoff < 0) throw ValidationError("rank_metrics: negative cutoff");
  RankMetrics m;
  m.queries = static_cast<int>(ranks.size());
  for (int r : ranks) {
    if (r < 1) throw ValidationError("rank_metrics: rank below 1");
    m.precision_at_1 += (r == 1) ? 1.0 : 0.0;
    m.mrr += 1.0 / static_cast<double>(r);
    if (ndcg_cutoff == 0 || r <= ndcg_cutoff)
      m.ndcg += 1.0 / std::log2(1.0 + static_cast<double>(r));
  }
  m.precision_at_1 /= m.queries;
  m.mrr /= m.queries;
  m.ndcg /= m.queries;
  return m;
}

EdgeSplit split_edges(const TextAttributedGraph& g, double train_frac, double val_frac,
                      RngStream& rng) {
  if (!(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0))
    throw ValidationError("split_edges: fractions must satisfy 0 < train, 0 <= val, train+val < 1");
  auto edges = g.edge_list();
  if (edges.empty()) throw ValidationError("split_edges: graph has no edges");
  rng.shuffle(edges);
  auto n = static_cast<std::ptrdiff_t>(edges.size());
  auto n_train = static_cast<std::ptrdiff_t>(std::floor(train_frac * static_cast<double>(n)));
  auto n_val = static_cast<std::ptrdiff_t>(std::floor(val_frac * static_cast<double>(n)));
  n_train = std::max<std::ptrdiff_t>(n_train, 1);
  EdgeSplit s;
  s.train.assign(edges.begin(), edges.begin() + n_train);
  s.val.assign(edges.begin() + n_train, edges.begin() + std::min(n, n_train + n_val));
  s.test.assign(edges.begin() + std::min(n, n_train + n_val), edges.end());
  return s;
}

LinkEvalResult link_prediction_eval(const Eigen::MatrixXd& embeddings,
                                    const std::vector<std::pair<int, int>>& eval_edges,
                                    const std::vector<std::vector<int>>& train_neighbors,
                                    const LinkEvalConfig& cfg, RngStream& rng) {
  const int n = static_cast<int>(embeddings.rows());
  if (static_cast<int>(train_neighbors.size()) != n)
    throw ValidationError("link_prediction_eval: neighbor list size mismatch");
  if (cfg.negatives_per_query < 1)
    throw ValidationError("link_prediction_eval: need at least one negative");
  if (eval_edges.empty()) throw ValidationError("link_prediction_eval: no eval edges");
  LinkEvalResult out;
  out.ranks.reserve(eval_edges.size());
  for (auto [u, v] : eval_edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw ValidationError("link_prediction_eval: edge endpoint out of range");
    std::unordered_set<int> banned(train_neighbors[static_cast<std::size_t>(u)].begin(),
                                   train_neighbors[static_cast<std::size_t>(u)].end());
    banned.insert(u);
    banned.insert(v);
    std::vector<int> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
      if (!banned.count(w)) pool.push_back(w);
    }
    if (static_cast<int>(pool.size()) < cfg.negatives_per_query)
      throw ValidationError("link_prediction_eval: not enough negative candidates");
    int take = cfg.negatives_per_query;
    std::vector<Eigen::VectorXd> negs;
    negs.reserve(static_cast<std::size_t>(take));
    for (int pick : rng.sample_without_replacement(static_cast<int>(pool.size()), take))
      negs.push_back(embeddings.row(pool[static_cast<std::size_t>(pick)]).transpose());
    out.ranks.push_back(pessimistic_rank(embeddings.row(u).transpose(),
                                         embeddings.row(v).transpose(), negs));
  }
  out.metrics = rank_metrics(out.ranks, cfg.ndcg_cutoff);
  return out;
}

Eigen::MatrixXd encode_all_nodes(const EncoderParams& p, const EncoderConfig& cfg,
                                 const TextAttributedGraph& g) {
  Eigen::MatrixXd out(g.node_count, cfg.dim);
  for (int v = 0; v < g.node_count; ++v)
    out.row(v) = encode_node(p, cfg, g, v).node_embedding.transpose();
  return out;
}

ProbeSplit stratified_split(const std::vector<int>& labels, double train_frac, double val_frac,
                            RngStream& rng) {
  if (labels.empty()) throw ValidationError("stratified_split: no labels");
  if (!(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0))
    throw ValidationError("stratified_split: bad fractions");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<int>(i));
  ProbeSplit s;
  for (auto& [cls, idx] : by_class) {
    rng.shuffle(idx);
    auto n = static_cast<std::ptrdiff_t>(idx.size());
    auto n_train = std::max<std::ptrdiff_t>(
        1, static_cast<std::ptrdiff_t>(std::floor(train_frac * static_cast<double>(n))));
    auto n_val = static_cast<std::ptrdiff_t>(std::floor(val_frac * static_cast<double>(n)));
    n_val = std::min(n_val, n - n_train);
    s.train.insert(s.train.end(), idx.begin(), idx.begin() + n_train);
    s.val.insert(s.val.end(), idx.begin() + n_train, idx.begin() + n_train + n_val);
    s.test.insert(s.test.end(), idx.begin() + n_train + n_val, idx.end());
  }
  return s;
}

namespace {

struct ProbeNet {
  Eigen::MatrixXd w1, w2;  // d x h, h x c
  Eigen::RowVectorXd b1, b2;

  Eigen::VectorXd flat() const {
    Eigen::VectorXd f(w1.size() + b1.size() + w2.size() + b2.size());
    Eigen::Index at = 0;
    f.segment(at, w1.size()) = Eigen::Map<const Eigen::VectorXd>(w1.data(), w1.size());
    at += w1.size();
    f.segment(at, b1.size()) = b1.transpose();
    at += b1.size();
    f.segment(at, w2.size()) = Eigen::Map<const Eigen::VectorXd>(w2.data(), w2.size());
    at += w2.size();
    f.segment(at, b2.size()) = b2.transpose();
    return f;
  }

  void unflat(const Eigen::VectorXd& f) {
    Eigen::Index at = 0;
    Eigen::Map<Eigen::VectorXd>(w1.data(), w1.size()) = f.segment(at, w1.size());
    at += w1.size();
    b1 = f.segment(at, b1.size()).transpose();
    at += b1.size();
    Eigen::Map<Eigen::VectorXd>(w2.data(), w2.size()) = f.segment(at, w2.size());
    at += w2.size();
    b2 = f.segment(at, b2.size()).transpose();
  }
};

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd p(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Eigen::ArrayXd e = (z.row(i).array() - z.row(i).maxCoeff()).exp();
    p.row(i) = (e / e.sum()).matrix().transpose();
  }
  return p;
}

double accuracy_of(const ProbeNet& net, const Eigen::MatrixXd& x, const std::vector<int>& labels,
                   const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  int hits = 0;
  for (int i : idx) {
    Eigen::RowVectorXd h =
        ((x.row(i) * net.w1 + net.b1).array().max(0.0)).matrix();
    Eigen::RowVectorXd z = h * net.w2 + net.b2;
    Eigen::Index arg = 0;
    z.maxCoeff(&arg);
    hits += (static_cast<int>(arg) == labels[static_cast<std::size_t>(i)]) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(idx.size());
}

}  // namespace

ProbeResult train_probe(const Eigen::MatrixXd& embeddings, const std::vector<int>& labels,
                        const ProbeSplit& split, const ProbeConfig& cfg) {
  if (static_cast<Eigen::Index>(labels.size()) != embeddings.rows())
    throw ValidationError("train_probe: one label per embedding row required");
  if (split.train.empty()) throw ValidationError("train_probe: empty training split");
  if (cfg.hidden_dim < 1 || cfg.epochs < 1) throw ValidationError("train_probe: bad config");
  int classes = 0;
  for (int c : labels) {
    if (c < 0) throw ValidationError("train_probe: negative label");
    classes = std::max(classes, c + 1);
  }
  const auto d = embeddings.cols();
  const int h = cfg.hidden_dim;

  RngStream rng(derive_seed(cfg.seed, 0x70726f62ULL));
  ProbeNet net;
  net.w1.resize(d, h);
  net.w2.resize(h, classes);
  double hw1 = 1.0 / std::sqrt(static_cast<double>(d));
  double hw2 = 1.0 / std::sqrt(static_cast<double>(h));
  for (Eigen::Index i = 0; i < net.w1.rows(); ++i)
    for (Eigen::Index j = 0; j < net.w1.cols(); ++j) net.w1(i, j) = rng.uniform(-hw1, hw1);
  for (Eigen::Index i = 0; i < net.w2.rows(); ++i)
    for (Eigen::Index j = 0; j < net.w2.cols(); ++j) net.w2(i, j) = rng.uniform(-hw2, hw2);
  net.b1 = Eigen::RowVectorXd::Zero(h);
  net.b2 = Eigen::RowVectorXd::Zero(classes);

  const auto n_train = static_cast<Eigen::Index>(split.train.size());
  Eigen::MatrixXd x(n_train, d);
  std::vector<int> y(split.train.size());
  for (Eigen::Index i = 0; i < n_train; ++i) {
    x.row(i) = embeddings.row(split.train[static_cast<std::size_t>(i)]);
    y[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(split.train[static_cast<std::size_t>(i)])];
  }

  Eigen::VectorXd flat = net.flat();
  Adam opt(flat.size(), AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
  ProbeNet best = net;
  double best_val = -1.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Forward.
    Eigen::MatrixXd a1 = (x * net.w1).rowwise() + net.b1;
    Eigen::MatrixXd h1 = a1.array().max(0.0).matrix();
    Eigen::MatrixXd z = (h1 * net.w2).rowwise() + net.b2;
    Eigen::MatrixXd p = softmax_rows(z);
    // Softmax cross-entropy backward, mean over the batch.
    Eigen::MatrixXd dz = p;
    for (Eigen::Index i = 0; i < n_train; ++i) dz(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    dz /= static_cast<double>(n_train);
    Eigen::MatrixXd gw2 = h1.transpose() * dz;
    Eigen::RowVectorXd gb2 = dz.colwise().sum();
    Eigen::MatrixXd dh1 = dz * net.w2.transpose();
    Eigen::MatrixXd da1 = (a1.array() > 0.0).select(dh1, 0.0);
    Eigen::MatrixXd gw1 = x.transpose() * da1;
    Eigen::RowVectorXd gb1 = da1.colwise().sum();

    ProbeNet grads;
    grads.w1 = gw1;
    grads.b1 = gb1;
    grads.w2 = gw2;
    grads.b2 = gb2;
    flat = net.flat();
    opt.step(flat, grads.flat());
    net.unflat(flat);

    if (!split.val.empty()) {
      double va = accuracy_of(net, embeddings, labels, split.val);
      if (va > best_val) {
        best_val = va;
        best = net;
      }
    }
  }
  if (split.val.empty()) {
    best = net;
    best_val = 0.0;
  }

  ProbeResult res;
  res.classes = classes;
  res.val_accuracy = best_val < 0.0 ? 0.0 : best_val;
  res.test_accuracy = accuracy_of(best, embeddings, labels, split.test);
  return res;
}

ProbeResult node_classification_probe(const Eigen::MatrixXd& embeddings,
                                      const std::vector<int>& labels, const ProbeConfig& cfg) {
  RngStream rng(derive_seed(cfg.seed, 0x73706c69ULL));
  ProbeSplit split = stratified_split(labels, cfg.train_frac, cfg.val_frac, rng);
  return train_probe(embeddings, labels, split, cfg);
}

}  // namespace tagcl
