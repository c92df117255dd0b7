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

#include "tagcl/encoder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "tagcl/rng.hpp"

namespace tagcl {
namespace {

constexpr char kCheckpointMagic[8] = {'T', 'A', 'G', 'C', 'K', 'P', 'T', '1'};

Eigen::MatrixXd uniform_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols, double half_width) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-half_width, half_width);
  return m;
}

template <typename Fn>
void for_each_param(const EncoderParams& p, Fn&& fn) {
  fn(p.token_table);
  fn(p.pos_table);
  for (const auto& l : p.layers) {
    fn(l.wq);
    fn(l.wk);
    fn(l.wv);
    fn(l.w1);
    fn(l.b1);
    fn(l.w2);
    fn(l.b2);
  }
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size < 2) throw ValidationError("encoder: vocab_size must be at least 2");
  if (dim < 1) throw ValidationError("encoder: dim must be positive");
  if (layers < 1) throw ValidationError("encoder: layers must be positive");
  if (max_seq_len < 2) throw ValidationError("encoder: max_seq_len must be at least 2");
}

EncoderConfig EncoderConfig::for_graph(const TextAttributedGraph& g, int dim, int layers,
                                       int max_seq_len, std::uint64_t seed) {
  EncoderConfig cfg;
  cfg.vocab_size = g.vocab_size + 1;
  cfg.dim = dim;
  cfg.layers = layers;
  cfg.max_seq_len = max_seq_len;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

Eigen::Index EncoderParams::parameter_count() const {
  Eigen::Index n = 0;
  for_each_param(*this, [&n](const Eigen::MatrixXd& m) { n += m.size(); });
  n += static_cast<Eigen::Index>(layers.size());  // gates
  return n;
}

Eigen::VectorXd EncoderParams::to_flat() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index at = 0;
  for_each_param(*this, [&](const Eigen::MatrixXd& m) {
    flat.segment(at, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    at += m.size();
  });
  for (const auto& l : layers) flat(at++) = l.gate;
  return flat;
}

void EncoderParams::from_flat(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) throw ValidationError("from_flat: size mismatch");
  Eigen::Index at = 0;
  auto take = [&](Eigen::MatrixXd& m) {
    Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) = flat.segment(at, m.size());
    at += m.size();
  };
  take(token_table);
  take(pos_table);
  for (auto& l : layers) {
    take(l.wq);
    take(l.wk);
    take(l.wv);
    take(l.w1);
    take(l.b1);
    take(l.w2);
    take(l.b2);
  }
  for (auto& l : layers) l.gate = flat(at++);
}

EncoderParams init_encoder(const EncoderConfig& cfg) {
  cfg.validate();
  RngStream rng(derive_seed(cfg.seed, 0x656e636fULL));
  double hw = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  EncoderParams p;
  p.token_table = uniform_matrix(rng, cfg.vocab_size, cfg.dim, hw);
  p.pos_table = uniform_matrix(rng, cfg.max_seq_len, cfg.dim, hw);
  p.layers.resize(static_cast<std::size_t>(cfg.layers));
  for (auto& l : p.layers) {
    l.wq = uniform_matrix(rng, cfg.dim, cfg.dim, hw);
    l.wk = uniform_matrix(rng, cfg.dim, cfg.dim, hw);
    l.wv = uniform_matrix(rng, cfg.dim, cfg.dim, hw);
    l.w1 = uniform_matrix(rng, cfg.dim, 4 * cfg.dim, hw);
    l.b1 = Eigen::MatrixXd::Zero(1, 4 * cfg.dim);
    l.w2 = uniform_matrix(rng, 4 * cfg.dim, cfg.dim, hw);
    l.b2 = Eigen::MatrixXd::Zero(1, cfg.dim);
    l.gate = 1.0;
  }
  return p;
}

TapeParams lift_params(ad::Tape& tape, const EncoderParams& p) {
  TapeParams tp;
  tp.token_table = tape.leaf(p.token_table);
  tp.pos_table = tape.leaf(p.pos_table);
  for (const auto& l : p.layers) {
    TapeLayerParams tl;
    tl.wq = tape.leaf(l.wq);
    tl.wk = tape.leaf(l.wk);
    tl.wv = tape.leaf(l.wv);
    tl.w1 = tape.leaf(l.w1);
    tl.b1 = tape.leaf(l.b1);
    tl.w2 = tape.leaf(l.w2);
    tl.b2 = tape.leaf(l.b2);
    Eigen::MatrixXd g(1, 1);
    g(0, 0) = l.gate;
    tl.gate = tape.leaf(g);
    tp.layers.push_back(tl);
  }
  return tp;
}

Eigen::VectorXd flat_param_grads(const TapeParams& tp) {
  Eigen::Index total = tp.token_table.grad().size() + tp.pos_table.grad().size();
  for (const auto& l : tp.layers)
    total += l.wq.grad().size() + l.wk.grad().size() + l.wv.grad().size() + l.w1.grad().size() +
             l.b1.grad().size() + l.w2.grad().size() + l.b2.grad().size() + 1;
  Eigen::VectorXd flat(total);
  Eigen::Index at = 0;
  auto take = [&](const Eigen::MatrixXd& g) {
    flat.segment(at, g.size()) = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
    at += g.size();
  };
  take(tp.token_table.grad());
  take(tp.pos_table.grad());
  for (const auto& l : tp.layers) {
    take(l.wq.grad());
    take(l.wk.grad());
    take(l.wv.grad());
    take(l.w1.grad());
    take(l.b1.grad());
    take(l.w2.grad());
    take(l.b2.grad());
  }
  for (const auto& l : tp.layers) flat(at++) = l.gate.grad()(0, 0);
  return flat;
}

TapeEncoding encode_on_tape(ad::Tape& tape, const TapeParams& tp, const EncoderConfig& cfg,
                            const std::vector<int>& tokens,
                            const std::vector<ad::Var>& neighbor_summaries,
                            const std::optional<MaskSpan>& mask) {
  if (tokens.empty()) throw ValidationError("encode: empty token sequence");
  const int t_len = cfg.max_seq_len;
  const int n_tok = std::min<int>(static_cast<int>(tokens.size()), cfg.max_tokens());

  std::vector<int> ids(static_cast<std::size_t>(t_len), -1);
  for (int t = 0; t < n_tok; ++t) {
    int tok = tokens[static_cast<std::size_t>(t)];
    if (tok < 0 || tok >= cfg.vocab_size) throw ValidationError("encode: token id out of range");
    ids[static_cast<std::size_t>(1 + t)] = tok;
  }
  if (mask) {
    auto [first, last] = *mask;
    if (first < 1 || last < first || last > n_tok)
      throw ValidationError("encode: mask span out of range");
    for (int r = first; r <= last; ++r) ids[static_cast<std::size_t>(r)] = cfg.mask_token();
  }

  std::vector<int> pos_ids(static_cast<std::size_t>(t_len));
  std::iota(pos_ids.begin(), pos_ids.end(), 0);

  ad::Var x = tape.gather_rows(tp.token_table, ids);
  ad::Var pos = tape.gather_rows(tp.pos_table, pos_ids);
  ad::Var h = tape.add(x, pos);

  double att_scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  std::optional<ad::Var> neighbor_mean;
  if (!neighbor_summaries.empty()) neighbor_mean = tape.mean_vars(neighbor_summaries);

  for (const auto& l : tp.layers) {
    ad::Var q = tape.matmul(h, l.wq);
    ad::Var k = tape.matmul(h, l.wk);
    ad::Var v = tape.matmul(h, l.wv);
    ad::Var att = tape.row_softmax(tape.scale(tape.matmul_nt(q, k), att_scale));
    h = tape.add(h, tape.matmul(att, v));
    ad::Var f = tape.add_rowvec(tape.matmul(tape.add_rowvec(tape.matmul(h, l.w1), l.b1), l.w2), l.b2);
    h = tape.add(h, f);
    if (neighbor_mean) h = tape.add_to_row(h, 0, tape.mul_scalar_var(*neighbor_mean, l.gate));
  }

  TapeEncoding out;
  out.hiddens = h;
  out.summary = tape.row(h, 0);
  out.token_count = n_tok;
  return out;
}

ad::Var span_representation_on_tape(ad::Tape& tape, const TapeEncoding& enc, int first, int last) {
  if (first < 1 || last < first || last > enc.token_count)
    throw ValidationError("span_representation: range outside token rows");
  return tape.mean_rows(enc.hiddens, first, last);
}

ad::Var sequence_representation_on_tape(ad::Tape& tape, const TapeEncoding& enc) {
  return span_representation_on_tape(tape, enc, 1, enc.token_count);
}

ad::Var encode_subgraph_on_tape(ad::Tape& tape, const TapeParams& tp, const EncoderConfig& cfg,
                                const TextAttributedGraph& g, const ContextSubgraph& sub,
                                const std::vector<ad::Var>& member_text_summaries) {
  if (sub.member_ids.empty()) throw ValidationError("encode_subgraph: empty member list");
  if (member_text_summaries.size() != sub.member_ids.size())
    throw ValidationError("encode_subgraph: summary count mismatch");
  std::vector<ad::Var> member_reps;
  member_reps.reserve(sub.member_ids.size());
  for (std::size_t i = 0; i < sub.member_ids.size(); ++i) {
    std::vector<ad::Var> co_members;
    for (std::size_t j = 0; j < sub.member_ids.size(); ++j) {
      if (j != i) co_members.push_back(member_text_summaries[j]);
    }
    TapeEncoding enc = encode_on_tape(
        tape, tp, cfg, g.tokens[static_cast<std::size_t>(sub.member_ids[i])], co_members);
    member_reps.push_back(enc.summary);
  }
  return tape.mean_vars(member_reps);
}

NodeEncoding encode_node(const EncoderParams& p, const EncoderConfig& cfg,
                         const TextAttributedGraph& g, int v, const std::optional<MaskSpan>& mask) {
  if (v < 0 || v >= g.node_count) throw ValidationError("encode_node: node out of range");
  ad::Tape tape;
  TapeParams tp = lift_params(tape, p);
  std::vector<ad::Var> nbrs;
  for (int u : g.neighbors[static_cast<std::size_t>(v)]) {
    nbrs.push_back(encode_on_tape(tape, tp, cfg, g.tokens[static_cast<std::size_t>(u)], {}).summary);
  }
  TapeEncoding text = encode_on_tape(tape, tp, cfg, g.tokens[static_cast<std::size_t>(v)], {}, mask);
  NodeEncoding out;
  out.text_summary = text.summary.value().row(0).transpose();
  if (nbrs.empty()) {
    out.token_hiddens = text.hiddens.value();
    out.node_embedding = out.text_summary;
    out.token_count = text.token_count;
  } else {
    TapeEncoding mixed = encode_on_tape(tape, tp, cfg, g.tokens[static_cast<std::size_t>(v)], nbrs, mask);
    out.token_hiddens = mixed.hiddens.value();
    out.node_embedding = mixed.summary.value().row(0).transpose();
    out.token_count = mixed.token_count;
  }
  return out;
}

Eigen::VectorXd span_representation(const NodeEncoding& enc, int first, int last) {
  if (first < 1 || last < first || last > enc.token_count)
    throw ValidationError("span_representation: range outside token rows");
  return enc.token_hiddens.middleRows(first, last - first + 1).colwise().mean().transpose();
}

Eigen::VectorXd sequence_representation(const NodeEncoding& enc) {
  return span_representation(enc, 1, enc.token_count);
}

Eigen::VectorXd encode_subgraph(const EncoderParams& p, const EncoderConfig& cfg,
                                const TextAttributedGraph& g, const ContextSubgraph& sub) {
  ad::Tape tape;
  TapeParams tp = lift_params(tape, p);
  std::vector<ad::Var> texts;
  texts.reserve(sub.member_ids.size());
  for (int m : sub.member_ids)
    texts.push_back(encode_on_tape(tape, tp, cfg, g.tokens[static_cast<std::size_t>(m)], {}).summary);
  ad::Var rep = encode_subgraph_on_tape(tape, tp, cfg, g, sub, texts);
  return rep.value().row(0).transpose();
}

void save_checkpoint(const std::string& path, const EncoderConfig& cfg, const EncoderParams& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  auto write_i64 = [&](std::int64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  write_i64(cfg.vocab_size);
  write_i64(cfg.dim);
  write_i64(cfg.layers);
  write_i64(cfg.max_seq_len);
  std::uint64_t seed = cfg.seed;
  out.write(reinterpret_cast<const char*>(&seed), 8);
  Eigen::VectorXd flat = p.to_flat();
  write_i64(flat.size());
  out.write(reinterpret_cast<const char*>(flat.data()), static_cast<std::streamsize>(flat.size() * 8));
  if (!out) throw ValidationError(path + ": write failed");
}

std::pair<EncoderConfig, EncoderParams> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw ValidationError(path + ": not a checkpoint file");
  auto read_i64 = [&]() {
    std::int64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  EncoderConfig cfg;
  cfg.vocab_size = static_cast<int>(read_i64());
  cfg.dim = static_cast<int>(read_i64());
  cfg.layers = static_cast<int>(read_i64());
  cfg.max_seq_len = static_cast<int>(read_i64());
  std::uint64_t seed = 0;
  in.read(reinterpret_cast<char*>(&seed), 8);
  cfg.seed = seed;
  if (!in) throw ValidationError(path + ": truncated checkpoint header");
  cfg.validate();
  EncoderParams p;
  p.token_table = Eigen::MatrixXd::Zero(cfg.vocab_size, cfg.dim);
  p.pos_table = Eigen::MatrixXd::Zero(cfg.max_seq_len, cfg.dim);
  p.layers.resize(static_cast<std::size_t>(cfg.layers));
  for (auto& l : p.layers) {
    l.wq = l.wk = l.wv = Eigen::MatrixXd::Zero(cfg.dim, cfg.dim);
    l.w1 = Eigen::MatrixXd::Zero(cfg.dim, 4 * cfg.dim);
    l.b1 = Eigen::MatrixXd::Zero(1, 4 * cfg.dim);
    l.w2 = Eigen::MatrixXd::Zero(4 * cfg.dim, cfg.dim);
    l.b2 = Eigen::MatrixXd::Zero(1, cfg.dim);
  }
  std::int64_t count = read_i64();
  if (count != p.parameter_count()) throw ValidationError(path + ": parameter count mismatch");
  Eigen::VectorXd flat(count);
  in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(count * 8));
  if (!in) throw ValidationError(path + ": truncated checkpoint payload");
  p.from_flat(flat);
  return {cfg, p};
}

}  // namespace tagcl
