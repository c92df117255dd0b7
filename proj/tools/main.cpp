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

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tagcl/datagen.hpp"
#include "tagcl/encoder.hpp"
#include "tagcl/eval.hpp"
#include "tagcl/graph.hpp"
#include "tagcl/kv.hpp"
#include "tagcl/objectives.hpp"
#include "tagcl/rng.hpp"
#include "tagcl/trainer.hpp"
#include "tagcl/verify.hpp"

namespace fs = std::filesystem;

namespace {

// The merged settings of every command: dataset generation, encoder training,
// probing and evaluation. Loaded from a key=value file, overridden by flags,
// and serialized verbatim into each run directory, so a run is reproducible
// from its emitted config plus nothing else.
struct RunConfig {
  std::uint64_t seed = 1;
  tagcl::GenConfig gen;
  tagcl::TrainerConfig trainer;
  tagcl::ProbeConfig probe;
  int eval_negatives = 50;
  int ndcg_cutoff = 0;
};

void sync_seeds(RunConfig& rc) {
  rc.gen.seed = rc.seed;
  rc.trainer.seed = rc.seed;
  rc.probe.seed = rc.seed;
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw tagcl::ValidationError(key + ": expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw tagcl::ValidationError(key + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw tagcl::ValidationError(key + ": expected an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw tagcl::ValidationError(key + ": expected true/false, got '" + v + "'");
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct KeySpec {
  std::string name;
  std::function<std::string(RunConfig)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Ref>
KeySpec int_key(const char* name, Ref ref) {
  return {name, [ref](RunConfig rc) { return std::to_string(ref(rc)); },
          [ref, n = std::string(name)](RunConfig& rc, const std::string& v) {
            ref(rc) = parse_int(n, v);
          }};
}

template <typename Ref>
KeySpec double_key(const char* name, Ref ref) {
  return {name, [ref](RunConfig rc) { return fmt_double(ref(rc)); },
          [ref, n = std::string(name)](RunConfig& rc, const std::string& v) {
            ref(rc) = parse_double(n, v);
          }};
}

template <typename Ref>
KeySpec bool_key(const char* name, Ref ref) {
  return {name, [ref](RunConfig rc) { return ref(rc) ? std::string("true") : std::string("false"); },
          [ref, n = std::string(name)](RunConfig& rc, const std::string& v) {
            ref(rc) = parse_bool(n, v);
          }};
}

template <typename Ref>
KeySpec u64_key(const char* name, Ref ref) {
  return {name, [ref](RunConfig rc) { return std::to_string(ref(rc)); },
          [ref, n = std::string(name)](RunConfig& rc, const std::string& v) {
            ref(rc) = parse_u64(n, v);
          }};
}

#define TAGCL_REF(expr) [](RunConfig& rc) -> decltype((expr))& { return expr; }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> keys = {
      u64_key("seed", TAGCL_REF(rc.seed)),
      // dataset generation
      int_key("nodes", TAGCL_REF(rc.gen.nodes)),
      int_key("communities", TAGCL_REF(rc.gen.communities)),
      double_key("p_in", TAGCL_REF(rc.gen.p_in)),
      double_key("p_out", TAGCL_REF(rc.gen.p_out)),
      int_key("tokens_per_node", TAGCL_REF(rc.gen.tokens_per_node)),
      int_key("vocab_per_community", TAGCL_REF(rc.gen.vocab_per_community)),
      double_key("shared_vocab_fraction", TAGCL_REF(rc.gen.shared_vocab_fraction)),
      // encoder and trainer
      int_key("dim", TAGCL_REF(rc.trainer.dim)),
      int_key("layers", TAGCL_REF(rc.trainer.layers)),
      int_key("max_seq_len", TAGCL_REF(rc.trainer.max_seq_len)),
      double_key("learning_rate", TAGCL_REF(rc.trainer.learning_rate)),
      int_key("batch_size", TAGCL_REF(rc.trainer.batch_size)),
      int_key("epochs", TAGCL_REF(rc.trainer.max_epochs)),
      int_key("patience", TAGCL_REF(rc.trainer.patience)),
      double_key("train_frac", TAGCL_REF(rc.trainer.train_frac)),
      double_key("val_frac", TAGCL_REF(rc.trainer.val_frac)),
      double_key("train_fraction", TAGCL_REF(rc.trainer.train_fraction)),
      double_key("ppr_alpha", TAGCL_REF(rc.trainer.ppr_alpha)),
      int_key("neighbor_cap", TAGCL_REF(rc.trainer.neighbor_cap)),
      int_key("val_negatives", TAGCL_REF(rc.trainer.val_negatives)),
      // objective
      double_key("alpha", TAGCL_REF(rc.trainer.objective.alpha)),
      double_key("lambda_tc", TAGCL_REF(rc.trainer.objective.weights.tc)),
      double_key("lambda_nc", TAGCL_REF(rc.trainer.objective.weights.nc)),
      double_key("lambda_sc", TAGCL_REF(rc.trainer.objective.weights.sc)),
      double_key("lambda_tnc", TAGCL_REF(rc.trainer.objective.weights.tnc)),
      double_key("lambda_nsc", TAGCL_REF(rc.trainer.objective.weights.nsc)),
      double_key("select_ratio", TAGCL_REF(rc.trainer.objective.select_ratio)),
      bool_key("keep_most_similar", TAGCL_REF(rc.trainer.objective.keep_most_similar)),
      double_key("tau_epsilon", TAGCL_REF(rc.trainer.objective.tau_epsilon)),
      double_key("mix_beta_min", TAGCL_REF(rc.trainer.objective.mix_beta_min)),
      double_key("mix_beta_max", TAGCL_REF(rc.trainer.objective.mix_beta_max)),
      int_key("span_min", TAGCL_REF(rc.trainer.objective.span_min)),
      int_key("span_max", TAGCL_REF(rc.trainer.objective.span_max)),
      int_key("subgraph_k", TAGCL_REF(rc.trainer.objective.subgraph_k)),
      // probe
      int_key("probe_hidden_dim", TAGCL_REF(rc.probe.hidden_dim)),
      int_key("probe_epochs", TAGCL_REF(rc.probe.epochs)),
      double_key("probe_learning_rate", TAGCL_REF(rc.probe.learning_rate)),
      // evaluation
      int_key("eval_negatives", TAGCL_REF(rc.eval_negatives)),
      int_key("ndcg_cutoff", TAGCL_REF(rc.ndcg_cutoff)),
  };
  return keys;
}

#undef TAGCL_REF

const KeySpec* find_key(const std::string& name) {
  for (const KeySpec& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

void set_key(RunConfig& rc, const std::string& name, const std::string& value,
             const std::string& source) {
  const KeySpec* k = find_key(name);
  if (!k) throw tagcl::ValidationError(source + ": unknown config key '" + name + "'");
  k->set(rc, value);
}

// Keys a run directory's resolved config carries on top of the table.
bool is_extra_key(const std::string& name) { return name == "command" || name == "graph"; }

void apply_kv(RunConfig& rc, const tagcl::KvEntries& entries, const std::string& source) {
  for (const auto& [k, v] : entries) {
    if (is_extra_key(k)) continue;
    set_key(rc, k, v, source);
  }
}

tagcl::KvEntries serialize_config(const RunConfig& rc, const tagcl::KvEntries& extras) {
  tagcl::KvEntries out = extras;
  for (const KeySpec& k : key_table()) out.emplace_back(k.name, k.get(rc));
  return out;
}

// Shared flag state of one subcommand.
struct CmdCommon {
  std::string config_path;
  bool quiet = false;
  std::vector<std::pair<std::string, std::string>> overrides;  // flag order
};

void add_config_options(CLI::App* cmd, CmdCommon& c) {
  cmd->add_option("--config", c.config_path, "key=value config file, applied before flag overrides");
  cmd->add_flag("--quiet", c.quiet, "suppress stdout reports");
  RunConfig defaults;
  for (const KeySpec& k : key_table()) {
    cmd->add_option_function<std::string>(
        "--" + k.name,
        [&c, name = k.name](const std::string& v) { c.overrides.emplace_back(name, v); },
        "[default: " + k.get(defaults) + "]");
  }
}

RunConfig resolve_config(const CmdCommon& c) {
  RunConfig rc;
  if (!c.config_path.empty()) apply_kv(rc, tagcl::parse_kv_file(c.config_path), c.config_path);
  for (const auto& [k, v] : c.overrides) set_key(rc, k, v, "command line");
  sync_seeds(rc);
  return rc;
}

void require_fresh_dir(const fs::path& dir) {
  if (!fs::exists(dir)) return;
  if (!fs::is_directory(dir))
    throw tagcl::ValidationError(dir.string() + ": exists and is not a directory");
  if (!fs::is_empty(dir))
    throw tagcl::ValidationError(dir.string() +
                                 ": already populated; run directories are append-only");
}

std::string fresh_file(const fs::path& p) {
  if (fs::exists(p))
    throw tagcl::ValidationError(p.string() + ": already exists; run directories are append-only");
  return p.string();
}

void write_edge_file(const std::string& path, const std::vector<std::pair<int, int>>& edges) {
  std::ofstream out(path);
  if (!out) throw tagcl::ValidationError(path + ": cannot open file for writing");
  for (auto [u, v] : edges) out << u << " " << v << "\n";
}

std::vector<std::pair<int, int>> read_edge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tagcl::ValidationError(path + ": cannot open file");
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    int u = 0, v = 0;
    if (!(ss >> u >> v))
      throw tagcl::ValidationError(path + ":" + std::to_string(lineno) + ": expected 'u v'");
    edges.emplace_back(u, v);
  }
  return edges;
}

void print_kv(const tagcl::KvEntries& entries) {
  for (const auto& [k, v] : entries) std::cout << k << "=" << v << "\n";
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

// ---- subcommands ----

int cmd_gen(const CmdCommon& c, const std::string& out) {
  RunConfig rc = resolve_config(c);
  tagcl::TextAttributedGraph g = tagcl::generate_planted_tag(rc.gen);
  fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  tagcl::save_tag(g, out);
  tagcl::write_kv_file(out + ".meta", tagcl::gen_metadata(rc.gen, g));
  if (!c.quiet) {
    std::cout << "wrote " << out << " and " << out << ".meta\n";
    print_kv(tagcl::gen_metadata(rc.gen, g));
  }
  return 0;
}

void apply_ablate(RunConfig& rc, const std::vector<std::string>& ablate) {
  for (const std::string& a : ablate) {
    if (a == "tc") rc.trainer.objective.weights.tc = 0.0;
    else if (a == "nc") rc.trainer.objective.weights.nc = 0.0;
    else if (a == "sc") rc.trainer.objective.weights.sc = 0.0;
    else if (a == "tnc") rc.trainer.objective.weights.tnc = 0.0;
    else if (a == "nsc") rc.trainer.objective.weights.nsc = 0.0;
    else if (a == "hfc") rc.trainer.objective.alpha = 1.0;
    else throw tagcl::ValidationError("--ablate: unknown variant '" + a + "'");
  }
}

int cmd_train(const CmdCommon& c, const std::string& graph, const std::string& out,
              const std::vector<std::string>& ablate) {
  RunConfig rc = resolve_config(c);
  apply_ablate(rc, ablate);
  rc.trainer.quiet = c.quiet;
  tagcl::TextAttributedGraph g = tagcl::load_tag(graph);

  fs::path dir(out);
  require_fresh_dir(dir);  // fail before the expensive part

  tagcl::TrainResult res = tagcl::train(g, rc.trainer);

  require_fresh_dir(dir);
  fs::create_directories(dir);
  tagcl::write_kv_file((dir / "config.resolved").string(),
                       serialize_config(rc, {{"command", "train"}, {"graph", graph}}));
  tagcl::save_checkpoint((dir / "checkpoint.bin").string(), res.encoder_cfg, res.params);
  tagcl::write_history_csv((dir / "history.csv").string(), res.history);
  tagcl::save_tag(res.train_view, (dir / "train_view.tag").string());
  write_edge_file((dir / "edges_val.txt").string(), res.split.val);
  write_edge_file((dir / "edges_test.txt").string(), res.split.test);

  tagcl::KvEntries summary;
  summary.emplace_back("epochs_run", std::to_string(res.history.size()));
  summary.emplace_back("best_epoch", std::to_string(res.best_epoch));
  summary.emplace_back("best_val_p1", std::isnan(res.best_val_p_at_1)
                                           ? std::string("")
                                           : fmt_double(res.best_val_p_at_1));
  tagcl::write_kv_file((dir / "summary.txt").string(), summary);
  if (!c.quiet) {
    std::cout << "run directory " << out << "\n";
    print_kv(summary);
  }
  return 0;
}

int cmd_eval(const CmdCommon& c, const std::string& run, const std::string& task,
             const std::string& mode) {
  fs::path dir(run);
  fs::path cfg_path = dir / "config.resolved";
  if (!fs::exists(cfg_path))
    throw tagcl::ValidationError(run + ": no config.resolved (is this a run directory?)");
  tagcl::KvEntries stored = tagcl::parse_kv_file(cfg_path.string());

  std::string graph_path;
  for (const auto& [k, v] : stored) {
    if (k == "graph") graph_path = v;
  }

  RunConfig rc;
  apply_kv(rc, stored, cfg_path.string());
  if (!c.config_path.empty()) apply_kv(rc, tagcl::parse_kv_file(c.config_path), c.config_path);
  for (const auto& [k, v] : c.overrides) set_key(rc, k, v, "command line");
  sync_seeds(rc);

  fs::path ckpt = dir / "checkpoint.bin";
  if (!fs::exists(ckpt))
    throw tagcl::ValidationError(run + ": no checkpoint; train into this directory first");
  auto [ecfg, params] = tagcl::load_checkpoint(ckpt.string());
  tagcl::TextAttributedGraph view = tagcl::load_tag((dir / "train_view.tag").string());

  tagcl::KvEntries report;
  report.emplace_back("task", task);
  std::string out_name;

  if (task == "link") {
    out_name = "eval_link.txt";
    auto test_edges = read_edge_file((dir / "edges_test.txt").string());
    Eigen::MatrixXd emb = tagcl::encode_all_nodes(params, ecfg, view);
    tagcl::LinkEvalConfig lc;
    lc.negatives_per_query = rc.eval_negatives;
    lc.ndcg_cutoff = rc.ndcg_cutoff;
    tagcl::RngStream rng(tagcl::derive_seed(rc.seed, 0x6576616cULL));
    tagcl::LinkEvalResult lv = tagcl::link_prediction_eval(emb, test_edges, view.neighbors, lc, rng);
    report.emplace_back("queries", std::to_string(lv.metrics.queries));
    report.emplace_back("negatives_per_query", std::to_string(rc.eval_negatives));
    report.emplace_back("p_at_1", fmt_double(lv.metrics.precision_at_1));
    report.emplace_back("mrr", fmt_double(lv.metrics.mrr));
    report.emplace_back("ndcg", fmt_double(lv.metrics.ndcg));
  } else {
    out_name = "eval_node_" + mode + ".txt";
    if (!view.labels)
      throw tagcl::ValidationError("eval --task node: the graph carries no labels");
    const std::vector<int>& labels = *view.labels;
    tagcl::RngStream split_rng(tagcl::derive_seed(rc.seed, 0x7073706cULL));
    tagcl::ProbeSplit split = tagcl::stratified_split(labels, 0.7, 0.1, split_rng);

    Eigen::MatrixXd emb;
    if (mode == "transductive") {
      emb = tagcl::encode_all_nodes(params, ecfg, view);
    } else {
      // Re-train with the probe's test nodes cut out of the graph, so their
      // edges never influence the representation.
      if (graph_path.empty())
        throw tagcl::ValidationError(run + ": config.resolved lacks the graph path");
      tagcl::TextAttributedGraph g = tagcl::load_tag(graph_path);
      tagcl::TrainerConfig tc = rc.trainer;
      tc.quiet = c.quiet;
      tagcl::TrainResult res = tagcl::train(g, tc, split.test);
      emb = tagcl::encode_all_nodes(res.params, res.encoder_cfg, res.train_view);
    }
    tagcl::ProbeResult pr = tagcl::train_probe(emb, labels, split, rc.probe);
    report.emplace_back("mode", mode);
    report.emplace_back("classes", std::to_string(pr.classes));
    report.emplace_back("val_accuracy", fmt_double(pr.val_accuracy));
    report.emplace_back("test_accuracy", fmt_double(pr.test_accuracy));
  }

  tagcl::write_kv_file(fresh_file(dir / out_name), report);
  if (!c.quiet) print_kv(report);
  return 0;
}

int cmd_verify(const std::string& suite, int rank, double alpha, int graphs, int batches,
               int instances, int steps, int queries, std::uint64_t seed, const std::string& out,
               bool quiet) {
  std::vector<std::string> chosen;
  if (suite == "all") {
    chosen = {"loss_equivalence", "spectral", "ppr", "gradients", "lemma1", "metrics"};
  } else {
    chosen = {suite};
  }
  std::string text;
  bool all_pass = true;
  for (const std::string& s : chosen) {
    tagcl::VerifyReport rep;
    if (s == "loss_equivalence") rep = tagcl::verify_loss_equivalence(batches, seed);
    else if (s == "spectral") rep = tagcl::verify_spectral(graphs, seed);
    else if (s == "ppr") rep = tagcl::verify_ppr(graphs, seed);
    else if (s == "gradients") rep = tagcl::verify_gradients(instances, seed);
    else if (s == "lemma1") rep = tagcl::verify_lemma1_suite(graphs, rank, steps, seed, alpha);
    else if (s == "metrics") rep = tagcl::verify_metrics(queries, seed);
    else throw tagcl::ValidationError("verify: unknown suite '" + s + "'");
    text += tagcl::render_report(rep);
    all_pass = all_pass && rep.pass();
  }
  if (!quiet) std::cout << text;
  if (!out.empty()) {
    std::ofstream f(fresh_file(out));
    if (!f) throw tagcl::ValidationError(out + ": cannot open file for writing");
    f << text;
  }
  return all_pass ? 0 : 2;
}

int cmd_sweep(const CmdCommon& c, const std::string& graph, const std::string& out,
              const std::string& param, const std::string& values_csv, int seeds) {
  RunConfig base = resolve_config(c);
  if (!find_key(param)) throw tagcl::ValidationError("sweep: unknown parameter '" + param + "'");
  if (param == "seed")
    throw tagcl::ValidationError("sweep: the seed axis is implicit; sweep another parameter");
  std::vector<std::string> values = split_list(values_csv);
  if (values.empty()) throw tagcl::ValidationError("sweep: --values is empty");
  if (seeds < 1) throw tagcl::ValidationError("sweep: --seeds must be positive");

  tagcl::TextAttributedGraph g = tagcl::load_tag(graph);
  fs::path dir(out);
  require_fresh_dir(dir);

  std::ostringstream table;
  table << "param,value,seed,epochs,best_epoch,val_p1,p_at_1,mrr,ndcg,probe_accuracy\n";
  for (const std::string& value : values) {
    for (int s = 0; s < seeds; ++s) {
      RunConfig rc = base;
      set_key(rc, param, value, "sweep");
      rc.seed = base.seed + static_cast<std::uint64_t>(s);
      sync_seeds(rc);
      rc.trainer.quiet = true;

      tagcl::TrainResult res = tagcl::train(g, rc.trainer);
      Eigen::MatrixXd emb = tagcl::encode_all_nodes(res.params, res.encoder_cfg, res.train_view);

      tagcl::LinkEvalConfig lc;
      lc.negatives_per_query = rc.eval_negatives;
      lc.ndcg_cutoff = rc.ndcg_cutoff;
      tagcl::RngStream rng(tagcl::derive_seed(rc.seed, 0x6576616cULL));
      tagcl::LinkEvalResult lv =
          tagcl::link_prediction_eval(emb, res.split.test, res.train_view.neighbors, lc, rng);

      std::string probe_acc;
      if (g.labels) {
        tagcl::ProbeResult pr = tagcl::node_classification_probe(emb, *g.labels, rc.probe);
        probe_acc = fmt_double(pr.test_accuracy);
      }

      table << param << "," << value << "," << rc.seed << "," << res.history.size() << ","
            << res.best_epoch << ","
            << (std::isnan(res.best_val_p_at_1) ? std::string() : fmt_double(res.best_val_p_at_1))
            << "," << fmt_double(lv.metrics.precision_at_1) << "," << fmt_double(lv.metrics.mrr)
            << "," << fmt_double(lv.metrics.ndcg) << "," << probe_acc << "\n";
    }
  }

  require_fresh_dir(dir);
  fs::create_directories(dir);
  tagcl::write_kv_file((dir / "config.resolved").string(),
                       serialize_config(base, {{"command", "sweep"},
                                               {"graph", graph},
                                               {"param", param},
                                               {"values", values_csv},
                                               {"seeds", std::to_string(seeds)}}));
  std::ofstream f((dir / "table.csv").string());
  if (!f) throw tagcl::ValidationError(out + ": cannot open table.csv for writing");
  f << table.str();
  if (!c.quiet) std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tagcl: hierarchical contrastive learning on text-attributed graphs"};
  app.require_subcommand(1);

  CmdCommon gen_c, train_c, eval_c, sweep_c;

  CLI::App* gen = app.add_subcommand("gen", "generate a planted text-attributed graph");
  add_config_options(gen, gen_c);
  std::string gen_out;
  gen->add_option("--out", gen_out, "output .tag path (metadata sidecar: <out>.meta)")->required();

  CLI::App* train = app.add_subcommand("train", "train the encoder on a graph");
  add_config_options(train, train_c);
  std::string train_graph, train_out;
  std::vector<std::string> train_ablate;
  train->add_option("--graph", train_graph, "input .tag file")->required();
  train->add_option("--out", train_out, "fresh run directory")->required();
  train->add_option("--ablate", train_ablate,
                    "zero one loss term (tc|nc|sc|tnc|nsc) or force alpha=1 (hfc); repeatable")
      ->delimiter(',');

  CLI::App* eval = app.add_subcommand("eval", "evaluate a trained run directory");
  add_config_options(eval, eval_c);
  std::string eval_run, eval_task = "link", eval_mode = "transductive";
  eval->add_option("--run", eval_run, "run directory produced by train")->required();
  eval->add_option("--task", eval_task, "link or node")
      ->check(CLI::IsMember({"link", "node"}));
  eval->add_option("--mode", eval_mode, "node task only: transductive or inductive")
      ->check(CLI::IsMember({"transductive", "inductive"}));

  CLI::App* verify = app.add_subcommand("verify", "run self-check suites against oracles");
  std::string verify_suite, verify_out;
  bool verify_quiet = false;
  int verify_k = 3, verify_graphs = 20, verify_batches = 1000, verify_instances = 10,
      verify_steps = 5000, verify_queries = 100;
  double verify_alpha = -1.0;
  std::uint64_t verify_seed = 1;
  verify->add_option("--suite", verify_suite, "spectral|ppr|gradients|lemma1|metrics|loss_equivalence|all")
      ->required()
      ->check(CLI::IsMember(
          {"spectral", "ppr", "gradients", "lemma1", "metrics", "loss_equivalence", "all"}));
  verify->add_option("--k", verify_k, "factor rank for the lemma1 suite [default: 3]");
  verify->add_option("--alpha", verify_alpha,
                     "pin the lemma1 alpha; negative cycles {0.25,0.5,0.75} [default: -1]");
  verify->add_option("--graphs", verify_graphs, "graphs per graph-based suite [default: 20]");
  verify->add_option("--batches", verify_batches, "loss_equivalence batches [default: 1000]");
  verify->add_option("--instances", verify_instances,
                     "gradient-check instances per loss term [default: 10]");
  verify->add_option("--steps", verify_steps, "lemma1 descent step budget [default: 5000]");
  verify->add_option("--queries", verify_queries, "metric-suite query sets [default: 100]");
  verify->add_option("--seed", verify_seed, "suite seed [default: 1]");
  verify->add_option("--out", verify_out, "also write the report to this new file");
  verify->add_flag("--quiet", verify_quiet, "suppress stdout report");

  CLI::App* sweep = app.add_subcommand("sweep", "rerun train+eval over one parameter axis");
  add_config_options(sweep, sweep_c);
  std::string sweep_graph, sweep_out, sweep_param, sweep_values;
  int sweep_seeds = 3;
  sweep->add_option("--graph", sweep_graph, "input .tag file")->required();
  sweep->add_option("--out", sweep_out, "fresh output directory for table.csv")->required();
  sweep->add_option("--param", sweep_param, "config key to vary (e.g. train_fraction, epochs, neighbor_cap, alpha)")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--seeds", sweep_seeds, "seeds per value: seed, seed+1, ... [default: 3]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_c, gen_out);
    if (train->parsed()) return cmd_train(train_c, train_graph, train_out, train_ablate);
    if (eval->parsed()) return cmd_eval(eval_c, eval_run, eval_task, eval_mode);
    if (verify->parsed())
      return cmd_verify(verify_suite, verify_k, verify_alpha, verify_graphs, verify_batches,
                        verify_instances, verify_steps, verify_queries, verify_seed, verify_out,
                        verify_quiet);
    if (sweep->parsed())
      return cmd_sweep(sweep_c, sweep_graph, sweep_out, sweep_param, sweep_values, sweep_seeds);
  } catch (const tagcl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tagcl::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
