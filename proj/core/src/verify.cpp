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

#include "tagcl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tagcl/datagen.hpp"
#include "tagcl/eval.hpp"
#include "tagcl/objectives.hpp"
#include "tagcl/ppr.hpp"
#include "tagcl/rng.hpp"
#include "tagcl/spectral.hpp"
#include "tagcl/trainer.hpp"

namespace tagcl {
namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

CheckLine bound_check(const std::string& name, double value, double bound) {
  CheckLine c;
  c.name = name;
  c.pass = value <= bound;
  c.detail = fmt(value) + " <= " + fmt(bound);
  return c;
}

// Tree spine plus independent extra edges: connected, no isolated nodes.
Eigen::MatrixXd random_connected_adjacency(int n, double extra_p, RngStream& rng) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  auto link = [&](int u, int v) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  };
  for (int v = 1; v < n; ++v) link(v, rng.uniform_int(0, v - 1));
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (a(u, v) == 0.0 && rng.bernoulli(extra_p)) link(u, v);
  return a;
}

ContrastBatch random_batch(RngStream& rng) {
  int dim = rng.uniform_int(2, 16);
  int m = rng.uniform_int(1, 8);
  ContrastBatch b;
  auto rand_vec = [&]() {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.uniform(-1.0, 1.0);
    return v;
  };
  for (int i = 0; i < m; ++i) {
    b.anchors.push_back(rand_vec());
    b.positives.push_back(rand_vec());
    int k = rng.uniform_int(1, 5);
    std::vector<Eigen::VectorXd> negs;
    for (int j = 0; j < k; ++j) negs.push_back(rand_vec());
    b.negatives.push_back(std::move(negs));
  }
  return b;
}

}  // namespace

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

std::string render_report(const VerifyReport& r) {
  std::ostringstream out;
  out << "suite: " << r.suite << "\n";
  for (const auto& c : r.checks)
    out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << "  " << c.detail << "\n";
  out << "overall: " << (r.pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

VerifyReport verify_loss_equivalence(int batches, std::uint64_t seed) {
  if (batches < 1) throw ValidationError("verify: batches must be positive");
  VerifyReport rep;
  rep.suite = "loss_equivalence";
  double max_diff = 0.0;
  double max_tape_diff = 0.0;
  for (int t = 0; t < batches; ++t) {
    RngStream rng(derive_seed(seed, 0x6c6f7373ULL, static_cast<std::uint64_t>(t)));
    ContrastBatch b = random_batch(rng);
    double diff = std::abs(hfc_loss(b, 1.0) - spectral_loss(b));
    max_diff = std::max(max_diff, diff);
    if (t < 200) {
      double alpha = rng.uniform(0.05, 1.0);
      ad::Tape tape;
      TapeBatch tb;
      for (std::size_t i = 0; i < b.anchors.size(); ++i) {
        tb.anchors.push_back(tape.leaf(b.anchors[i].transpose()));
        tb.positives.push_back(tape.leaf(b.positives[i].transpose()));
        std::vector<ad::Var> negs;
        for (const auto& nv : b.negatives[i]) negs.push_back(tape.leaf(nv.transpose()));
        tb.negatives.push_back(std::move(negs));
      }
      double on_tape = hfc_loss_on_tape(tape, tb, alpha).value()(0, 0);
      max_tape_diff = std::max(max_tape_diff, std::abs(on_tape - hfc_loss(b, alpha)));
    }
  }
  rep.checks.push_back(bound_check("hfc_at_alpha1_vs_spectral_max_abs_diff", max_diff, 1e-15));
  rep.checks.push_back(bound_check("tape_vs_closed_form_max_abs_diff", max_tape_diff, 1e-12));
  return rep;
}

VerifyReport verify_lemma1_suite(int graphs, int rank, int max_steps, std::uint64_t seed,
                                 double alpha_override) {
  if (graphs < 1) throw ValidationError("verify: graphs must be positive");
  if (alpha_override > 1.0) throw ValidationError("verify: alpha must be at most 1");
  VerifyReport rep;
  rep.suite = "lemma1";
  const double alphas[] = {0.25, 0.5, 0.75};
  for (int t = 0; t < graphs; ++t) {
    RngStream rng(derive_seed(seed, 0x6c31ULL, static_cast<std::uint64_t>(t)));
    GenConfig gc;
    gc.nodes = rng.uniform_int(9, 12);
    gc.communities = 3;
    gc.p_in = 0.9;
    gc.p_out = 0.05;
    gc.tokens_per_node = 2;
    gc.vocab_per_community = 4;
    gc.seed = rng.next_u64();
    TextAttributedGraph g = generate_planted_tag(gc);
    double alpha = alpha_override >= 0.0 ? alpha_override : alphas[t % 3];
    Lemma1Report r = verify_lemma1(build_matrices(g), alpha, rank, max_steps, rng.next_u64());

    CheckLine res;
    res.name = "residual_matches_oracle_g" + std::to_string(t);
    res.pass = r.descent_residual <= 1.05 * r.oracle_residual + 1e-9;
    res.detail = "alpha=" + fmt(alpha) + " n=" + std::to_string(r.nodes) + " descent=" +
                 fmt(r.descent_residual) + " oracle=" + fmt(r.oracle_residual) + " ratio=" +
                 fmt(r.ratio);
    rep.checks.push_back(res);

    if (r.eigengap >= 0.1) {
      CheckLine ang;
      ang.name = "eigenspace_angle_g" + std::to_string(t);
      ang.pass = r.principal_angle < 0.05;
      ang.detail = "angle=" + fmt(r.principal_angle) + " rad, gap=" + fmt(r.eigengap);
      rep.checks.push_back(ang);
    }
  }
  return rep;
}

VerifyReport verify_gradients(int instances_per_term, std::uint64_t seed) {
  GradCheckReport g = check_gradients(instances_per_term, seed);
  VerifyReport rep;
  rep.suite = "gradients";
  for (const auto& t : g.terms) {
    CheckLine c = bound_check(t.name + "_max_rel_err", t.max_rel_err, 1e-4);
    c.detail += " (" + std::to_string(t.instances) + " instances, " +
                std::to_string(t.coordinates) + " coordinates)";
    rep.checks.push_back(c);
  }
  return rep;
}

VerifyReport verify_ppr(int graphs, std::uint64_t seed) {
  if (graphs < 1) throw ValidationError("verify: graphs must be positive");
  VerifyReport rep;
  rep.suite = "ppr";
  double max_dev = 0.0;
  double max_row_sum_dev = 0.0;
  for (int t = 0; t < graphs; ++t) {
    RngStream rng(derive_seed(seed, 0x707072ULL, static_cast<std::uint64_t>(t)));
    int n = rng.uniform_int(5, 50);
    double alpha = rng.uniform(0.05, 0.95);
    GraphMatrices gm = build_matrices_from_adjacency(random_connected_adjacency(n, 0.1, rng));
    PprScores direct = ppr_importance(gm, alpha);
    Eigen::MatrixXd powered = ppr_power_iteration(gm, alpha, 200);
    max_dev = std::max(max_dev, (direct.scores - powered).cwiseAbs().maxCoeff());
    max_row_sum_dev = std::max(
        max_row_sum_dev,
        (direct.scores.rowwise().sum() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff());
  }
  rep.checks.push_back(bound_check("direct_vs_power200_max_abs_dev", max_dev, 1e-8));
  rep.checks.push_back(bound_check("row_sum_max_abs_dev", max_row_sum_dev, 1e-8));
  return rep;
}

VerifyReport verify_spectral(int graphs, std::uint64_t seed) {
  if (graphs < 1) throw ValidationError("verify: graphs must be positive");
  VerifyReport rep;
  rep.suite = "spectral";
  double max_ortho = 0.0;
  double max_recon = 0.0;
  for (int t = 0; t < graphs; ++t) {
    RngStream rng(derive_seed(seed, 0x73706563ULL, static_cast<std::uint64_t>(t)));
    int n = rng.uniform_int(2, 30);
    GraphMatrices gm = build_matrices_from_adjacency(
        random_connected_adjacency(n, rng.uniform(0.05, 0.6), rng));
    SpectralDecomposition d = eigendecompose(gm.sym_laplacian);
    max_ortho = std::max(max_ortho, (d.eigenvectors.transpose() * d.eigenvectors -
                                     Eigen::MatrixXd::Identity(n, n))
                                        .cwiseAbs()
                                        .maxCoeff());
    max_recon = std::max(
        max_recon, (d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.transpose() -
                    gm.sym_laplacian)
                       .cwiseAbs()
                       .maxCoeff());
  }
  rep.checks.push_back(bound_check("orthonormality_max_dev", max_ortho, 1e-8));
  rep.checks.push_back(bound_check("reconstruction_max_dev", max_recon, 1e-8));

  // Path on three nodes: normalized laplacian spectrum {0, 1, 2}.
  Eigen::MatrixXd p3 = Eigen::MatrixXd::Zero(3, 3);
  p3(0, 1) = p3(1, 0) = p3(1, 2) = p3(2, 1) = 1.0;
  SpectralDecomposition dp = eigendecompose(build_matrices_from_adjacency(p3).sym_laplacian);
  double p3_dev = std::max({std::abs(dp.eigenvalues(0) - 0.0), std::abs(dp.eigenvalues(1) - 1.0),
                            std::abs(dp.eigenvalues(2) - 2.0)});
  rep.checks.push_back(bound_check("path3_spectrum_dev", p3_dev, 1e-9));

  // Triangle: {0, 1.5, 1.5}.
  Eigen::MatrixXd k3 = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
  SpectralDecomposition dk = eigendecompose(build_matrices_from_adjacency(k3).sym_laplacian);
  double k3_dev = std::max({std::abs(dk.eigenvalues(0) - 0.0), std::abs(dk.eigenvalues(1) - 1.5),
                            std::abs(dk.eigenvalues(2) - 1.5)});
  rep.checks.push_back(bound_check("triangle_spectrum_dev", k3_dev, 1e-9));
  return rep;
}

VerifyReport verify_metrics(int query_sets, std::uint64_t seed) {
  if (query_sets < 1) throw ValidationError("verify: query_sets must be positive");
  VerifyReport rep;
  rep.suite = "metrics";
  int rank_mismatches = 0;
  int metric_mismatches = 0;
  for (int t = 0; t < query_sets; ++t) {
    RngStream rng(derive_seed(seed, 0x6d657472ULL, static_cast<std::uint64_t>(t)));
    int nq = rng.uniform_int(1, 20);
    int dim = rng.uniform_int(2, 6);
    int cutoff = rng.uniform_int(0, 10);
    std::vector<int> ranks;
    // Brute-force accumulators, recomputed from scratch.
    double p1 = 0.0, mrr = 0.0, ndcg = 0.0;
    for (int q = 0; q < nq; ++q) {
      auto rand_vec = [&]() {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = rng.uniform(-1.0, 1.0);
        return v;
      };
      Eigen::VectorXd query = rand_vec();
      Eigen::VectorXd target = rand_vec();
      int k = rng.uniform_int(0, 60);
      std::vector<Eigen::VectorXd> negs;
      for (int j = 0; j < k; ++j) {
        // Duplicate some negatives on purpose so score ties really occur.
        if (!negs.empty() && rng.bernoulli(0.2))
          negs.push_back(negs[static_cast<std::size_t>(rng.uniform_int(
              0, static_cast<int>(negs.size()) - 1))]);
        else
          negs.push_back(rand_vec());
      }
      int r = pessimistic_rank(query, target, negs);
      // Oracle: sort every score descending and take the worst slot whose
      // score still ties or beats the target.
      std::vector<double> scores;
      scores.push_back(query.dot(target));
      for (const auto& nv : negs) scores.push_back(query.dot(nv));
      double truth = scores[0];
      std::sort(scores.begin(), scores.end(), std::greater<double>());
      int oracle = 0;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] >= truth) oracle = static_cast<int>(i) + 1;
      }
      if (r != oracle) ++rank_mismatches;
      ranks.push_back(r);
      p1 += (r == 1) ? 1.0 : 0.0;
      mrr += 1.0 / static_cast<double>(r);
      if (cutoff == 0 || r <= cutoff) ndcg += 1.0 / std::log2(1.0 + static_cast<double>(r));
    }
    RankMetrics m = rank_metrics(ranks, cutoff);
    if (m.precision_at_1 != p1 / nq || m.mrr != mrr / nq || m.ndcg != ndcg / nq)
      ++metric_mismatches;
  }
  CheckLine r1;
  r1.name = "rank_vs_sort_oracle_mismatches";
  r1.pass = rank_mismatches == 0;
  r1.detail = std::to_string(rank_mismatches) + " of " + std::to_string(query_sets) + " sets";
  rep.checks.push_back(r1);
  CheckLine r2;
  r2.name = "metrics_vs_bruteforce_mismatches";
  r2.pass = metric_mismatches == 0;
  r2.detail = std::to_string(metric_mismatches) + " of " + std::to_string(query_sets) + " sets";
  rep.checks.push_back(r2);
  return rep;
}

}  // namespace tagcl
