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

#ifndef TAGCL_VERIFY_HPP_
#define TAGCL_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace tagcl {

// Self-check suites. Each one pits the production implementation against an
// independent route to the same quantity (closed form, brute force, power
// iteration, finite differences) and reports per-check outcomes. The CLI
// verify command and the acceptance tests both run these.
struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckLine> checks;
  bool pass() const;
};

std::string render_report(const VerifyReport& r);

// hfc loss at alpha = 1 against the plain spectral contrastive loss, and the
// tape loss against the closed-form one, over random batches.
VerifyReport verify_loss_equivalence(int batches, std::uint64_t seed);

// Free-factor gradient descent against the eigendecomposition optimum of
// || kernel - F F^T ||_F^2 on planted graphs. A negative alpha_override cycles
// through {0.25, 0.5, 0.75}; any value in [0, 1] pins every graph to it.
VerifyReport verify_lemma1_suite(int graphs, int rank, int max_steps, std::uint64_t seed,
                                 double alpha_override = -1.0);

// Tape gradients against central differences for all five loss terms.
VerifyReport verify_gradients(int instances_per_term, std::uint64_t seed);

// Direct importance solve against 200 power-iteration steps; row-sum check.
VerifyReport verify_ppr(int graphs, std::uint64_t seed);

// Eigendecomposition invariants on random graphs plus analytic spectra of the
// 3-path and the triangle.
VerifyReport verify_spectral(int graphs, std::uint64_t seed);

// Competition ranks against a sort-based oracle and the aggregate metrics
// against a brute-force recomputation.
VerifyReport verify_metrics(int query_sets, std::uint64_t seed);

}  // namespace tagcl

#endif  // TAGCL_VERIFY_HPP_
