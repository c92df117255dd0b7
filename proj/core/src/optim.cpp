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

#include "tagcl/optim.hpp"

#include <cmath>

#include "tagcl/graph.hpp"

namespace tagcl {

Adam::Adam(Eigen::Index size, const AdamConfig& cfg) : cfg_(cfg) {
  if (size < 1) throw ValidationError("adam: empty parameter vector");
  if (!(cfg.learning_rate >= 0.0)) throw ValidationError("adam: learning rate must not be negative");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
    throw ValidationError("adam: betas must be in [0, 1)");
  if (!(cfg.epsilon > 0.0)) throw ValidationError("adam: epsilon must be positive");
  m_ = Eigen::VectorXd::Zero(size);
  v_ = Eigen::VectorXd::Zero(size);
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw ValidationError("adam: size mismatch");
  if (!grad.allFinite()) throw NumericalError("adam: non-finite gradient");
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params -= (cfg_.learning_rate / bc1) *
            (m_.array() / ((v_.array() / bc2).sqrt() + cfg_.epsilon)).matrix();
  if (!params.allFinite()) throw NumericalError("adam: parameters became non-finite");
}

}  // namespace tagcl
