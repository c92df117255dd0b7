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

#ifndef TAGCL_OPTIM_HPP_
#define TAGCL_OPTIM_HPP_

#include <Eigen/Dense>

namespace tagcl {

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction (Kingma, Ba 2015) over a flat parameter vector.
class Adam {
 public:
  explicit Adam(Eigen::Index size, const AdamConfig& cfg = {});
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace tagcl

#endif  // TAGCL_OPTIM_HPP_
