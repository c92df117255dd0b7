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

#ifndef TAGCL_AUTODIFF_HPP_
#define TAGCL_AUTODIFF_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

namespace tagcl::ad {

class Tape;

// Handle to a tape node. Cheap to copy; values live on the tape.
class Var {
 public:
  Var() = default;
  const Eigen::MatrixXd& value() const;
  const Eigen::MatrixXd& grad() const;
  bool valid() const { return tape_ != nullptr; }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape over dense double matrices. Operations append nodes; a
// node only references earlier nodes, so creation order is a topological
// order and backward() is a single reverse scan.
//
// The op set is deliberately small: exactly what the nested encoder and the
// contrastive objectives need. Anything discrete (which rows to gather, which
// negatives survived selection, a shuffle permutation) is decided by the
// caller before the op is recorded and is invisible to the tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Eigen::MatrixXd value);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var cmul(Var a, Var b);                              // elementwise product
  Var scale(Var a, double s);
  Var add_scaled(Var a, double ca, Var b, double cb);  // ca*a + cb*b

  Var matmul(Var a, Var b);     // a * b
  Var matmul_nt(Var a, Var b);  // a * b^T

  // Row id -1 produces a zero row and routes no gradient (pad and summary
  // slots that carry only a positional embedding).
  Var gather_rows(Var table, std::vector<int> ids);
  Var row(Var m, int i);
  Var mean_rows(Var m, int first, int last);  // inclusive row range, 1 x cols
  Var add_rowvec(Var m, Var r);
  Var add_to_row(Var m, int i, Var r);

  Var row_softmax(Var a);
  Var square(Var a);
  Var dot(Var a, Var b);             // <a, b> as a 1x1 var
  Var mul_scalar_var(Var a, Var s);  // s is 1x1
  Var add_many(const std::vector<Var>& vs);
  Var mean_vars(const std::vector<Var>& vs);

  // Accumulates adjoints of every node reachable from root (id order), with
  // d root / d root = 1. root must be 1x1. Grads from a previous backward()
  // call on the same tape are discarded.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Var;
  struct Node {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    std::function<void(Tape&, const Eigen::MatrixXd&)> back;  // pulls grad into parents
  };

  Var push(Eigen::MatrixXd value, std::function<void(Tape&, const Eigen::MatrixXd&)> back);
  Eigen::MatrixXd& grad_of(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }
  const Eigen::MatrixXd& value_of(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  void check_owned(Var v) const;

  std::vector<Node> nodes_;
};

}  // namespace tagcl::ad

#endif  // TAGCL_AUTODIFF_HPP_
