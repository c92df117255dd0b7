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

#include "tagcl/autodiff.hpp"

#include <stdexcept>
#include <utility>

#include "tagcl/graph.hpp"

namespace tagcl::ad {

const Eigen::MatrixXd& Var::value() const {
  if (!valid()) throw std::logic_error("Var::value on an empty handle");
  return tape_->value_of(id_);
}

const Eigen::MatrixXd& Var::grad() const {
  if (!valid()) throw std::logic_error("Var::grad on an empty handle");
  return tape_->grad_of(id_);
}

void Tape::check_owned(Var v) const {
  if (v.tape_ != this) throw std::logic_error("Var belongs to a different tape");
}

Var Tape::push(Eigen::MatrixXd value, std::function<void(Tape&, const Eigen::MatrixXd&)> back) {
  Node n;
  n.value = std::move(value);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::leaf(Eigen::MatrixXd value) { return push(std::move(value), nullptr); }

Var Tape::add(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  int ia = a.id_, ib = b.id_;
  if (value_of(ia).rows() != value_of(ib).rows() || value_of(ia).cols() != value_of(ib).cols())
    throw ValidationError("add: shape mismatch");
  return push(value_of(ia) + value_of(ib), [ia, ib](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(ia) += g;
    t.grad_of(ib) += g;
  });
}

Var Tape::sub(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  int ia = a.id_, ib = b.id_;
  if (value_of(ia).rows() != value_of(ib).rows() || value_of(ia).cols() != value_of(ib).cols())
    throw ValidationError("sub: shape mismatch");
  return push(value_of(ia) - value_of(ib), [ia, ib](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(ia) += g;
    t.grad_of(ib) -= g;
  });
}

Var Tape::cmul(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  int ia = a.id_, ib = b.id_;
  if (value_of(ia).rows() != value_of(ib).rows() || value_of(ia).cols() != value_of(ib).cols())
    throw ValidationError("cmul: shape mismatch");
  return push(value_of(ia).cwiseProduct(value_of(ib)),
              [ia, ib](Tape& t, const Eigen::MatrixXd& g) {
                t.grad_of(ia) += g.cwiseProduct(t.value_of(ib));
                t.grad_of(ib) += g.cwiseProduct(t.value_of(ia));
              });
}

Var Tape::scale(Var a, double s) {
  check_owned(a);
  int ia = a.id_;
  return push(s * value_of(ia),
              [ia, s](Tape& t, const Eigen::MatrixXd& g) { t.grad_of(ia) += s * g; });
}

Var Tape::add_scaled(Var a, double ca, Var b, double cb) {
  check_owned(a);
  check_owned(b);
  int ia = a.id_, ib = b.id_;
  if (value_of(ia).rows() != value_of(ib).rows() || value_of(ia).cols() != value_of(ib).cols())
    throw ValidationError("add_scaled: shape mismatch");
  return push(ca * value_of(ia) + cb * value_of(ib),
              [ia, ib, ca, cb](Tape& t, const Eigen::MatrixXd& g) {
                t.grad_of(ia) += ca * g;
                t.grad_of(ib) += cb * g;
              });
}

Var Tape::matmul(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  int ia = a.id_, ib = b.id_;
  if (value_of(ia).cols() != value_of(ib).rows()) throw ValidationError("matmul: shape mismatch");
  return push(value_of(ia) * value_of(ib), [ia, ib](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(ia) += g * t.value_of(ib).transpose();
    t.grad_of(ib) += t.value_of(ia).transpose() * g;
  });
}

Var Tape::matmul_nt(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  int ia = a.id_, ib = b.id_;
  if (value_of(ia).cols() != value_of(ib).cols()) throw ValidationError("matmul_nt: shape mismatch");
  return push(value_of(ia) * value_of(ib).transpose(),
              [ia, ib](Tape& t, const Eigen::MatrixXd& g) {
                t.grad_of(ia) += g * t.value_of(ib);
                t.grad_of(ib) += g.transpose() * t.value_of(ia);
              });
}

Var Tape::gather_rows(Var table, std::vector<int> ids) {
  check_owned(table);
  int it = table.id_;
  const Eigen::MatrixXd& tab = value_of(it);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ids.size()), tab.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    int id = ids[r];
    if (id >= 0) {
      if (id >= tab.rows()) throw ValidationError("gather_rows: row id out of range");
      out.row(static_cast<Eigen::Index>(r)) = tab.row(id);
    }
  }
  return push(std::move(out), [it, ids = std::move(ids)](Tape& t, const Eigen::MatrixXd& g) {
    Eigen::MatrixXd& gt = t.grad_of(it);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (ids[r] >= 0) gt.row(ids[r]) += g.row(static_cast<Eigen::Index>(r));
    }
  });
}

Var Tape::row(Var m, int i) {
  check_owned(m);
  int im = m.id_;
  if (i < 0 || i >= value_of(im).rows()) throw ValidationError("row: index out of range");
  return push(value_of(im).row(i), [im, i](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(im).row(i) += g.row(0);
  });
}

Var Tape::mean_rows(Var m, int first, int last) {
  check_owned(m);
  int im = m.id_;
  if (first < 0 || last < first || last >= value_of(im).rows())
    throw ValidationError("mean_rows: bad row range");
  int count = last - first + 1;
  Eigen::MatrixXd out = value_of(im).middleRows(first, count).colwise().mean();
  return push(std::move(out), [im, first, count](Tape& t, const Eigen::MatrixXd& g) {
    Eigen::MatrixXd& gm = t.grad_of(im);
    Eigen::MatrixXd share = g.row(0) / static_cast<double>(count);
    for (int r = 0; r < count; ++r) gm.row(first + r) += share;
  });
}

Var Tape::add_rowvec(Var m, Var r) {
  check_owned(m);
  check_owned(r);
  int im = m.id_, ir = r.id_;
  if (value_of(ir).rows() != 1 || value_of(ir).cols() != value_of(im).cols())
    throw ValidationError("add_rowvec: shape mismatch");
  Eigen::MatrixXd out = value_of(im);
  out.rowwise() += value_of(ir).row(0);
  return push(std::move(out), [im, ir](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(im) += g;
    t.grad_of(ir) += g.colwise().sum();
  });
}

Var Tape::add_to_row(Var m, int i, Var r) {
  check_owned(m);
  check_owned(r);
  int im = m.id_, ir = r.id_;
  if (i < 0 || i >= value_of(im).rows()) throw ValidationError("add_to_row: index out of range");
  if (value_of(ir).rows() != 1 || value_of(ir).cols() != value_of(im).cols())
    throw ValidationError("add_to_row: shape mismatch");
  Eigen::MatrixXd out = value_of(im);
  out.row(i) += value_of(ir).row(0);
  return push(std::move(out), [im, ir, i](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(im) += g;
    t.grad_of(ir) += g.row(i);
  });
}

Var Tape::row_softmax(Var a) {
  check_owned(a);
  int ia = a.id_;
  const Eigen::MatrixXd& x = value_of(ia);
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double mx = x.row(i).maxCoeff();
    Eigen::ArrayXd e = (x.row(i).array() - mx).exp();
    y.row(i) = (e / e.sum()).matrix();
  }
  int iy = static_cast<int>(nodes_.size());  // the node being pushed
  return push(std::move(y), [ia, iy](Tape& t, const Eigen::MatrixXd& g) {
    const Eigen::MatrixXd& yv = t.value_of(iy);
    Eigen::MatrixXd& ga = t.grad_of(ia);
    for (Eigen::Index i = 0; i < yv.rows(); ++i) {
      double inner = g.row(i).dot(yv.row(i));
      ga.row(i) += (yv.row(i).array() * (g.row(i).array() - inner)).matrix();
    }
  });
}

Var Tape::square(Var a) {
  check_owned(a);
  int ia = a.id_;
  return push(value_of(ia).cwiseProduct(value_of(ia)),
              [ia](Tape& t, const Eigen::MatrixXd& g) {
                t.grad_of(ia) += 2.0 * g.cwiseProduct(t.value_of(ia));
              });
}

Var Tape::dot(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  int ia = a.id_, ib = b.id_;
  if (value_of(ia).rows() != value_of(ib).rows() || value_of(ia).cols() != value_of(ib).cols())
    throw ValidationError("dot: shape mismatch");
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = value_of(ia).cwiseProduct(value_of(ib)).sum();
  return push(std::move(out), [ia, ib](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(ia) += g(0, 0) * t.value_of(ib);
    t.grad_of(ib) += g(0, 0) * t.value_of(ia);
  });
}

Var Tape::mul_scalar_var(Var a, Var s) {
  check_owned(a);
  check_owned(s);
  int ia = a.id_, is = s.id_;
  if (value_of(is).rows() != 1 || value_of(is).cols() != 1)
    throw ValidationError("mul_scalar_var: scalar must be 1x1");
  return push(value_of(is)(0, 0) * value_of(ia), [ia, is](Tape& t, const Eigen::MatrixXd& g) {
    t.grad_of(ia) += t.value_of(is)(0, 0) * g;
    t.grad_of(is)(0, 0) += g.cwiseProduct(t.value_of(ia)).sum();
  });
}

Var Tape::add_many(const std::vector<Var>& vs) {
  if (vs.empty()) throw ValidationError("add_many: empty input");
  std::vector<int> ids;
  ids.reserve(vs.size());
  for (Var v : vs) {
    check_owned(v);
    ids.push_back(v.id_);
  }
  Eigen::MatrixXd out = value_of(ids[0]);
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (value_of(ids[i]).rows() != out.rows() || value_of(ids[i]).cols() != out.cols())
      throw ValidationError("add_many: shape mismatch");
    out += value_of(ids[i]);
  }
  return push(std::move(out), [ids](Tape& t, const Eigen::MatrixXd& g) {
    for (int id : ids) t.grad_of(id) += g;
  });
}

Var Tape::mean_vars(const std::vector<Var>& vs) {
  Var sum = add_many(vs);
  return scale(sum, 1.0 / static_cast<double>(vs.size()));
}

void Tape::backward(Var root) {
  check_owned(root);
  const Eigen::MatrixXd& rv = value_of(root.id_);
  if (rv.rows() != 1 || rv.cols() != 1) throw ValidationError("backward: root must be 1x1");
  for (int i = 0; i <= root.id_; ++i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    n.grad = Eigen::MatrixXd::Zero(n.value.rows(), n.value.cols());
  }
  grad_of(root.id_)(0, 0) = 1.0;
  for (int i = root.id_; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.back) n.back(*this, n.grad);
  }
}

}  // namespace tagcl::ad
