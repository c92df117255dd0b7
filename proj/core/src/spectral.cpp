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

#include "tagcl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tagcl {

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ValidationError("eigendecompose: matrix is not square");
  const int n = static_cast<int>(m.rows());
  SpectralDecomposition out;
  if (n == 0) {
    out.eigenvalues = Eigen::VectorXd(0);
    out.eigenvectors = Eigen::MatrixXd(0, 0);
    return out;
  }
  if (!m.allFinite()) throw ValidationError("eigendecompose: non-finite entries");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ValidationError("eigendecompose: matrix is not symmetric");

  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double stop = 1e-15 * std::max(1.0, a.norm());
  const int max_sweeps = 64;

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= stop) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::abs(apq) <= stop * 1e-2) {
          continue;
        }
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e10) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(p, k) = a(k, p);
          a(k, q) = s * akp + c * akq;
          a(q, k) = a(k, q);
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    // One last check: the final sweep may have pushed the off-diagonal mass
    // below the threshold without re-testing.
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off > stop) throw NumericalError("eigendecompose: jacobi sweeps did not converge");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  out.eigenvalues = Eigen::VectorXd(n);
  out.eigenvectors = Eigen::MatrixXd(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues(j) = a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
    out.eigenvectors.col(j) = v.col(order[static_cast<std::size_t>(j)]);
  }

  // Sign convention: largest magnitude entry positive, ties to the lowest row.
  for (int j = 0; j < n; ++j) {
    int best = 0;
    double best_abs = -1.0;
    for (int i = 0; i < n; ++i) {
      double ai = std::abs(out.eigenvectors(i, j));
      if (ai > best_abs) {
        best_abs = ai;
        best = i;
      }
    }
    if (out.eigenvectors(best, j) < 0.0) out.eigenvectors.col(j) = -out.eigenvectors.col(j);
  }
  return out;
}

Eigen::MatrixXd low_pass_features(const SpectralDecomposition& d, int k) {
  const int n = static_cast<int>(d.eigenvalues.size());
  if (k < 1 || k > n) throw ValidationError("low_pass_features: k out of range");
  return d.eigenvectors.leftCols(k);
}

HfcKernel hfc_kernel(const GraphMatrices& gm, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("hfc_kernel: alpha must be in [0, 1]");
  HfcKernel k;
  k.alpha = alpha;
  const auto n = gm.sym_laplacian.rows();
  k.kernel = Eigen::MatrixXd::Identity(n, n) - alpha * gm.sym_laplacian;
  return k;
}

RankKFactor best_rank_k(const HfcKernel& k, int rank) {
  const int n = static_cast<int>(k.kernel.rows());
  if (rank < 1 || rank > n) throw ValidationError("best_rank_k: rank out of range");
  SpectralDecomposition d = eigendecompose(k.kernel);
  RankKFactor out;
  out.factor = Eigen::MatrixXd(n, rank);
  for (int j = 0; j < rank; ++j) {
    int src = n - 1 - j;  // descending eigenvalue order
    double lambda = d.eigenvalues(src);
    out.factor.col(j) = d.eigenvectors.col(src) * std::sqrt(std::max(lambda, 0.0));
  }
  out.residual = (k.kernel - out.factor * out.factor.transpose()).squaredNorm();
  return out;
}

Eigen::VectorXd graph_fourier(const Eigen::VectorXd& x, const SpectralDecomposition& d) {
  if (x.size() != d.eigenvectors.rows()) throw ValidationError("graph_fourier: size mismatch");
  return d.eigenvectors.transpose() * x;
}

}  // namespace tagcl
