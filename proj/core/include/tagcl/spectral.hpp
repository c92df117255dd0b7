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

#ifndef TAGCL_SPECTRAL_HPP_
#define TAGCL_SPECTRAL_HPP_

#include <Eigen/Dense>

#include "tagcl/graph.hpp"

namespace tagcl {

// Full eigensystem of a symmetric matrix. Eigenvalues ascending; eigenvector
// columns orthonormal, each scaled so its largest-magnitude entry is positive
// (ties broken by the lowest row index). The fixed sign makes decompositions
// comparable across runs.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

// Low-pass graph operator I - alpha * L_sym together with the alpha it was
// built from. For alpha in [0, 1] this reweights the spectrum of L_sym from
// lambda to 1 - alpha * lambda, so small (smooth) frequencies dominate.
struct HfcKernel {
  double alpha = 0.0;
  Eigen::MatrixXd kernel;
};

struct RankKFactor {
  Eigen::MatrixXd factor;   // N x K
  double residual = 0.0;    // squared Frobenius distance to the kernel
};

// Cyclic Jacobi rotations. Quadratic convergence once the off-diagonal mass is
// small; plenty for the desk-scale matrices this library targets. Throws
// ValidationError on a non-symmetric input, NumericalError if sweeps run out.
SpectralDecomposition eigendecompose(const Eigen::MatrixXd& m);

// First k eigenvector columns (the k smallest eigenvalues).
Eigen::MatrixXd low_pass_features(const SpectralDecomposition& d, int k);

// Requires alpha in [0, 1].
HfcKernel hfc_kernel(const GraphMatrices& gm, double alpha);

// Closed-form best rank-k symmetric factorization of the kernel: columns are
// eigenvectors of the k largest eigenvalues scaled by sqrt(max(lambda, 0)).
// Negative eigenvalues cannot appear in F F^T, so they are clamped and their
// mass stays in the residual.
RankKFactor best_rank_k(const HfcKernel& k, int rank);

// Coefficients of x in the eigenbasis, i.e. U^T x.
Eigen::VectorXd graph_fourier(const Eigen::VectorXd& x, const SpectralDecomposition& d);

}  // namespace tagcl

#endif  // TAGCL_SPECTRAL_HPP_
