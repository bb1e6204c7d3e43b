// SPDX-License-Identifier: Apache-2.0
//
// macbc - SINR-preserving filter conversions between the MIMO multiple
// access channel (uplink) and the MIMO broadcast channel (downlink)
// Copyright (C) 2026 The macbc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

namespace macbc {

// Singular values at or below rank_tol times the largest one count as zero.
inline constexpr double kDefaultRankTol = 1e-9;

// Maximum relative asymmetry accepted by hermitian_eig.
inline constexpr double kDefaultHermTol = 1e-10;

/// Eigendecomposition A = basis * diag(values) * basis^H of a Hermitian A.
/// values are sorted descending. Each eigenvector is phase-normalized: its
/// first entry of largest magnitude is real and nonnegative, so equal inputs
/// produce bit-equal outputs.
struct HermitianEigen {
    Eigen::MatrixXcd basis;  // unitary, columns are eigenvectors
    Eigen::VectorXd values;  // descending
};

/// Factor A = lower * lower^H with real positive diagonal.
struct CholeskyFactor {
    Eigen::MatrixXcd lower;
};

/// Reduced singular value decomposition A = u * diag(singular_values) * v^H
/// truncated to the numerical rank: u is N x rho, v is r x rho, both
/// sub-unitary; singular_values has rho positive entries in descending order.
struct ReducedSvd {
    Eigen::MatrixXcd u;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXcd v;

    Eigen::Index rank() const { return singular_values.size(); }
};

/// Throws std::invalid_argument when ||A - A^H|| exceeds herm_tol * ||A||.
HermitianEigen hermitian_eig(const Eigen::MatrixXcd& a, double herm_tol = kDefaultHermTol);

/// Throws std::runtime_error when A is not positive definite.
CholeskyFactor cholesky(const Eigen::MatrixXcd& a);

ReducedSvd reduced_svd(const Eigen::MatrixXcd& a, double rank_tol = kDefaultRankTol);

/// Back-substitution for an upper-triangular system (the scaling matrix with
/// successive cancellation is block upper triangular with diagonal diagonal
/// blocks, hence upper triangular entrywise). Only the upper triangle of m is
/// read. Throws std::runtime_error on a nonpositive diagonal entry, which
/// signals a stream that should have been removed upstream.
Eigen::VectorXd solve_block_upper_triangular(const Eigen::MatrixXd& m,
                                             const Eigen::VectorXd& rhs);

/// LU factorization with partial pivoting plus forward-backward substitution.
/// Throws std::runtime_error on a singular matrix.
Eigen::VectorXd solve_lu(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs);

}  // namespace macbc
