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

#include "macbc/numerics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace macbc {

HermitianEigen hermitian_eig(const Eigen::MatrixXcd& a, double herm_tol) {
    const double scale = a.norm();
    if ((a - a.adjoint()).norm() > herm_tol * scale) {
        throw std::invalid_argument("hermitian_eig: input is not Hermitian within tolerance");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
    }

    const Eigen::Index n = a.rows();
    HermitianEigen out;
    out.values = solver.eigenvalues().reverse();  // ascending -> descending
    out.basis.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::VectorXcd v = solver.eigenvectors().col(n - 1 - c);
        // Phase fix: rotate so the first entry of largest magnitude becomes
        // real nonnegative.
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double mag = std::abs(v[j]);
            if (mag > best) {
                best = mag;
                pivot = j;
            }
        }
        if (best > 0.0) v *= std::conj(v[pivot]) / best;
        out.basis.col(c) = v;
    }
    return out;
}

CholeskyFactor cholesky(const Eigen::MatrixXcd& a) {
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("cholesky: matrix is not positive definite");
    }
    return CholeskyFactor{llt.matrixL()};
}

ReducedSvd reduced_svd(const Eigen::MatrixXcd& a, double rank_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();

    Eigen::Index rank = 0;
    if (sv.size() > 0 && sv[0] > 0.0) {
        const double cutoff = rank_tol * sv[0];
        while (rank < sv.size() && sv[rank] > cutoff) ++rank;
    }

    ReducedSvd out;
    out.u = svd.matrixU().leftCols(rank);
    out.singular_values = sv.head(rank);
    out.v = svd.matrixV().leftCols(rank);
    return out;
}

Eigen::VectorXd solve_block_upper_triangular(const Eigen::MatrixXd& m,
                                             const Eigen::VectorXd& rhs) {
    if (m.rows() != m.cols() || m.rows() != rhs.size()) {
        throw std::invalid_argument("solve_block_upper_triangular: shape mismatch");
    }
    const Eigen::Index n = m.rows();
    Eigen::VectorXd x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (m(i, i) <= 0.0) {
            throw std::runtime_error(
                "solve_block_upper_triangular: nonpositive diagonal entry (zero stream not "
                "removed?)");
        }
        double acc = rhs[i];
        for (Eigen::Index j = i + 1; j < n; ++j) acc -= m(i, j) * x[j];
        x[i] = acc / m(i, i);
    }
    return x;
}

Eigen::VectorXd solve_lu(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs) {
    if (m.rows() != m.cols() || m.rows() != rhs.size()) {
        throw std::invalid_argument("solve_lu: shape mismatch");
    }
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd lu = m;
    Eigen::VectorXd x = rhs;
    Eigen::VectorXi piv(n);

    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        double best = std::abs(lu(col, col));
        for (Eigen::Index row = col + 1; row < n; ++row) {
            const double mag = std::abs(lu(row, col));
            if (mag > best) {
                best = mag;
                pivot = row;
            }
        }
        if (best == 0.0) throw std::runtime_error("solve_lu: singular matrix");
        piv[col] = static_cast<int>(pivot);
        if (pivot != col) {
            lu.row(col).swap(lu.row(pivot));
            std::swap(x[col], x[pivot]);
        }
        for (Eigen::Index row = col + 1; row < n; ++row) {
            const double factor = lu(row, col) / lu(col, col);
            lu(row, col) = factor;
            lu.row(row).tail(n - col - 1) -= factor * lu.row(col).tail(n - col - 1);
            x[row] -= factor * x[col];
        }
    }
    // Forward elimination is folded into the loop above; back-substitute U.
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double acc = x[i];
        for (Eigen::Index j = i + 1; j < n; ++j) acc -= lu(i, j) * x[j];
        x[i] = acc / lu(i, i);
    }
    return x;
}

}  // namespace macbc
