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

#include "duality_detail.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "macbc/numerics.hpp"

namespace macbc::detail {

void for_each_index(int count, Exec exec, const std::function<void(int)>& fn) {
    if (exec == Exec::Serial || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    const int workers = std::min<int>(count, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::mutex error_mutex;
    std::exception_ptr error;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

bool interferes(Pattern pattern, int src, int dst) {
    switch (pattern) {
        case Pattern::MacSic:
            return src < dst;
        case Pattern::BcSic:
            return src > dst;
        case Pattern::AllOthers:
        default:
            return src != dst;
    }
}

Eigen::VectorXd column_norms_sq(const std::vector<Eigen::MatrixXcd>& mats) {
    Eigen::Index total = 0;
    for (const auto& m : mats) total += m.cols();
    Eigen::VectorXd out(total);
    Eigen::Index s = 0;
    for (const auto& m : mats) {
        for (Eigen::Index i = 0; i < m.cols(); ++i) out[s++] = m.col(i).squaredNorm();
    }
    return out;
}

Eigen::VectorXd row_norms_sq(const std::vector<Eigen::MatrixXcd>& mats) {
    Eigen::Index total = 0;
    for (const auto& m : mats) total += m.rows();
    Eigen::VectorXd out(total);
    Eigen::Index s = 0;
    for (const auto& m : mats) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) out[s++] = m.row(i).squaredNorm();
    }
    return out;
}

MMatrix build_scaling_system(const SystemDimensions& dims, const Eigen::VectorXd& tx_sq,
                             const Eigen::VectorXd& rx_sq,
                             const std::function<Eigen::MatrixXcd(int, int)>& coupling,
                             Pattern pattern) {
    const int total = dims.total_streams();
    MMatrix out;
    out.m = Eigen::MatrixXd::Zero(total, total);
    out.rhs = dims.noise_var * tx_sq;
    out.active.assign(total, true);

    // Noise part of the diagonal first; interference contributions follow.
    for (int s = 0; s < total; ++s) out.m(s, s) = dims.noise_var * rx_sq[s];

    for (int a = 0; a < dims.num_users; ++a) {
        for (int b = 0; b < dims.num_users; ++b) {
            if (!interferes(pattern, a, b)) continue;
            const Eigen::MatrixXcd response = coupling(a, b);  // L_b x L_a
            const Eigen::MatrixXd power = response.cwiseAbs2();
            const int off_a = dims.stream_offset(a);
            const int off_b = dims.stream_offset(b);
            // Row block (a, :) / column block (:, b): the dual-domain
            // interference of b's streams at a's receiver carries the same
            // coupling magnitudes as a's primal interference at b.
            out.m.block(off_a, off_b, dims.user_streams[a], dims.user_streams[b]) -=
                power.transpose();
            // Primal interference from a raises b's diagonal entries.
            for (int j = 0; j < dims.user_streams[b]; ++j) {
                out.m(off_b + j, off_b + j) += power.row(j).sum();
            }
        }
    }
    return out;
}

MMatrix remove_zero_streams_core(const MMatrix& m, const Eigen::VectorXd& tx_sq) {
    const int total = static_cast<int>(m.active.size());
    const double tx_cut = 1e-24 * tx_sq.maxCoeff();
    const double m_cut = 1e-24 * (m.m.size() > 0 ? m.m.diagonal().maxCoeff() : 0.0);

    // Rows/columns of m.m cover the currently active streams in order, so
    // the pass is idempotent. tx_sq is always full length.
    std::vector<bool> keep(total, false);
    std::vector<int> kept;  // row indices into m.m that survive
    kept.reserve(total);
    int reduced_index = 0;
    for (int s = 0; s < total; ++s) {
        if (!m.active[s]) continue;
        const int ri = reduced_index++;
        const bool dead_power = tx_sq[s] <= tx_cut;
        const bool dead_row = m.m.row(ri).cwiseAbs().maxCoeff() <= m_cut;
        const bool dead_col = m.m.col(ri).cwiseAbs().maxCoeff() <= m_cut;
        keep[s] = !(dead_power && dead_row && dead_col);
        if (keep[s]) kept.push_back(ri);
    }

    MMatrix out;
    const int reduced = static_cast<int>(kept.size());
    out.m.resize(reduced, reduced);
    out.rhs.resize(reduced);
    for (int i = 0; i < reduced; ++i) {
        out.rhs[i] = m.rhs[kept[i]];
        for (int j = 0; j < reduced; ++j) out.m(i, j) = m.m(kept[i], kept[j]);
    }
    out.active = keep;
    return out;
}

ScalingSolution solve_scaling_core(const MMatrix& m, Structure structure) {
    Eigen::VectorXd solved;
    switch (structure) {
        case Structure::UpperTriangular:
            solved = solve_block_upper_triangular(m.m, m.rhs);
            break;
        case Structure::LowerTriangular: {
            // Reversing the stream order turns the lower-triangular system
            // into an upper-triangular one.
            const Eigen::MatrixXd flipped = m.m.reverse();
            const Eigen::VectorXd rhs_flipped = m.rhs.reverse();
            solved = solve_block_upper_triangular(flipped, rhs_flipped).reverse();
            break;
        }
        case Structure::General:
        default:
            solved = solve_lu(m.m, m.rhs);
            break;
    }

    ScalingSolution out;
    out.active_mask = m.active;
    out.alpha_sq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.active.size()));
    int idx = 0;
    for (size_t s = 0; s < m.active.size(); ++s) {
        if (!m.active[s]) continue;
        out.alpha_sq[static_cast<Eigen::Index>(s)] = std::max(solved[idx], 0.0);
        ++idx;
    }
    return out;
}

DecorrelatedPair decorrelate_core(const SystemDimensions& dims,
                                  const std::vector<Eigen::MatrixXcd>& tx,
                                  const std::vector<Eigen::MatrixXcd>& rx,
                                  const std::function<Eigen::MatrixXcd(int)>& product,
                                  Exec exec) {
    DecorrelatedPair out;
    out.tx_prime.resize(dims.num_users);
    out.rx_prime.resize(dims.num_users);
    out.basis.resize(dims.num_users);

    for_each_index(dims.num_users, exec, [&](int k) {
        const Eigen::MatrixXcd a = product(k);
        const double scale = a.norm();
        if ((a - a.adjoint()).norm() > 1e-8 * scale) {
            throw std::invalid_argument(
                "decorrelate: filtered link matrix is not Hermitian; receive filters are not "
                "the MMSE set for these precoders");
        }
        const HermitianEigen eig = hermitian_eig(0.5 * (a + a.adjoint()));
        out.basis[k] = eig.basis;
        out.tx_prime[k] = tx[k] * eig.basis;
        out.rx_prime[k] = eig.basis.adjoint() * rx[k];
    });
    return out;
}

FlippedFilters flip_filters_core(const SystemDimensions& dims,
                                 const std::vector<Eigen::MatrixXcd>& tx_prime,
                                 const std::vector<Eigen::MatrixXcd>& rx_prime,
                                 const ScalingSolution& scaling, Exec exec) {
    FlippedFilters out;
    out.tx.resize(dims.num_users);
    out.rx.resize(dims.num_users);
    for (int k = 0; k < dims.num_users; ++k) {
        out.tx[k] = Eigen::MatrixXcd::Zero(rx_prime[k].cols(), dims.user_streams[k]);
        out.rx[k] = Eigen::MatrixXcd::Zero(dims.user_streams[k], tx_prime[k].rows());
    }

    std::vector<std::pair<int, int>> stream_of(dims.total_streams());
    for (int k = 0, s = 0; k < dims.num_users; ++k) {
        for (int i = 0; i < dims.user_streams[k]; ++i, ++s) stream_of[s] = {k, i};
    }

    // One stream per task: the flip of (k, i) depends on nothing but
    // (g'_{k,i}, t'_{k,i}, alpha_{k,i}).
    for_each_index(dims.total_streams(), exec, [&](int s) {
        const auto [k, i] = stream_of[s];
        if (!scaling.active_mask[s]) return;  // leave the zero filters in place
        const double alpha_sq = scaling.alpha_sq[s];
        if (alpha_sq <= 0.0) {
            throw std::runtime_error("flip_filters: vanishing scale on an active stream");
        }
        const double alpha = std::sqrt(alpha_sq);
        out.tx[k].col(i) = alpha * rx_prime[k].row(i).conjugate().transpose();
        out.rx[k].row(i) = tx_prime[k].col(i).conjugate().transpose() / alpha;
    });
    return out;
}

}  // namespace macbc::detail
