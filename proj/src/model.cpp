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

#include "macbc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace macbc {

namespace {

bool all_finite(const Eigen::MatrixXcd& m) {
    return m.real().allFinite() && m.imag().allFinite();
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_matrix_list(const std::vector<Eigen::MatrixXcd>& mats, int count,
                       const std::vector<int>& rows, const std::vector<int>& cols,
                       const char* what) {
    require(static_cast<int>(mats.size()) == count,
            std::string(what) + ": expected one matrix per user");
    for (int k = 0; k < count; ++k) {
        require(mats[k].rows() == rows[k] && mats[k].cols() == cols[k],
                std::string(what) + ": wrong shape for user " + std::to_string(k + 1));
        require(all_finite(mats[k]),
                std::string(what) + ": non-finite entry for user " + std::to_string(k + 1));
    }
}

double trace_outer_sum(const std::vector<Eigen::MatrixXcd>& mats) {
    double power = 0.0;
    for (const auto& m : mats) power += m.squaredNorm();  // tr(M M^H) = ||M||_F^2
    return power;
}

}  // namespace

int SystemDimensions::total_streams() const {
    return std::accumulate(user_streams.begin(), user_streams.end(), 0);
}

int SystemDimensions::stream_offset(int k) const {
    return std::accumulate(user_streams.begin(), user_streams.begin() + k, 0);
}

double MacFilterSet::sum_power() const { return trace_outer_sum(T); }

double BcFilterSet::sum_power() const { return trace_outer_sum(P); }

double CovarianceSet::sum_power() const {
    double power = 0.0;
    for (const auto& m : matrices) power += m.trace().real();
    return power;
}

void validate(const SystemDimensions& dims, const ChannelSet& channels) {
    require(dims.num_users >= 1, "dims: need at least one user");
    require(dims.bs_antennas >= 1, "dims: need at least one base-station antenna");
    require(static_cast<int>(dims.user_antennas.size()) == dims.num_users,
            "dims: user_antennas must have one entry per user");
    require(static_cast<int>(dims.user_streams.size()) == dims.num_users,
            "dims: user_streams must have one entry per user");
    for (int k = 0; k < dims.num_users; ++k) {
        require(dims.user_antennas[k] >= 1,
                "dims: user " + std::to_string(k + 1) + " needs at least one antenna");
        const int max_streams = std::min(dims.user_antennas[k], dims.bs_antennas);
        require(dims.user_streams[k] >= 1 && dims.user_streams[k] <= max_streams,
                "dims: stream count of user " + std::to_string(k + 1) +
                    " must lie in [1, min(r_k, N)]");
    }
    // Strict positivity keeps every interference-plus-noise matrix positive
    // definite and the scaling system column diagonally dominant.
    require(std::isfinite(dims.noise_var) && dims.noise_var > 0.0,
            "dims: noise_var must be finite and > 0");

    std::vector<int> n_rows(dims.num_users, dims.bs_antennas);
    check_matrix_list(channels.H, dims.num_users, n_rows, dims.user_antennas, "channels");
}

void validate(const SystemDimensions& dims, const MacFilterSet& filters) {
    check_matrix_list(filters.T, dims.num_users, dims.user_antennas, dims.user_streams,
                      "mac_filters.T");
    if (filters.has_receive_filters()) {
        std::vector<int> n_cols(dims.num_users, dims.bs_antennas);
        check_matrix_list(filters.G, dims.num_users, dims.user_streams, n_cols,
                          "mac_filters.G");
    }
    require(std::isfinite(filters.sum_power()), "mac_filters: non-finite sum power");
}

void validate(const SystemDimensions& dims, const BcFilterSet& filters) {
    std::vector<int> n_rows(dims.num_users, dims.bs_antennas);
    check_matrix_list(filters.P, dims.num_users, n_rows, dims.user_streams, "bc_filters.P");
    if (filters.has_receive_filters()) {
        check_matrix_list(filters.B, dims.num_users, dims.user_streams, dims.user_antennas,
                          "bc_filters.B");
    }
    require(std::isfinite(filters.sum_power()), "bc_filters: non-finite sum power");
}

void validate(const SystemDimensions& dims, const CovarianceSet& covariances) {
    const bool mac = covariances.domain == CovarianceDomain::Mac;
    std::vector<int> sizes = mac ? dims.user_antennas
                                 : std::vector<int>(dims.num_users, dims.bs_antennas);
    check_matrix_list(covariances.matrices, dims.num_users, sizes, sizes, "covariances");
    for (int k = 0; k < dims.num_users; ++k) {
        const Eigen::MatrixXcd& q = covariances.matrices[k];
        const double scale = q.norm();
        require((q - q.adjoint()).norm() <= kStructuralTol * std::max(scale, 1e-300) ||
                    scale == 0.0,
                "covariances: matrix of user " + std::to_string(k + 1) + " is not Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q, Eigen::EigenvaluesOnly);
        const double largest = es.eigenvalues().cwiseAbs().maxCoeff();
        require(es.eigenvalues().minCoeff() >= -kPsdTol * std::max(largest, 1e-300),
                "covariances: matrix of user " + std::to_string(k + 1) +
                    " is not positive semidefinite");
    }
}

namespace {

void check_permutation(const std::vector<int>& perm, int count) {
    require(static_cast<int>(perm.size()) == count, "perm: wrong length");
    std::vector<bool> seen(count, false);
    for (int p : perm) {
        require(p >= 0 && p < count && !seen[p], "perm: not a bijection on the user set");
        seen[p] = true;
    }
}

}  // namespace

ChannelSet apply_user_order(const ChannelSet& channels, const std::vector<int>& perm) {
    check_permutation(perm, static_cast<int>(channels.H.size()));
    ChannelSet out;
    out.H.reserve(channels.H.size());
    for (int p : perm) out.H.push_back(channels.H[p]);
    return out;
}

SystemDimensions apply_user_order(const SystemDimensions& dims, const std::vector<int>& perm) {
    check_permutation(perm, dims.num_users);
    SystemDimensions out = dims;
    for (int k = 0; k < dims.num_users; ++k) {
        out.user_antennas[k] = dims.user_antennas[perm[k]];
        out.user_streams[k] = dims.user_streams[perm[k]];
    }
    return out;
}

CovarianceSet mac_covariances(const MacFilterSet& filters) {
    CovarianceSet out;
    out.domain = CovarianceDomain::Mac;
    out.matrices.reserve(filters.T.size());
    for (const auto& t : filters.T) out.matrices.push_back(t * t.adjoint());
    return out;
}

CovarianceSet bc_covariances(const BcFilterSet& filters) {
    CovarianceSet out;
    out.domain = CovarianceDomain::Bc;
    out.matrices.reserve(filters.P.size());
    for (const auto& p : filters.P) out.matrices.push_back(p * p.adjoint());
    return out;
}

}  // namespace macbc
