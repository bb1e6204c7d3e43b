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

#include "macbc/duality_covariance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "macbc/numerics.hpp"
#include "macbc/rates.hpp"

namespace macbc {

CovarianceSet mac_to_bc_covariance(const SystemDimensions& dims, const ChannelSet& channels,
                                   const CovarianceSet& q) {
    validate(dims, channels);
    validate(dims, q);
    if (q.domain != CovarianceDomain::Mac) {
        throw std::invalid_argument("mac_to_bc_covariance: expected uplink covariances");
    }

    const int n = dims.bs_antennas;
    CovarianceSet out;
    out.domain = CovarianceDomain::Bc;
    out.matrices.assign(dims.num_users, Eigen::MatrixXcd());

    for (int k = dims.num_users - 1; k >= 0; --k) {
        const int r = dims.user_antennas[k];

        // Y_k = sigma^2 I_r + sum_{l>k} H_k^H S_l H_k, built from the
        // already-converted users; factor Y_k = F^H F with F upper triangular.
        Eigen::MatrixXcd y = dims.noise_var * Eigen::MatrixXcd::Identity(r, r);
        for (int l = k + 1; l < dims.num_users; ++l) {
            y.noalias() += channels.H[k].adjoint() * out.matrices[l] * channels.H[k];
        }
        const Eigen::MatrixXcd f_adj = cholesky(0.5 * (y + y.adjoint())).lower;  // F^H

        // X_k = sigma^2 I_N + sum_{l<k} H_l Q_l H_l^H = L L^H.
        Eigen::MatrixXcd x = dims.noise_var * Eigen::MatrixXcd::Identity(n, n);
        for (int l = 0; l < k; ++l) {
            x.noalias() += channels.H[l] * q.matrices[l] * channels.H[l].adjoint();
        }
        const Eigen::MatrixXcd lower = cholesky(0.5 * (x + x.adjoint())).lower;

        // Effective channel E = L^{-1} H_k F^{-1} via two triangular solves.
        const Eigen::MatrixXcd half =
            lower.triangularView<Eigen::Lower>().solve(channels.H[k]);
        const Eigen::MatrixXcd effective =
            f_adj.triangularView<Eigen::Lower>().solve(half.adjoint()).adjoint();

        const ReducedSvd svd = reduced_svd(effective);

        // Flip: Z_k = U V^H (F Q_k F^H) V U^H lives on the rank subspace.
        const Eigen::MatrixXcd f = f_adj.adjoint();
        const Eigen::MatrixXcd fqf = f * q.matrices[k] * f.adjoint();
        const Eigen::MatrixXcd rotation = svd.u * svd.v.adjoint();
        const Eigen::MatrixXcd z = rotation * fqf * rotation.adjoint();

        // S_k = L^{-H} Z L^{-1}; triangular solves only, no explicit inverse.
        const Eigen::MatrixXcd upper = lower.adjoint();
        const Eigen::MatrixXcd lh_z = upper.triangularView<Eigen::Upper>().solve(z);
        Eigen::MatrixXcd s =
            upper.triangularView<Eigen::Upper>().solve(lh_z.adjoint()).adjoint();
        out.matrices[k] = 0.5 * (s + s.adjoint());
    }
    return out;
}

CrossValidation cross_validate(const SystemDimensions& dims, const ChannelSet& channels,
                               const MacFilterSet& filters, double tol) {
    validate(dims, channels);
    validate(dims, filters);

    const CovarianceSet q = mac_covariances(filters);
    CrossValidation record;
    record.mac_rates.resize(dims.num_users);
    for (int k = 0; k < dims.num_users; ++k) {
        record.mac_rates[k] = mac_rate_sic(dims, channels, q, k);
    }
    record.mac_power = q.sum_power();

    const CovarianceSet s = mac_to_bc_covariance(dims, channels, q);
    record.bc_rates_covariance.resize(dims.num_users);
    for (int k = 0; k < dims.num_users; ++k) {
        record.bc_rates_covariance[k] = bc_rate_dpc(dims, channels, s, k);
    }
    record.bc_covariance_power = s.sum_power();

    const MacToBcResult conv = mac_to_bc(dims, channels, filters);
    record.bc_rates_filter = conv.bc_report.per_user_rate;
    record.bc_filter_power = conv.bc_filters.sum_power();

    for (int k = 0; k < dims.num_users; ++k) {
        const double worst = std::max(
            std::abs(record.bc_rates_filter[k] - record.bc_rates_covariance[k]),
            std::max(std::abs(record.bc_rates_filter[k] - record.mac_rates[k]),
                     std::abs(record.bc_rates_covariance[k] - record.mac_rates[k])));
        record.max_rate_mismatch = std::max(record.max_rate_mismatch, worst);
    }

    const double power_slack = 1e-9 * std::max(record.mac_power, 1.0);
    const bool powers_ok =
        record.bc_covariance_power <= record.mac_power + power_slack &&
        std::abs(record.bc_filter_power - record.mac_power) <= power_slack;
    if (record.max_rate_mismatch > tol || !powers_ok) {
        throw std::runtime_error(
            "cross_validate: filter-based and covariance-based conversions disagree "
            "(max rate gap " +
            std::to_string(record.max_rate_mismatch) + " bits)");
    }
    return record;
}

}  // namespace macbc
