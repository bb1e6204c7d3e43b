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

#include "macbc/duality_linear.hpp"

#include <stdexcept>

#include "duality_detail.hpp"

namespace macbc {

namespace {

thread_local std::uint64_t shared_inverse_calls = 0;

// X = sigma^2 I_N + sum over all users of H_l T_l T_l^H H_l^H, factorized
// once and shared across all per-user receivers.
Eigen::LLT<Eigen::MatrixXcd> common_interference_llt(const SystemDimensions& dims,
                                                     const ChannelSet& channels,
                                                     const std::vector<Eigen::MatrixXcd>& t) {
    Eigen::MatrixXcd x = dims.noise_var *
                         Eigen::MatrixXcd::Identity(dims.bs_antennas, dims.bs_antennas);
    for (int l = 0; l < dims.num_users; ++l) {
        const Eigen::MatrixXcd ht = channels.H[l] * t[l];
        x.noalias() += ht * ht.adjoint();
    }
    ++shared_inverse_calls;
    return Eigen::LLT<Eigen::MatrixXcd>(x);
}

}  // namespace

namespace instrumentation {
std::uint64_t shared_inverse_count() { return shared_inverse_calls; }
}  // namespace instrumentation

std::vector<Eigen::MatrixXcd> mmse_receivers_linear(const SystemDimensions& dims,
                                                    const ChannelSet& channels,
                                                    const std::vector<Eigen::MatrixXcd>& t,
                                                    Exec exec) {
    const Eigen::LLT<Eigen::MatrixXcd> llt = common_interference_llt(dims, channels, t);
    std::vector<Eigen::MatrixXcd> g(dims.num_users);
    detail::for_each_index(dims.num_users, exec, [&](int k) {
        g[k] = llt.solve(channels.H[k] * t[k]).adjoint();
    });
    return g;
}

DecorrelatedMac decorrelate_linear(const SystemDimensions& dims, const ChannelSet& channels,
                                   const std::vector<Eigen::MatrixXcd>& t,
                                   const std::vector<Eigen::MatrixXcd>& g, Exec exec) {
    const Eigen::LLT<Eigen::MatrixXcd> llt = common_interference_llt(dims, channels, t);

    // Consistency check on the handed-in receivers, as in the SIC variant.
    for (int k = 0; k < dims.num_users; ++k) {
        const Eigen::MatrixXcd a = g[k] * channels.H[k] * t[k];
        if ((a - a.adjoint()).norm() > 1e-8 * a.norm()) {
            throw std::invalid_argument(
                "decorrelate_linear: filtered link matrix is not Hermitian; receive filters "
                "are not the MMSE set for these precoders");
        }
    }

    // W_k from the Gram form (L^{-1} H_k T_k)^H (L^{-1} H_k T_k), which is
    // Hermitian by construction.
    detail::DecorrelatedPair pair = detail::decorrelate_core(
        dims, t, g,
        [&](int k) -> Eigen::MatrixXcd {
            const Eigen::MatrixXcd white = llt.matrixL().solve(channels.H[k] * t[k]);
            return white.adjoint() * white;
        },
        exec);
    return DecorrelatedMac{std::move(pair.tx_prime), std::move(pair.rx_prime),
                           std::move(pair.basis)};
}

MMatrix build_m_matrix_linear(const SystemDimensions& dims, const ChannelSet& channels,
                              const DecorrelatedMac& dec) {
    return detail::build_scaling_system(
        dims, detail::column_norms_sq(dec.t_prime), detail::row_norms_sq(dec.g_prime),
        [&](int a, int b) -> Eigen::MatrixXcd {
            return dec.g_prime[b] * channels.H[a] * dec.t_prime[a];
        },
        detail::Pattern::AllOthers);
}

ScalingSolution solve_scaling_linear(const MMatrix& m) {
    return detail::solve_scaling_core(m, detail::Structure::General);
}

MacToBcResult mac_to_bc_linear(const SystemDimensions& dims, const ChannelSet& channels,
                               const MacFilterSet& filters, Exec exec) {
    validate(dims, channels);
    validate(dims, filters);

    const std::vector<Eigen::MatrixXcd> g =
        mmse_receivers_linear(dims, channels, filters.T, exec);
    const DecorrelatedMac dec = decorrelate_linear(dims, channels, filters.T, g, exec);
    const MMatrix full = build_m_matrix_linear(dims, channels, dec);
    const MMatrix reduced = remove_zero_streams(full, dec);
    const ScalingSolution scaling = solve_scaling_linear(reduced);

    MacToBcResult out;
    out.bc_filters = flip_filters(dims, dec, scaling, exec);
    out.mac_report = report(dims, channels, MacFilterSet{dec.t_prime, dec.g_prime},
                            InterferenceMode::Linear);
    out.bc_report = report(dims, channels, out.bc_filters, InterferenceMode::Linear);
    return out;
}

BcToMacResult bc_to_mac_linear(const SystemDimensions& dims, const ChannelSet& channels,
                               const BcFilterSet& filters, Exec exec) {
    validate(dims, channels);
    validate(dims, filters);

    // Carried receive filters are preserved as-is; per-user downlink MMSE
    // receivers (all users interfere) are the fallback for precoder-only
    // input. See bc_to_mac for the round-trip rationale.
    std::vector<Eigen::MatrixXcd> b;
    if (filters.has_receive_filters()) {
        b = filters.B;
    } else {
        b.resize(dims.num_users);
        detail::for_each_index(dims.num_users, exec, [&](int k) {
            const int r = dims.user_antennas[k];
            Eigen::MatrixXcd phi = dims.noise_var * Eigen::MatrixXcd::Identity(r, r);
            for (int l = 0; l < dims.num_users; ++l) {
                const Eigen::MatrixXcd hp = channels.H[k].adjoint() * filters.P[l];
                phi.noalias() += hp * hp.adjoint();
            }
            const Eigen::MatrixXcd hp_k = channels.H[k].adjoint() * filters.P[k];
            b[k] = Eigen::LLT<Eigen::MatrixXcd>(phi).solve(hp_k).adjoint();
        });
    }

    detail::DecorrelatedPair dec = detail::decorrelate_core(
        dims, filters.P, b,
        [&](int k) -> Eigen::MatrixXcd { return b[k] * channels.H[k].adjoint() * filters.P[k]; },
        exec);

    const MMatrix full = detail::build_scaling_system(
        dims, detail::column_norms_sq(dec.tx_prime), detail::row_norms_sq(dec.rx_prime),
        [&](int a, int b_user) -> Eigen::MatrixXcd {
            return dec.rx_prime[b_user] * channels.H[b_user].adjoint() * dec.tx_prime[a];
        },
        detail::Pattern::AllOthers);
    const MMatrix reduced =
        detail::remove_zero_streams_core(full, detail::column_norms_sq(dec.tx_prime));
    const ScalingSolution scaling =
        detail::solve_scaling_core(reduced, detail::Structure::General);

    detail::FlippedFilters flipped =
        detail::flip_filters_core(dims, dec.tx_prime, dec.rx_prime, scaling, exec);

    BcToMacResult out;
    out.mac_filters = MacFilterSet{std::move(flipped.tx), std::move(flipped.rx)};
    out.bc_report = report(dims, channels, BcFilterSet{dec.tx_prime, dec.rx_prime},
                           InterferenceMode::Linear);
    out.mac_report = report(dims, channels, out.mac_filters, InterferenceMode::Linear);
    return out;
}

}  // namespace macbc
