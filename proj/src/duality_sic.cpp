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

#include "macbc/duality_sic.hpp"

#include <stdexcept>

#include "duality_detail.hpp"

namespace macbc {

std::vector<Eigen::MatrixXcd> mmse_receivers_sic(const SystemDimensions& dims,
                                                 const ChannelSet& channels,
                                                 const std::vector<Eigen::MatrixXcd>& t,
                                                 Exec exec) {
    std::vector<Eigen::MatrixXcd> g(dims.num_users);
    // Each user's covariance sum is rebuilt from scratch so that the serial
    // and the fanned-out execution compute identical numbers.
    detail::for_each_index(dims.num_users, exec, [&](int k) {
        Eigen::MatrixXcd phi = dims.noise_var *
                               Eigen::MatrixXcd::Identity(dims.bs_antennas, dims.bs_antennas);
        for (int l = 0; l <= k; ++l) {
            const Eigen::MatrixXcd ht = channels.H[l] * t[l];
            phi.noalias() += ht * ht.adjoint();
        }
        const Eigen::MatrixXcd ht_k = channels.H[k] * t[k];
        g[k] = Eigen::LLT<Eigen::MatrixXcd>(phi).solve(ht_k).adjoint();
    });
    return g;
}

DecorrelatedMac decorrelate(const SystemDimensions& dims, const ChannelSet& channels,
                            const std::vector<Eigen::MatrixXcd>& t,
                            const std::vector<Eigen::MatrixXcd>& g, Exec exec) {
    detail::DecorrelatedPair pair = detail::decorrelate_core(
        dims, t, g, [&](int k) -> Eigen::MatrixXcd { return g[k] * channels.H[k] * t[k]; },
        exec);
    return DecorrelatedMac{std::move(pair.tx_prime), std::move(pair.rx_prime),
                           std::move(pair.basis)};
}

MMatrix build_m_matrix_sic(const SystemDimensions& dims, const ChannelSet& channels,
                           const DecorrelatedMac& dec) {
    return detail::build_scaling_system(
        dims, detail::column_norms_sq(dec.t_prime), detail::row_norms_sq(dec.g_prime),
        [&](int a, int b) -> Eigen::MatrixXcd {
            return dec.g_prime[b] * channels.H[a] * dec.t_prime[a];
        },
        detail::Pattern::MacSic);
}

MMatrix remove_zero_streams(const MMatrix& m, const DecorrelatedMac& dec) {
    return detail::remove_zero_streams_core(m, detail::column_norms_sq(dec.t_prime));
}

ScalingSolution solve_scaling(const MMatrix& m) {
    return detail::solve_scaling_core(m, detail::Structure::UpperTriangular);
}

BcFilterSet flip_filters(const SystemDimensions& dims, const DecorrelatedMac& dec,
                         const ScalingSolution& scaling, Exec exec) {
    detail::FlippedFilters flipped =
        detail::flip_filters_core(dims, dec.t_prime, dec.g_prime, scaling, exec);
    return BcFilterSet{std::move(flipped.tx), std::move(flipped.rx)};
}

MacToBcResult mac_to_bc(const SystemDimensions& dims, const ChannelSet& channels,
                        const MacFilterSet& filters, Exec exec) {
    validate(dims, channels);
    validate(dims, filters);

    const std::vector<Eigen::MatrixXcd> g = mmse_receivers_sic(dims, channels, filters.T, exec);
    const DecorrelatedMac dec = decorrelate(dims, channels, filters.T, g, exec);
    const MMatrix full = build_m_matrix_sic(dims, channels, dec);
    const MMatrix reduced = remove_zero_streams(full, dec);
    const ScalingSolution scaling = solve_scaling(reduced);

    MacToBcResult out;
    out.bc_filters = flip_filters(dims, dec, scaling, exec);
    out.mac_report = report(dims, channels, MacFilterSet{dec.t_prime, dec.g_prime},
                            InterferenceMode::Sic);
    out.bc_report = report(dims, channels, out.bc_filters, InterferenceMode::Sic);
    return out;
}

BcToMacResult bc_to_mac(const SystemDimensions& dims, const ChannelSet& channels,
                        const BcFilterSet& filters, Exec exec) {
    validate(dims, channels);
    validate(dims, filters);

    // The receive filters pin down which downlink SINRs are preserved. With
    // only precoders given, downlink MMSE receivers are the canonical choice
    // (user k still sees the users encoded after it); a carried filter set
    // (for instance the flipped one from the forward conversion) is used
    // as-is, otherwise a round trip would silently re-optimize the rates.
    std::vector<Eigen::MatrixXcd> b;
    if (filters.has_receive_filters()) {
        b = filters.B;
    } else {
        b.resize(dims.num_users);
        detail::for_each_index(dims.num_users, exec, [&](int k) {
            const int r = dims.user_antennas[k];
            Eigen::MatrixXcd phi = dims.noise_var * Eigen::MatrixXcd::Identity(r, r);
            for (int l = k; l < dims.num_users; ++l) {
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
        detail::Pattern::BcSic);
    const MMatrix reduced =
        detail::remove_zero_streams_core(full, detail::column_norms_sq(dec.tx_prime));
    const ScalingSolution scaling =
        detail::solve_scaling_core(reduced, detail::Structure::LowerTriangular);

    detail::FlippedFilters flipped =
        detail::flip_filters_core(dims, dec.tx_prime, dec.rx_prime, scaling, exec);

    BcToMacResult out;
    out.mac_filters = MacFilterSet{std::move(flipped.tx), std::move(flipped.rx)};
    out.bc_report = report(dims, channels, BcFilterSet{dec.tx_prime, dec.rx_prime},
                           InterferenceMode::Sic);
    out.mac_report = report(dims, channels, out.mac_filters, InterferenceMode::Sic);
    return out;
}

}  // namespace macbc
