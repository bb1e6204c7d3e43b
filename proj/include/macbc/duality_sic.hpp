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

#include "macbc/model.hpp"
#include "macbc/rates.hpp"

namespace macbc {

/// Per-user/per-stream phases of a conversion may run serially or fan out
/// over threads; both orderings assemble results by index and produce
/// identical numbers.
enum class Exec { Serial, Parallel };

/// Uplink filters after applying the per-user decorrelation isometry:
/// t_prime[k] = T_k W_k and g_prime[k] = W_k^H G_k, with W_k chosen so that
/// g_prime[k] H_k t_prime[k] is diagonal. The transmit covariance
/// T_k T_k^H and every rate are unchanged by W_k.
struct DecorrelatedMac {
    std::vector<Eigen::MatrixXcd> t_prime;
    std::vector<Eigen::MatrixXcd> g_prime;
    std::vector<Eigen::MatrixXcd> w;
};

/// The real linear system M * alpha^2 = rhs that equates the dual-domain
/// per-stream SINRs with the primal ones. M is a Z-matrix (nonpositive
/// off-diagonal entries) and column diagonally dominant for noise_var > 0,
/// hence an M-matrix with entrywise-nonnegative inverse. rows/cols follow
/// the user-major stream order restricted to active streams; the mask keeps
/// the full-length stream positions.
struct MMatrix {
    Eigen::MatrixXd m;
    Eigen::VectorXd rhs;  // sigma^2 ||t'_{k,i}||^2 per active stream
    std::vector<bool> active;
};

/// MMSE receivers under successive cancellation:
/// G_k = T_k^H H_k^H (sum_{l<=k} H_l T_l T_l^H H_l^H + sigma^2 I)^{-1}.
std::vector<Eigen::MatrixXcd> mmse_receivers_sic(const SystemDimensions& dims,
                                                 const ChannelSet& channels,
                                                 const std::vector<Eigen::MatrixXcd>& t,
                                                 Exec exec = Exec::Serial);

/// Rotates each link into its decorrelated form using the eigenbasis of
/// G_k H_k T_k (symmetrized before decomposition). Throws when G_k H_k T_k
/// is not Hermitian within tolerance, which signals that g is not the MMSE
/// receiver set belonging to t.
DecorrelatedMac decorrelate(const SystemDimensions& dims, const ChannelSet& channels,
                            const std::vector<Eigen::MatrixXcd>& t,
                            const std::vector<Eigen::MatrixXcd>& g, Exec exec = Exec::Serial);

/// Scaling system for the cancellation-enabled conversion; block upper
/// triangular with diagonal diagonal-blocks.
MMatrix build_m_matrix_sic(const SystemDimensions& dims, const ChannelSet& channels,
                           const DecorrelatedMac& dec);

/// Drops streams whose decorrelated transmit power and entire M row/column
/// vanish (rank-deficient precoders produce them); the returned mask is
/// false at removed positions.
MMatrix remove_zero_streams(const MMatrix& m, const DecorrelatedMac& dec);

/// Back-substitution on the reduced block-upper-triangular system. All
/// alpha^2 come out nonnegative (M-matrix property); tiny negative round-off
/// is clamped to zero. Inactive streams get alpha^2 = 0.
ScalingSolution solve_scaling(const MMatrix& m);

/// Filter flip into the downlink: p_{k,i} = alpha_{k,i} conj(g'_{k,i}) and
/// b_{k,i} = conj(t'_{k,i}) / alpha_{k,i}; removed streams get zero filters.
/// Throws when alpha^2 vanishes on an active stream.
BcFilterSet flip_filters(const SystemDimensions& dims, const DecorrelatedMac& dec,
                         const ScalingSolution& scaling, Exec exec = Exec::Serial);

struct MacToBcResult {
    BcFilterSet bc_filters;
    RateReport mac_report;
    RateReport bc_report;
};

struct BcToMacResult {
    MacFilterSet mac_filters;
    RateReport bc_report;
    RateReport mac_report;
};

/// Full uplink-to-downlink conversion with successive cancellation: MMSE
/// receivers, decorrelation, scaling solve, filter flip. Per-stream SINRs,
/// per-user rates and the transmit power sum carry over to the downlink.
MacToBcResult mac_to_bc(const SystemDimensions& dims, const ChannelSet& channels,
                        const MacFilterSet& filters, Exec exec = Exec::Serial);

/// Reverse direction: downlink filters to uplink filters, same framework
/// with the roles of transmit and receive sides exchanged. Receive filters
/// carried by the set are preserved as-is (so a round trip reproduces the
/// rate tuple); when only precoders are given, downlink MMSE receivers are
/// computed first.
BcToMacResult bc_to_mac(const SystemDimensions& dims, const ChannelSet& channels,
                        const BcFilterSet& filters, Exec exec = Exec::Serial);

}  // namespace macbc
