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

#include <cstdint>

#include "macbc/duality_sic.hpp"

namespace macbc {

/// MMSE receivers without inter-user cancellation, G_k = T_k^H H_k^H X^{-1}.
/// The interference-plus-noise matrix X covers all users, is the same for
/// every k and is factorized exactly once per call.
std::vector<Eigen::MatrixXcd> mmse_receivers_linear(const SystemDimensions& dims,
                                                    const ChannelSet& channels,
                                                    const std::vector<Eigen::MatrixXcd>& t,
                                                    Exec exec = Exec::Serial);

/// Decorrelation for the linear mode: W_k is the eigenbasis of the Hermitian
/// product T_k^H H_k^H X^{-1} H_k T_k, so W_k^H C_k W_k comes out diagonal.
/// The passed receive filters are rotated along and checked for consistency.
DecorrelatedMac decorrelate_linear(const SystemDimensions& dims, const ChannelSet& channels,
                                   const std::vector<Eigen::MatrixXcd>& t,
                                   const std::vector<Eigen::MatrixXcd>& g,
                                   Exec exec = Exec::Serial);

/// Scaling system without cancellation: every off-diagonal block is
/// populated, the matrix stays a column diagonally dominant Z-matrix.
MMatrix build_m_matrix_linear(const SystemDimensions& dims, const ChannelSet& channels,
                              const DecorrelatedMac& dec);

/// LU factorization with partial pivoting plus forward-backward substitution
/// on the reduced full system.
ScalingSolution solve_scaling_linear(const MMatrix& m);

/// Uplink-to-downlink conversion with purely linear transceivers. Reduces to
/// the cancellation-based conversion for a single user.
MacToBcResult mac_to_bc_linear(const SystemDimensions& dims, const ChannelSet& channels,
                               const MacFilterSet& filters, Exec exec = Exec::Serial);

/// Reverse direction of the linear duality.
BcToMacResult bc_to_mac_linear(const SystemDimensions& dims, const ChannelSet& channels,
                               const BcFilterSet& filters, Exec exec = Exec::Serial);

namespace instrumentation {
/// Number of shared interference-matrix factorizations performed so far in
/// this thread; lets tests observe that mmse_receivers_linear builds its
/// common matrix exactly once per call.
std::uint64_t shared_inverse_count();
}  // namespace instrumentation

}  // namespace macbc
