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

namespace macbc {

/// Sic: successive interference cancellation in the uplink (user 1 decoded
/// last) and dirty paper coding in the downlink (user 1 precoded first).
/// Linear: plain linear filtering, every user interferes with every other.
enum class InterferenceMode { Sic, Linear };

/// Interference-plus-noise covariance at the base station,
/// sigma^2 I_N + sum_l H_l Q_l H_l^H. Under Sic the sum runs over the users
/// l < k whose signals are not yet cancelled when user k is decoded; under
/// Linear it runs over all users (including k) and is independent of k.
Eigen::MatrixXcd mac_interference_matrix(const SystemDimensions& dims,
                                         const ChannelSet& channels,
                                         const CovarianceSet& q, int k,
                                         InterferenceMode mode);

/// Uplink rate of user k with successive cancellation,
/// log2 |I_N + X_k^{-1} H_k Q_k H_k^H|, in bits per channel use.
double mac_rate_sic(const SystemDimensions& dims, const ChannelSet& channels,
                    const CovarianceSet& q, int k);

/// Downlink rate of user k with dirty paper coding,
/// log2 |I_r + Y_k^{-1} H_k^H S_k H_k| with
/// Y_k = sigma^2 I_r + sum_{l>k} H_k^H S_l H_k.
double bc_rate_dpc(const SystemDimensions& dims, const ChannelSet& channels,
                   const CovarianceSet& s, int k);

/// Uplink rate of user k under purely linear filtering with joint decoding of
/// its streams, -log2 |I_N - X^{-1} H_k Q_k H_k^H| with the all-user X.
double mac_rate_linear_joint(const SystemDimensions& dims, const ChannelSet& channels,
                             const CovarianceSet& q, int k);

/// Downlink counterpart of mac_rate_linear_joint (same algebra with the
/// channels Hermitian-transposed).
double bc_rate_linear_joint(const SystemDimensions& dims, const ChannelSet& channels,
                            const CovarianceSet& s, int k);

/// MMSE error covariance C_k = I - G_k H_k T_k of user k's uplink link,
/// evaluated through the better-conditioned inverse form
/// [I + T_k^H H_k^H X^{-1} H_k T_k]^{-1}. Hermitian with eigenvalues in (0,1].
Eigen::MatrixXcd mac_error_covariance(const SystemDimensions& dims,
                                      const ChannelSet& channels,
                                      const MacFilterSet& filters, int k,
                                      InterferenceMode mode);

/// R = -log2 |C| for an error covariance with eigenvalues in (0, 1].
/// Throws std::runtime_error when C is singular or not positive definite.
double rate_from_error_cov(const Eigen::MatrixXcd& c);

/// SINR of uplink stream (k, i) for arbitrary filters, general form: the
/// denominator accumulates noise, inter-user interference per mode and
/// intra-user interference from the user's other streams. Requires receive
/// filters; throws when the receive filter row is zero while the transmit
/// column is not (the SINR is undefined then).
double sinr_mac(const SystemDimensions& dims, const ChannelSet& channels,
                const MacFilterSet& filters, int k, int i, InterferenceMode mode);

/// SINR of downlink stream (k, i); everything reaches user k through its own
/// channel H_k^H. Under Sic the users l > k (encoded later) interfere, under
/// Linear all l != k do.
double sinr_bc(const SystemDimensions& dims, const ChannelSet& channels,
               const BcFilterSet& filters, int k, int i, InterferenceMode mode);

/// Stream-wise report from uplink filters: per-stream SINRs, per-user rates
/// sum_i log2(1 + SINR_{k,i}), sum rate and transmit power.
RateReport report(const SystemDimensions& dims, const ChannelSet& channels,
                  const MacFilterSet& filters, InterferenceMode mode);

/// Stream-wise report from downlink filters.
RateReport report(const SystemDimensions& dims, const ChannelSet& channels,
                  const BcFilterSet& filters, InterferenceMode mode);

/// Report from covariances (joint per-user rates, no per-stream SINRs).
RateReport report(const SystemDimensions& dims, const ChannelSet& channels,
                  const CovarianceSet& covariances, InterferenceMode mode);

}  // namespace macbc
