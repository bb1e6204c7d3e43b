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
#include <complex>
#include <vector>

namespace macbc {

// Relative tolerance for structural checks (Hermitian symmetry, shape-level
// numerical sanity). All tolerances in this library are relative to the
// magnitude of the checked quantity unless stated otherwise.
inline constexpr double kStructuralTol = 1e-10;

// A Gram matrix T T^H may pick up eigenvalues as low as -eps * ||.|| from
// round-off; treat them as zero down to this relative level.
inline constexpr double kPsdTol = 1e-9;

/// System geometry and noise level shared by all modules.
///
/// K users with user_antennas[k] antennas each talk to a base station with
/// bs_antennas antennas (uplink direction); user k multiplexes
/// user_streams[k] data streams. noise_var is the noise power per receive
/// antenna in linear units and must be strictly positive.
struct SystemDimensions {
    int num_users = 0;               // K
    int bs_antennas = 0;             // N
    std::vector<int> user_antennas;  // r_k
    std::vector<int> user_streams;   // L_k
    double noise_var = 1.0;          // sigma^2 per receive antenna

    /// Sum of all users' stream counts.
    int total_streams() const;

    /// Start of user k's block in the user-major flat stream order
    /// (1,1),(1,2),...,(K,L_K).
    int stream_offset(int k) const;
};

/// Uplink channel matrices. H[k] has shape N x r_k; the downlink uses the
/// Hermitian transpose H[k]^H of the same matrix.
struct ChannelSet {
    std::vector<Eigen::MatrixXcd> H;
};

/// Uplink transmit/receive filters. T[k] (r_k x L_k) precodes user k's
/// unit-covariance data vector; G[k] (L_k x N) is the base-station receive
/// filter, row i acting as g_{k,i}^T on the received vector. G may be left
/// empty until computed.
struct MacFilterSet {
    std::vector<Eigen::MatrixXcd> T;
    std::vector<Eigen::MatrixXcd> G;

    double sum_power() const;  // sum_k tr(T_k T_k^H)
    bool has_receive_filters() const { return !G.empty(); }
};

/// Downlink transmit/receive filters. P[k] (N x L_k) precodes at the base
/// station; B[k] (L_k x r_k) is user k's receive filter, row i acting as
/// b_{k,i}^T.
struct BcFilterSet {
    std::vector<Eigen::MatrixXcd> P;
    std::vector<Eigen::MatrixXcd> B;

    double sum_power() const;  // sum_k tr(P_k P_k^H)
    bool has_receive_filters() const { return !B.empty(); }
};

enum class CovarianceDomain { Mac, Bc };

/// Per-user transmit covariance matrices: Q_k (r_k x r_k) in the uplink,
/// S_k (N x N) in the downlink. Hermitian positive semidefinite.
struct CovarianceSet {
    CovarianceDomain domain = CovarianceDomain::Mac;
    std::vector<Eigen::MatrixXcd> matrices;

    double sum_power() const;  // sum of traces
};

/// Solution of the per-stream scaling system. alpha_sq is flat in user-major
/// stream order; entries of removed (zero) streams are exactly 0 and their
/// mask entry is false.
struct ScalingSolution {
    Eigen::VectorXd alpha_sq;
    std::vector<bool> active_mask;
};

/// Per-stream SINRs, per-user rates (bits per channel use) and total
/// transmit power for one domain. per_stream_sinr is empty when the report
/// was computed from covariances (no stream-wise accounting).
struct RateReport {
    std::vector<std::vector<double>> per_stream_sinr;
    std::vector<double> per_user_rate;
    double sum_rate = 0.0;
    double sum_power = 0.0;
};

/// Throws std::invalid_argument unless dims and channels satisfy every type
/// invariant: K,N >= 1, 1 <= L_k <= min(r_k, N), noise_var > 0, channel
/// shapes N x r_k with finite entries.
void validate(const SystemDimensions& dims, const ChannelSet& channels);

/// Shape/finiteness checks for filter and covariance sets against dims.
void validate(const SystemDimensions& dims, const MacFilterSet& filters);
void validate(const SystemDimensions& dims, const BcFilterSet& filters);
void validate(const SystemDimensions& dims, const CovarianceSet& covariances);

/// Relabels users so that the fixed conventions (user 1 decoded last in the
/// uplink, precoded first in the downlink) realize the priority order given
/// by perm. perm[i] is the old index of the user that becomes user i;
/// new.H[i] = old.H[perm[i]]. Throws on a non-bijective perm.
ChannelSet apply_user_order(const ChannelSet& channels, const std::vector<int>& perm);
SystemDimensions apply_user_order(const SystemDimensions& dims, const std::vector<int>& perm);

/// Q_k = T_k T_k^H for every user.
CovarianceSet mac_covariances(const MacFilterSet& filters);
/// S_k = P_k P_k^H for every user.
CovarianceSet bc_covariances(const BcFilterSet& filters);

}  // namespace macbc
