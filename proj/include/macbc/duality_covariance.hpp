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

#include "macbc/duality_sic.hpp"
#include "macbc/model.hpp"

namespace macbc {

/// Serial covariance-based uplink-to-downlink conversion (the baseline the
/// filter-based path is cross-checked against). Downlink covariances are
/// computed for user K first and user 1 last, since each S_k depends on all
/// S_l with l > k through the user-side interference matrix. Per-user
/// downlink rates with dirty paper coding equal the uplink rates with
/// successive cancellation, and the total transmit power does not grow.
CovarianceSet mac_to_bc_covariance(const SystemDimensions& dims, const ChannelSet& channels,
                                   const CovarianceSet& q);

/// Agreement record between the covariance-based and the filter-based
/// conversion run on the same uplink precoders.
struct CrossValidation {
    std::vector<double> mac_rates;
    std::vector<double> bc_rates_filter;
    std::vector<double> bc_rates_covariance;
    double max_rate_mismatch = 0.0;  // worst pairwise per-user gap, bits
    double mac_power = 0.0;
    double bc_filter_power = 0.0;
    double bc_covariance_power = 0.0;
};

/// Runs both conversion paths on Q_k = T_k T_k^H and checks that they hit
/// the same per-user rate tuple and respect the uplink power budget. Throws
/// std::runtime_error when the paths disagree beyond tol, which signals a
/// bug in one of them.
CrossValidation cross_validate(const SystemDimensions& dims, const ChannelSet& channels,
                               const MacFilterSet& filters, double tol = 1e-7);

}  // namespace macbc
