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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "macbc/model.hpp"
#include "macbc/rates.hpp"

namespace macbc {

/// One self-contained problem instance: geometry, channels, filters for at
/// least one domain, the seed it was generated from, and the interference
/// mode it is meant to be run in.
struct Scenario {
    SystemDimensions dims;
    ChannelSet channels;
    std::optional<MacFilterSet> mac_filters;
    std::optional<BcFilterSet> bc_filters;
    std::uint64_t seed = 0;
    InterferenceMode mode = InterferenceMode::Sic;
};

/// Draws i.i.d. unit-variance circularly-symmetric Gaussian channels and
/// Gaussian uplink precoders rescaled so the transmit power sum hits
/// power_budget exactly. Substream layout: stream 2k is user k's channel,
/// stream 2k+1 its precoder, so the result is reproducible per (dims, seed)
/// independent of generation order.
Scenario generate_random(const SystemDimensions& dims, std::uint64_t seed,
                         double power_budget);

/// "sic" or "linear".
std::string to_string(InterferenceMode mode);
InterferenceMode mode_from_string(const std::string& name);

/// JSON schema: complex numbers as [re, im], matrices as row-major arrays of
/// rows, keys "dims", "channels", "mac_filters", "bc_filters", "seed",
/// "mode". Round-trips are lossless (doubles are serialized exactly).
nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

nlohmann::json to_json(const RateReport& report);

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

/// Outcome of the verification suite: each named check with its measured
/// residual against the pinned tolerance, wall-clock per phase, and the
/// headline power/rate of both domains in the scenario's mode.
struct VerificationReport {
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, double>> timings_ms;
    double mac_sum_power = 0.0;
    double bc_sum_power = 0.0;
    std::vector<double> mac_rates;
    std::vector<double> bc_rates;

    bool passed() const;
};

/// Runs the full invariant suite on a scenario: SINR preservation, rate
/// tuples, power conservation, scaling-matrix structure, decorrelation
/// diagonality, stream-wise vs joint decoding, dual rate forms, the
/// covariance-path cross check (cancellation mode) and the round trip.
/// Failures become report entries, never exceptions.
VerificationReport run_verification(const Scenario& scenario, double tol_sinr = 1e-9);

nlohmann::json to_json(const VerificationReport& report);

struct BenchRow {
    std::string method;  // "covariance", "filter_serial", "filter_parallel"
    int num_users = 0;
    int bs_antennas = 0;
    int sum_streams = 0;
    int trials = 0;
    double median_ms = 0.0;
};

/// Times the serial covariance conversion against the filter conversion with
/// and without parallel per-user/per-stream phases, on freshly generated
/// scenarios per dims entry. The parallel run is checked against the serial
/// one (worst absolute filter-entry gap must stay below 1e-12).
std::vector<BenchRow> run_bench(const std::vector<SystemDimensions>& sweep, int trials,
                                bool parallel, std::uint64_t seed);

/// CSV with fixed header method,K,N,sum_L,trials,median_ms.
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace macbc
