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

#include "macbc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "macbc/duality_covariance.hpp"
#include "macbc/duality_linear.hpp"
#include "macbc/duality_sic.hpp"
#include "macbc/numerics.hpp"
#include "macbc/rng.hpp"

namespace macbc {

namespace {

using nlohmann::json;

json complex_to_json(const std::complex<double>& c) { return json::array({c.real(), c.imag()}); }

std::complex<double> complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("scenario: complex number must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("scenario: matrix must be a nonempty array of rows");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) {
            throw std::invalid_argument("scenario: ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
    }
    return m;
}

json matrix_list_to_json(const std::vector<Eigen::MatrixXcd>& mats) {
    json out = json::array();
    for (const auto& m : mats) out.push_back(matrix_to_json(m));
    return out;
}

std::vector<Eigen::MatrixXcd> matrix_list_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("scenario: expected an array of matrices");
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(matrix_from_json(item));
    return out;
}

double rel_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

std::string to_string(InterferenceMode mode) {
    return mode == InterferenceMode::Sic ? "sic" : "linear";
}

InterferenceMode mode_from_string(const std::string& name) {
    if (name == "sic") return InterferenceMode::Sic;
    if (name == "linear") return InterferenceMode::Linear;
    throw std::invalid_argument("mode must be \"sic\" or \"linear\"");
}

Scenario generate_random(const SystemDimensions& dims, std::uint64_t seed,
                         double power_budget) {
    if (!(power_budget >= 0.0) || !std::isfinite(power_budget)) {
        throw std::invalid_argument("generate_random: power budget must be finite and >= 0");
    }

    Scenario scenario;
    scenario.dims = dims;
    scenario.seed = seed;
    scenario.channels.H.resize(dims.num_users);

    MacFilterSet filters;
    filters.T.resize(dims.num_users);

    for (int k = 0; k < dims.num_users; ++k) {
        Xoshiro256pp channel_stream(seed, 2 * static_cast<std::uint64_t>(k));
        Eigen::MatrixXcd h(dims.bs_antennas, dims.user_antennas[k]);
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
            for (Eigen::Index j = 0; j < h.cols(); ++j) {
                h(i, j) = channel_stream.complex_gaussian();
            }
        }
        scenario.channels.H[k] = std::move(h);

        Xoshiro256pp precoder_stream(seed, 2 * static_cast<std::uint64_t>(k) + 1);
        Eigen::MatrixXcd t(dims.user_antennas[k], dims.user_streams[k]);
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            for (Eigen::Index j = 0; j < t.cols(); ++j) {
                t(i, j) = precoder_stream.complex_gaussian();
            }
        }
        filters.T[k] = std::move(t);
    }

    double total = 0.0;
    for (const auto& t : filters.T) total += t.squaredNorm();
    if (power_budget == 0.0 || total == 0.0) {
        for (auto& t : filters.T) t.setZero();
    } else {
        const double scale = std::sqrt(power_budget / total);
        for (auto& t : filters.T) t *= scale;
    }

    scenario.mac_filters = std::move(filters);
    validate(scenario.dims, scenario.channels);
    return scenario;
}

json to_json(const Scenario& scenario) {
    json j;
    j["dims"] = {{"num_users", scenario.dims.num_users},
                 {"bs_antennas", scenario.dims.bs_antennas},
                 {"user_antennas", scenario.dims.user_antennas},
                 {"user_streams", scenario.dims.user_streams},
                 {"noise_var", scenario.dims.noise_var}};
    j["channels"] = matrix_list_to_json(scenario.channels.H);
    if (scenario.mac_filters) {
        json f;
        f["T"] = matrix_list_to_json(scenario.mac_filters->T);
        if (scenario.mac_filters->has_receive_filters()) {
            f["G"] = matrix_list_to_json(scenario.mac_filters->G);
        }
        j["mac_filters"] = std::move(f);
    }
    if (scenario.bc_filters) {
        json f;
        f["P"] = matrix_list_to_json(scenario.bc_filters->P);
        if (scenario.bc_filters->has_receive_filters()) {
            f["B"] = matrix_list_to_json(scenario.bc_filters->B);
        }
        j["bc_filters"] = std::move(f);
    }
    j["seed"] = scenario.seed;
    j["mode"] = to_string(scenario.mode);
    return j;
}

Scenario scenario_from_json(const json& j) {
    if (!j.contains("dims") || !j.contains("channels")) {
        throw std::invalid_argument("scenario: missing \"dims\" or \"channels\"");
    }
    Scenario scenario;
    const json& d = j["dims"];
    scenario.dims.num_users = d.at("num_users").get<int>();
    scenario.dims.bs_antennas = d.at("bs_antennas").get<int>();
    scenario.dims.user_antennas = d.at("user_antennas").get<std::vector<int>>();
    scenario.dims.user_streams = d.at("user_streams").get<std::vector<int>>();
    scenario.dims.noise_var = d.at("noise_var").get<double>();
    scenario.channels.H = matrix_list_from_json(j["channels"]);
    if (j.contains("mac_filters")) {
        MacFilterSet f;
        f.T = matrix_list_from_json(j["mac_filters"].at("T"));
        if (j["mac_filters"].contains("G")) {
            f.G = matrix_list_from_json(j["mac_filters"]["G"]);
        }
        scenario.mac_filters = std::move(f);
    }
    if (j.contains("bc_filters")) {
        BcFilterSet f;
        f.P = matrix_list_from_json(j["bc_filters"].at("P"));
        if (j["bc_filters"].contains("B")) {
            f.B = matrix_list_from_json(j["bc_filters"]["B"]);
        }
        scenario.bc_filters = std::move(f);
    }
    if (j.contains("seed")) scenario.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("mode")) scenario.mode = mode_from_string(j["mode"].get<std::string>());

    validate(scenario.dims, scenario.channels);
    if (scenario.mac_filters) validate(scenario.dims, *scenario.mac_filters);
    if (scenario.bc_filters) validate(scenario.dims, *scenario.bc_filters);
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("scenario: malformed JSON in " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write scenario file: " + path);
    out << to_json(scenario).dump(2) << "\n";
}

json to_json(const RateReport& report) {
    json j;
    j["per_stream_sinr"] = report.per_stream_sinr;
    j["per_user_rate"] = report.per_user_rate;
    j["sum_rate"] = report.sum_rate;
    j["sum_power"] = report.sum_power;
    return j;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

json to_json(const VerificationReport& report) {
    json j;
    j["pass"] = report.passed();
    j["checks"] = json::array();
    for (const auto& c : report.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"residual", c.residual},
                               {"tolerance", c.tolerance}});
    }
    j["timings_ms"] = json::object();
    for (const auto& [phase, ms] : report.timings_ms) j["timings_ms"][phase] = ms;
    j["power"] = {{"mac", report.mac_sum_power}, {"bc", report.bc_sum_power}};
    j["rates"] = {{"mac", report.mac_rates}, {"bc", report.bc_rates}};
    return j;
}

namespace {

// log2 det of an HPD matrix through its Cholesky factor.
double log2det_hpd(const Eigen::MatrixXcd& a) {
    const Eigen::MatrixXcd l = cholesky(0.5 * (a + a.adjoint())).lower;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) acc += 2.0 * std::log2(l(i, i).real());
    return acc;
}

struct ModeOps {
    std::vector<Eigen::MatrixXcd> (*receivers)(const SystemDimensions&, const ChannelSet&,
                                               const std::vector<Eigen::MatrixXcd>&, Exec);
    DecorrelatedMac (*decorrelate)(const SystemDimensions&, const ChannelSet&,
                                   const std::vector<Eigen::MatrixXcd>&,
                                   const std::vector<Eigen::MatrixXcd>&, Exec);
    MMatrix (*build)(const SystemDimensions&, const ChannelSet&, const DecorrelatedMac&);
    MacToBcResult (*forward)(const SystemDimensions&, const ChannelSet&, const MacFilterSet&,
                             Exec);
    BcToMacResult (*backward)(const SystemDimensions&, const ChannelSet&, const BcFilterSet&,
                              Exec);
};

ModeOps ops_for(InterferenceMode mode) {
    if (mode == InterferenceMode::Sic) {
        return {&mmse_receivers_sic, &decorrelate, &build_m_matrix_sic, &mac_to_bc,
                &bc_to_mac};
    }
    return {&mmse_receivers_linear, &decorrelate_linear, &build_m_matrix_linear,
            &mac_to_bc_linear, &bc_to_mac_linear};
}

}  // namespace

VerificationReport run_verification(const Scenario& scenario, double tol_sinr) {
    validate(scenario.dims, scenario.channels);
    if (!scenario.mac_filters && !scenario.bc_filters) {
        throw std::invalid_argument("verify: scenario carries no filter set");
    }

    const SystemDimensions& dims = scenario.dims;
    const ChannelSet& channels = scenario.channels;
    const InterferenceMode mode = scenario.mode;
    const ModeOps ops = ops_for(mode);

    VerificationReport rep;
    auto add_check = [&](const std::string& name, double residual, double tolerance) {
        rep.checks.push_back({name, residual <= tolerance, residual, tolerance});
    };

    // Uplink precoders are the reference point of the suite; derive them from
    // the downlink set when they are not given.
    MacFilterSet mac_filters;
    if (scenario.mac_filters) {
        validate(dims, *scenario.mac_filters);
        mac_filters = *scenario.mac_filters;
    } else {
        validate(dims, *scenario.bc_filters);
        mac_filters = ops.backward(dims, channels, *scenario.bc_filters, Exec::Serial)
                          .mac_filters;
    }

    auto t0 = std::chrono::steady_clock::now();
    const MacToBcResult conv = ops.forward(dims, channels, mac_filters, Exec::Serial);
    rep.timings_ms.emplace_back("conversion", elapsed_ms(t0));

    rep.mac_sum_power = conv.mac_report.sum_power;
    rep.bc_sum_power = conv.bc_report.sum_power;
    rep.mac_rates = conv.mac_report.per_user_rate;
    rep.bc_rates = conv.bc_report.per_user_rate;

    t0 = std::chrono::steady_clock::now();

    // Per-stream SINR preservation (relative) and per-user rate tuple (bits).
    double sinr_res = 0.0;
    for (int k = 0; k < dims.num_users; ++k) {
        for (int i = 0; i < dims.user_streams[k]; ++i) {
            sinr_res = std::max(sinr_res, rel_gap(conv.mac_report.per_stream_sinr[k][i],
                                                  conv.bc_report.per_stream_sinr[k][i]));
        }
    }
    add_check("sinr_preservation", sinr_res, tol_sinr);

    double rate_res = 0.0;
    for (int k = 0; k < dims.num_users; ++k) {
        rate_res = std::max(rate_res, std::abs(conv.mac_report.per_user_rate[k] -
                                               conv.bc_report.per_user_rate[k]));
    }
    add_check("rate_tuple", rate_res, 1e-8);

    add_check("power_conservation",
              rel_gap(conv.mac_report.sum_power, conv.bc_report.sum_power), 1e-9);

    // Scaling-system structure: Z-matrix signs, column diagonal dominance,
    // nonnegative solution.
    const std::vector<Eigen::MatrixXcd> g =
        ops.receivers(dims, channels, mac_filters.T, Exec::Serial);
    const DecorrelatedMac dec = ops.decorrelate(dims, channels, mac_filters.T, g, Exec::Serial);
    const MMatrix full = ops.build(dims, channels, dec);
    const MMatrix reduced = remove_zero_streams(full, dec);

    double structure_res = 0.0;
    const double diag_scale =
        full.m.size() > 0 ? std::max(full.m.diagonal().maxCoeff(), 0.0) : 0.0;
    for (Eigen::Index j = 0; j < full.m.cols(); ++j) {
        double col_off = 0.0;
        for (Eigen::Index i = 0; i < full.m.rows(); ++i) {
            if (i == j) continue;
            structure_res = std::max(structure_res, full.m(i, j));  // off-diag must be <= 0
            col_off += std::abs(full.m(i, j));
        }
        structure_res = std::max(structure_res, -full.m(j, j));      // diag must be >= 0
        structure_res = std::max(structure_res, col_off - full.m(j, j));  // dominance
    }
    if (diag_scale > 0.0) structure_res /= diag_scale;
    add_check("m_matrix_structure", structure_res, 1e-12);

    double alpha_res = 0.0;
    if (reduced.rhs.size() > 0) {
        const Eigen::VectorXd raw =
            mode == InterferenceMode::Sic ? solve_block_upper_triangular(reduced.m, reduced.rhs)
                                          : solve_lu(reduced.m, reduced.rhs);
        alpha_res = std::max(0.0, -raw.minCoeff());
    }
    add_check("scaling_nonnegative", alpha_res, 1e-12);

    // Decorrelation: diagonal filtered links and unchanged per-user rates.
    double offdiag_res = 0.0;
    double rate_invariance_res = 0.0;
    double stream_joint_res = 0.0;
    const MacFilterSet rotated{dec.t_prime, dec.g_prime};
    for (int k = 0; k < dims.num_users; ++k) {
        const Eigen::MatrixXcd link = dec.g_prime[k] * channels.H[k] * dec.t_prime[k];
        const Eigen::MatrixXcd err = mac_error_covariance(dims, channels, rotated, k, mode);
        // Under cancellation the filtered link itself must be diagonal; in
        // linear mode the rotated error covariance is the diagonalized object.
        const Eigen::MatrixXcd probe = mode == InterferenceMode::Sic ? link : err;
        double dominant = 0.0;
        for (Eigen::Index i = 0; i < probe.rows(); ++i) {
            dominant = std::max(dominant, std::abs(probe(i, i)));
        }
        for (Eigen::Index i = 0; i < probe.rows(); ++i) {
            for (Eigen::Index j = 0; j < probe.cols(); ++j) {
                if (i == j) continue;
                const double off = std::abs(probe(i, j));
                offdiag_res = std::max(offdiag_res,
                                       dominant > 0.0 ? off / dominant : (off > 1e-12 ? 1.0 : 0.0));
            }
        }

        const double joint_before = rate_from_error_cov(
            mac_error_covariance(dims, channels, mac_filters, k, mode));
        const double joint_after = rate_from_error_cov(err);
        rate_invariance_res =
            std::max(rate_invariance_res, std::abs(joint_before - joint_after));
        stream_joint_res =
            std::max(stream_joint_res, std::abs(conv.mac_report.per_user_rate[k] - joint_after));
    }
    add_check("decorrelation_offdiag", offdiag_res, 1e-9);
    add_check("decorrelation_rate_invariance", rate_invariance_res, 1e-9);
    add_check("stream_vs_joint_rate", stream_joint_res, 1e-9);

    // The printed rate forms must agree pairwise.
    const CovarianceSet q = mac_covariances(mac_filters);
    double dual_form_res = 0.0;
    for (int k = 0; k < dims.num_users; ++k) {
        Eigen::MatrixXcd below = dims.noise_var * Eigen::MatrixXcd::Identity(dims.bs_antennas,
                                                                             dims.bs_antennas);
        for (int l = 0; l < k; ++l) {
            below.noalias() += channels.H[l] * q.matrices[l] * channels.H[l].adjoint();
        }
        const Eigen::MatrixXcd own =
            channels.H[k] * q.matrices[k] * channels.H[k].adjoint();
        const double quotient_form = log2det_hpd(below + own) - log2det_hpd(below);
        dual_form_res =
            std::max(dual_form_res, std::abs(quotient_form - mac_rate_sic(dims, channels, q, k)));

        Eigen::MatrixXcd others = dims.noise_var * Eigen::MatrixXcd::Identity(dims.bs_antennas,
                                                                              dims.bs_antennas);
        for (int l = 0; l < dims.num_users; ++l) {
            if (l == k) continue;
            others.noalias() += channels.H[l] * q.matrices[l] * channels.H[l].adjoint();
        }
        const double plus_form = log2det_hpd(others + own) - log2det_hpd(others);
        dual_form_res = std::max(
            dual_form_res, std::abs(plus_form - mac_rate_linear_joint(dims, channels, q, k)));
    }
    const CovarianceSet s_bc = bc_covariances(conv.bc_filters);
    for (int k = 0; k < dims.num_users; ++k) {
        const int r = dims.user_antennas[k];
        Eigen::MatrixXcd later = dims.noise_var * Eigen::MatrixXcd::Identity(r, r);
        for (int l = k + 1; l < dims.num_users; ++l) {
            later.noalias() += channels.H[k].adjoint() * s_bc.matrices[l] * channels.H[k];
        }
        const Eigen::MatrixXcd own =
            channels.H[k].adjoint() * s_bc.matrices[k] * channels.H[k];
        const double quotient_form = log2det_hpd(later + own) - log2det_hpd(later);
        dual_form_res = std::max(dual_form_res,
                                 std::abs(quotient_form - bc_rate_dpc(dims, channels, s_bc, k)));
    }
    add_check("dual_form_rates", dual_form_res, 1e-9);
    rep.timings_ms.emplace_back("structure_checks", elapsed_ms(t0));

    // Covariance-path cross validation always runs in cancellation mode.
    t0 = std::chrono::steady_clock::now();
    try {
        const CrossValidation cv = cross_validate(dims, channels, mac_filters);
        add_check("covariance_cross_validation", cv.max_rate_mismatch, 1e-7);
    } catch (const std::exception&) {
        rep.checks.push_back({"covariance_cross_validation", false, 1.0, 1e-7});
    }
    rep.timings_ms.emplace_back("covariance_cross", elapsed_ms(t0));

    t0 = std::chrono::steady_clock::now();
    const BcToMacResult back = ops.backward(dims, channels, conv.bc_filters, Exec::Serial);
    double round_trip_res = 0.0;
    for (int k = 0; k < dims.num_users; ++k) {
        round_trip_res = std::max(round_trip_res, std::abs(back.mac_report.per_user_rate[k] -
                                                           conv.mac_report.per_user_rate[k]));
    }
    add_check("round_trip_rate", round_trip_res, 1e-8);
    rep.timings_ms.emplace_back("round_trip", elapsed_ms(t0));

    return rep;
}

std::vector<BenchRow> run_bench(const std::vector<SystemDimensions>& sweep, int trials,
                                bool parallel, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("bench: trials must be >= 1");

    std::vector<BenchRow> rows;
    int index = 0;
    for (const SystemDimensions& dims : sweep) {
        const Scenario scenario =
            generate_random(dims, seed + static_cast<std::uint64_t>(index++),
                            static_cast<double>(dims.num_users));
        const MacFilterSet& filters = *scenario.mac_filters;
        const CovarianceSet q = mac_covariances(filters);

        auto med = [&](auto&& fn) {
            std::vector<double> ms(static_cast<size_t>(trials));
            for (int t = 0; t < trials; ++t) {
                const auto t0 = std::chrono::steady_clock::now();
                fn();
                ms[static_cast<size_t>(t)] = elapsed_ms(t0);
            }
            std::sort(ms.begin(), ms.end());
            return ms[ms.size() / 2];
        };

        BenchRow base{"", dims.num_users, dims.bs_antennas, dims.total_streams(), trials, 0.0};

        BenchRow cov = base;
        cov.method = "covariance";
        cov.median_ms = med([&] { mac_to_bc_covariance(dims, scenario.channels, q); });
        rows.push_back(cov);

        MacToBcResult serial_result;
        BenchRow serial = base;
        serial.method = "filter_serial";
        serial.median_ms = med(
            [&] { serial_result = mac_to_bc(dims, scenario.channels, filters, Exec::Serial); });
        rows.push_back(serial);

        if (parallel) {
            MacToBcResult parallel_result;
            BenchRow par = base;
            par.method = "filter_parallel";
            par.median_ms = med([&] {
                parallel_result = mac_to_bc(dims, scenario.channels, filters, Exec::Parallel);
            });
            rows.push_back(par);

            double gap = 0.0;
            for (int k = 0; k < dims.num_users; ++k) {
                gap = std::max(gap, (serial_result.bc_filters.P[k] -
                                     parallel_result.bc_filters.P[k])
                                        .cwiseAbs()
                                        .maxCoeff());
                gap = std::max(gap, (serial_result.bc_filters.B[k] -
                                     parallel_result.bc_filters.B[k])
                                        .cwiseAbs()
                                        .maxCoeff());
            }
            if (gap > 1e-12) {
                throw std::runtime_error("bench: parallel conversion diverged from serial");
            }
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "method,K,N,sum_L,trials,median_ms\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.num_users << ',' << r.bs_antennas << ',' << r.sum_streams
            << ',' << r.trials << ',' << std::setprecision(6) << std::fixed << r.median_ms
            << '\n';
    }
    return out.str();
}

}  // namespace macbc
