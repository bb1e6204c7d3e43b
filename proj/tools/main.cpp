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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "macbc/duality_linear.hpp"
#include "macbc/duality_sic.hpp"
#include "macbc/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitInputError = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write output file: " + path);
    out << text;
}

struct RandomArgs {
    int users = 2;
    int bs_antennas = 4;
    std::vector<int> user_antennas{2};
    std::vector<int> user_streams{1};
    double noise_var = 1.0;
    double power = 1.0;
    std::uint64_t seed = 0;
    std::string mode = "sic";
    std::string output = "-";
};

std::vector<int> broadcast(std::vector<int> values, int count, const char* what) {
    if (static_cast<int>(values.size()) == 1) values.assign(count, values[0]);
    if (static_cast<int>(values.size()) != count) {
        throw std::invalid_argument(std::string(what) +
                                    ": give one value or one per user");
    }
    return values;
}

int run_random(const RandomArgs& args) {
    macbc::SystemDimensions dims;
    dims.num_users = args.users;
    dims.bs_antennas = args.bs_antennas;
    dims.user_antennas = broadcast(args.user_antennas, args.users, "--user-antennas");
    dims.user_streams = broadcast(args.user_streams, args.users, "--user-streams");
    dims.noise_var = args.noise_var;

    macbc::Scenario scenario = macbc::generate_random(dims, args.seed, args.power);
    scenario.mode = macbc::mode_from_string(args.mode);
    write_text(args.output, macbc::to_json(scenario).dump(2) + "\n");
    return kExitOk;
}

struct ConvertArgs {
    std::string scenario_path;
    std::string direction = "mac-to-bc";
    std::string mode;  // empty: use the scenario's mode
    std::string output = "-";
    bool parallel = false;
};

int run_convert(const ConvertArgs& args) {
    const macbc::Scenario scenario = macbc::load_scenario(args.scenario_path);
    const macbc::InterferenceMode mode =
        args.mode.empty() ? scenario.mode : macbc::mode_from_string(args.mode);
    const macbc::Exec exec = args.parallel ? macbc::Exec::Parallel : macbc::Exec::Serial;
    const bool sic = mode == macbc::InterferenceMode::Sic;

    nlohmann::json out;
    out["direction"] = args.direction;
    out["mode"] = macbc::to_string(mode);

    if (args.direction == "mac-to-bc") {
        if (!scenario.mac_filters) {
            throw std::invalid_argument("convert: scenario has no \"mac_filters\"");
        }
        const macbc::MacToBcResult res =
            sic ? macbc::mac_to_bc(scenario.dims, scenario.channels, *scenario.mac_filters,
                                   exec)
                : macbc::mac_to_bc_linear(scenario.dims, scenario.channels,
                                          *scenario.mac_filters, exec);
        macbc::Scenario out_scenario = scenario;
        out_scenario.bc_filters = res.bc_filters;
        out["filters"] = macbc::to_json(out_scenario)["bc_filters"];
        out["reports"] = {{"mac", macbc::to_json(res.mac_report)},
                          {"bc", macbc::to_json(res.bc_report)}};
    } else if (args.direction == "bc-to-mac") {
        if (!scenario.bc_filters) {
            throw std::invalid_argument("convert: scenario has no \"bc_filters\"");
        }
        const macbc::BcToMacResult res =
            sic ? macbc::bc_to_mac(scenario.dims, scenario.channels, *scenario.bc_filters,
                                   exec)
                : macbc::bc_to_mac_linear(scenario.dims, scenario.channels,
                                          *scenario.bc_filters, exec);
        macbc::Scenario out_scenario = scenario;
        out_scenario.mac_filters = res.mac_filters;
        out["filters"] = macbc::to_json(out_scenario)["mac_filters"];
        out["reports"] = {{"bc", macbc::to_json(res.bc_report)},
                          {"mac", macbc::to_json(res.mac_report)}};
    } else {
        throw std::invalid_argument("convert: direction must be mac-to-bc or bc-to-mac");
    }

    write_text(args.output, out.dump(2) + "\n");
    return kExitOk;
}

struct VerifyArgs {
    std::string scenario_path;
    double tol_sinr = 1e-9;
    std::string output;
    bool timings = false;
};

int run_verify(const VerifyArgs& args) {
    const macbc::Scenario scenario = macbc::load_scenario(args.scenario_path);
    const macbc::VerificationReport report = macbc::run_verification(scenario, args.tol_sinr);

    for (const auto& check : report.checks) {
        std::cout << (check.pass ? "[pass] " : "[FAIL] ") << check.name
                  << "  residual=" << check.residual << "  tol=" << check.tolerance << "\n";
    }
    std::cout << (report.passed() ? "verification passed" : "verification FAILED") << "\n";

    if (!args.output.empty()) {
        nlohmann::json j = macbc::to_json(report);
        // Wall-clock numbers vary run to run; leave them out by default so
        // equal inputs produce byte-equal reports.
        if (!args.timings) j.erase("timings_ms");
        write_text(args.output, j.dump(2) + "\n");
    }
    return report.passed() ? kExitOk : kExitVerificationFailure;
}

struct BenchArgs {
    std::vector<int> users{2, 4, 8};
    int user_antennas = 2;
    int user_streams = 2;
    int bs_antennas = 8;
    double noise_var = 1.0;
    int trials = 5;
    std::uint64_t seed = 1;
    bool parallel = true;
    std::string output = "-";
};

int run_bench_cmd(const BenchArgs& args) {
    std::vector<macbc::SystemDimensions> sweep;
    for (int k : args.users) {
        macbc::SystemDimensions dims;
        dims.num_users = k;
        dims.bs_antennas = args.bs_antennas;
        dims.user_antennas.assign(k, args.user_antennas);
        dims.user_streams.assign(k, args.user_streams);
        dims.noise_var = args.noise_var;
        sweep.push_back(std::move(dims));
    }
    const std::vector<macbc::BenchRow> rows =
        macbc::run_bench(sweep, args.trials, args.parallel, args.seed);
    write_text(args.output, macbc::bench_csv(rows));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uplink/downlink filter duality toolbox"};
    app.require_subcommand(1);

    RandomArgs random_args;
    CLI::App* random_cmd =
        app.add_subcommand("random", "Generate a seeded random scenario file");
    random_cmd->add_option("-K,--users", random_args.users, "Number of users");
    random_cmd->add_option("-N,--bs-antennas", random_args.bs_antennas,
                           "Base-station antennas");
    random_cmd->add_option("--user-antennas", random_args.user_antennas,
                           "Antennas per user (single value broadcasts)")
        ->delimiter(',');
    random_cmd->add_option("--user-streams", random_args.user_streams,
                           "Streams per user (single value broadcasts)")
        ->delimiter(',');
    random_cmd->add_option("--noise-var", random_args.noise_var, "Noise variance sigma^2");
    random_cmd->add_option("--power", random_args.power, "Total transmit power budget");
    random_cmd->add_option("--seed", random_args.seed, "PRNG seed");
    random_cmd->add_option("--mode", random_args.mode, "sic or linear");
    random_cmd->add_option("-o,--output", random_args.output, "Output file (- for stdout)");

    ConvertArgs convert_args;
    CLI::App* convert_cmd =
        app.add_subcommand("convert", "Convert filters between the two domains");
    convert_cmd->add_option("scenario", convert_args.scenario_path, "Scenario JSON file")
        ->required();
    convert_cmd->add_option("--direction", convert_args.direction,
                            "mac-to-bc (default) or bc-to-mac");
    convert_cmd->add_option("--mode", convert_args.mode,
                            "Override the scenario's interference mode");
    convert_cmd->add_flag("--parallel", convert_args.parallel,
                          "Fan per-user/per-stream phases out over threads");
    convert_cmd->add_option("-o,--output", convert_args.output, "Output file (- for stdout)");

    VerifyArgs verify_args;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Run the preservation/invariant suite on a scenario");
    verify_cmd->add_option("scenario", verify_args.scenario_path, "Scenario JSON file")
        ->required();
    verify_cmd->add_option("--tol-sinr", verify_args.tol_sinr,
                           "Relative SINR preservation tolerance");
    verify_cmd->add_option("-o,--output", verify_args.output, "Write the JSON report here");
    verify_cmd->add_flag("--timings", verify_args.timings,
                         "Include wall-clock phase timings in the JSON report");

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand(
        "bench", "Time the serial covariance path against the filter path");
    bench_cmd->add_option("--users", bench_args.users, "User counts to sweep")->delimiter(',');
    bench_cmd->add_option("--user-antennas", bench_args.user_antennas, "Antennas per user");
    bench_cmd->add_option("--user-streams", bench_args.user_streams, "Streams per user");
    bench_cmd->add_option("-N,--bs-antennas", bench_args.bs_antennas, "Base-station antennas");
    bench_cmd->add_option("--noise-var", bench_args.noise_var, "Noise variance sigma^2");
    bench_cmd->add_option("--trials", bench_args.trials, "Trials per method and size");
    bench_cmd->add_option("--seed", bench_args.seed, "PRNG seed");
    bench_cmd->add_flag("--parallel,!--no-parallel", bench_args.parallel,
                        "Include the parallel filter path (default on)");
    bench_cmd->add_option("-o,--output", bench_args.output, "Output CSV file (- for stdout)");

    try {
        app.parse(argc, argv);
        if (random_cmd->parsed()) return run_random(random_args);
        if (convert_cmd->parsed()) return run_convert(convert_args);
        if (verify_cmd->parsed()) return run_verify(verify_args);
        if (bench_cmd->parsed()) return run_bench_cmd(bench_args);
        return kExitInputError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return kExitVerificationFailure;
    }
}
