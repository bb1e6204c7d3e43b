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
#include <cmath>
#include <cstdint>

#include "macbc/model.hpp"
#include "macbc/rng.hpp"

namespace test_support {

inline Eigen::MatrixXcd random_matrix(macbc::Xoshiro256pp& rng, Eigen::Index rows,
                                      Eigen::Index cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.complex_gaussian();
    }
    return m;
}

inline Eigen::MatrixXcd random_hermitian(macbc::Xoshiro256pp& rng, Eigen::Index n) {
    const Eigen::MatrixXcd a = random_matrix(rng, n, n);
    return 0.5 * (a + a.adjoint());
}

inline Eigen::MatrixXcd random_unitary(macbc::Xoshiro256pp& rng, Eigen::Index n) {
    const Eigen::MatrixXcd a = random_matrix(rng, n, n);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

inline double rel_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// K=N=r=L=1, H=1, T=1, sigma^2=1: SINR 1, rate 1 bit, alpha^2 = 4.
struct ScalarSystem {
    macbc::SystemDimensions dims;
    macbc::ChannelSet channels;
    macbc::MacFilterSet mac_filters;
};

inline ScalarSystem scalar_system() {
    ScalarSystem s;
    s.dims.num_users = 1;
    s.dims.bs_antennas = 1;
    s.dims.user_antennas = {1};
    s.dims.user_streams = {1};
    s.dims.noise_var = 1.0;
    s.channels.H = {Eigen::MatrixXcd::Ones(1, 1)};
    s.mac_filters.T = {Eigen::MatrixXcd::Ones(1, 1)};
    return s;
}

// Random multi-user system with Gaussian channels and precoders.
struct RandomSystem {
    macbc::SystemDimensions dims;
    macbc::ChannelSet channels;
    macbc::MacFilterSet mac_filters;
};

inline RandomSystem random_system(std::uint64_t seed, int num_users, int bs_antennas,
                                  const std::vector<int>& user_antennas,
                                  const std::vector<int>& user_streams,
                                  double noise_var = 1.0, double power_scale = 1.0) {
    RandomSystem s;
    s.dims.num_users = num_users;
    s.dims.bs_antennas = bs_antennas;
    s.dims.user_antennas = user_antennas;
    s.dims.user_streams = user_streams;
    s.dims.noise_var = noise_var;
    for (int k = 0; k < num_users; ++k) {
        macbc::Xoshiro256pp rng(seed, static_cast<std::uint64_t>(k));
        s.channels.H.push_back(random_matrix(rng, bs_antennas, user_antennas[k]));
        s.mac_filters.T.push_back(power_scale *
                                  random_matrix(rng, user_antennas[k], user_streams[k]));
    }
    return s;
}

}  // namespace test_support
