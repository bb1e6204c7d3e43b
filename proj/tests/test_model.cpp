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

#include <doctest.h>

#include "macbc/model.hpp"
#include "test_support.hpp"

using namespace macbc;
using test_support::random_matrix;
using test_support::random_unitary;

TEST_CASE("validate accepts the minimal system") {
    const auto s = test_support::scalar_system();
    CHECK_NOTHROW(validate(s.dims, s.channels));
}

TEST_CASE("validate rejects stream counts above the antenna count") {
    SystemDimensions dims;
    dims.num_users = 1;
    dims.bs_antennas = 2;
    dims.user_antennas = {1};
    dims.user_streams = {2};  // L_1 > r_1
    ChannelSet channels{{Eigen::MatrixXcd::Ones(2, 1)}};
    CHECK_THROWS_AS(validate(dims, channels), std::invalid_argument);
}

TEST_CASE("validate rejects zero noise variance") {
    auto s = test_support::scalar_system();
    s.dims.noise_var = 0.0;
    CHECK_THROWS_AS(validate(s.dims, s.channels), std::invalid_argument);
}

TEST_CASE("validate rejects shape and finiteness violations") {
    auto s = test_support::random_system(7, 2, 3, {2, 2}, {1, 2});
    SUBCASE("wrong channel shape") {
        s.channels.H[1] = Eigen::MatrixXcd::Ones(3, 3);
        CHECK_THROWS_AS(validate(s.dims, s.channels), std::invalid_argument);
    }
    SUBCASE("non-finite channel entry") {
        s.channels.H[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(validate(s.dims, s.channels), std::invalid_argument);
    }
    SUBCASE("wrong precoder shape") {
        s.mac_filters.T[0] = Eigen::MatrixXcd::Ones(1, 1);
        CHECK_THROWS_AS(validate(s.dims, s.mac_filters), std::invalid_argument);
    }
}

TEST_CASE("apply_user_order relabels channels") {
    auto s = test_support::random_system(11, 2, 3, {2, 1}, {1, 1});

    SUBCASE("identity keeps everything") {
        const ChannelSet same = apply_user_order(s.channels, {0, 1});
        CHECK(same.H[0] == s.channels.H[0]);
        CHECK(same.H[1] == s.channels.H[1]);
    }
    SUBCASE("reversal swaps the lists") {
        const ChannelSet swapped = apply_user_order(s.channels, {1, 0});
        CHECK(swapped.H[0] == s.channels.H[1]);
        CHECK(swapped.H[1] == s.channels.H[0]);
        const SystemDimensions d = apply_user_order(s.dims, {1, 0});
        CHECK(d.user_antennas == std::vector<int>{1, 2});
    }
    SUBCASE("a permutation followed by its inverse restores the original") {
        auto big = test_support::random_system(13, 4, 4, {1, 2, 1, 2}, {1, 1, 1, 1});
        const std::vector<int> perm{2, 0, 3, 1};
        std::vector<int> inverse(perm.size());
        for (size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = static_cast<int>(i);
        const ChannelSet round = apply_user_order(apply_user_order(big.channels, perm), inverse);
        for (int k = 0; k < 4; ++k) CHECK(round.H[k] == big.channels.H[k]);
    }
    SUBCASE("invalid permutations are rejected") {
        CHECK_THROWS_AS(apply_user_order(s.channels, {0, 0}), std::invalid_argument);
        CHECK_THROWS_AS(apply_user_order(s.channels, {0}), std::invalid_argument);
        CHECK_THROWS_AS(apply_user_order(s.channels, {0, 2}), std::invalid_argument);
    }
}

TEST_CASE("sum power is invariant under right-multiplication by a unitary") {
    auto s = test_support::random_system(17, 3, 4, {2, 3, 2}, {2, 2, 1});
    const double before = s.mac_filters.sum_power();
    Xoshiro256pp rng(99);
    for (int k = 0; k < 3; ++k) {
        s.mac_filters.T[k] *= random_unitary(rng, s.dims.user_streams[k]);
    }
    CHECK(test_support::rel_gap(before, s.mac_filters.sum_power()) < 1e-12);
}

TEST_CASE("covariances built from precoders are Hermitian PSD") {
    auto s = test_support::random_system(23, 3, 4, {3, 2, 2}, {2, 1, 2});
    const CovarianceSet q = mac_covariances(s.mac_filters);
    CHECK(q.domain == CovarianceDomain::Mac);
    CHECK_NOTHROW(validate(s.dims, q));  // includes the Hermitian + PSD checks
    for (int k = 0; k < 3; ++k) {
        CHECK(q.matrices[k].rows() == s.dims.user_antennas[k]);
    }
    CHECK(q.sum_power() == doctest::Approx(s.mac_filters.sum_power()).epsilon(1e-12));
}
