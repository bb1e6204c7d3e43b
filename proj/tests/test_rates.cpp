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

#include "macbc/duality_sic.hpp"
#include "macbc/rates.hpp"
#include "test_support.hpp"

using namespace macbc;
using test_support::random_matrix;
using test_support::random_unitary;
using test_support::rel_gap;

namespace {

double log2_abs_det(const Eigen::MatrixXcd& m) { return std::log2(std::abs(m.determinant())); }

// Direct quotient-of-determinants evaluation used as the independent oracle
// for the whitened-eigenvalue implementation path.
double quotient_rate_oracle(const Eigen::MatrixXcd& denom_base, const Eigen::MatrixXcd& own) {
    return log2_abs_det(denom_base + own) - log2_abs_det(denom_base);
}

CovarianceSet zero_mac_covariances(const SystemDimensions& dims) {
    CovarianceSet q;
    q.domain = CovarianceDomain::Mac;
    for (int k = 0; k < dims.num_users; ++k) {
        q.matrices.push_back(
            Eigen::MatrixXcd::Zero(dims.user_antennas[k], dims.user_antennas[k]));
    }
    return q;
}

}  // namespace

TEST_CASE("mac_interference_matrix") {
    auto s = test_support::random_system(31, 2, 3, {2, 2}, {1, 1});
    const CovarianceSet q = mac_covariances(s.mac_filters);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(3, 3);

    SUBCASE("first user under cancellation sees pure noise") {
        const Eigen::MatrixXcd x =
            mac_interference_matrix(s.dims, s.channels, q, 0, InterferenceMode::Sic);
        CHECK((x - s.dims.noise_var * eye).norm() == 0.0);
    }
    SUBCASE("linear mode with zero covariances is pure noise") {
        const Eigen::MatrixXcd x = mac_interference_matrix(
            s.dims, s.channels, zero_mac_covariances(s.dims), 0, InterferenceMode::Linear);
        CHECK((x - s.dims.noise_var * eye).norm() == 0.0);
    }
    SUBCASE("second user accumulates the first user's covariance") {
        const Eigen::MatrixXcd x =
            mac_interference_matrix(s.dims, s.channels, q, 1, InterferenceMode::Sic);
        const Eigen::MatrixXcd oracle =
            s.dims.noise_var * eye +
            s.channels.H[0] * q.matrices[0] * s.channels.H[0].adjoint();
        CHECK((x - oracle).norm() <= 1e-12 * oracle.norm());
    }
}

TEST_CASE("mac_rate_sic") {
    SUBCASE("zero covariance gives zero rate") {
        auto s = test_support::random_system(32, 2, 3, {2, 2}, {1, 1});
        CovarianceSet q = mac_covariances(s.mac_filters);
        q.matrices[1].setZero();
        CHECK(mac_rate_sic(s.dims, s.channels, q, 1) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("scalar capacity is one bit") {
        const auto s = test_support::scalar_system();
        const CovarianceSet q = mac_covariances(s.mac_filters);
        CHECK(mac_rate_sic(s.dims, s.channels, q, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("agrees with the quotient-of-determinants form") {
        auto s = test_support::random_system(33, 2, 4, {2, 3}, {2, 2});
        const CovarianceSet q = mac_covariances(s.mac_filters);
        for (int k = 0; k < 2; ++k) {
            Eigen::MatrixXcd below =
                s.dims.noise_var * Eigen::MatrixXcd::Identity(4, 4);
            for (int l = 0; l < k; ++l) {
                below += s.channels.H[l] * q.matrices[l] * s.channels.H[l].adjoint();
            }
            const Eigen::MatrixXcd own =
                s.channels.H[k] * q.matrices[k] * s.channels.H[k].adjoint();
            CHECK(mac_rate_sic(s.dims, s.channels, q, k) ==
                  doctest::Approx(quotient_rate_oracle(below, own)).epsilon(1e-9));
        }
    }
}

TEST_CASE("bc_rate_dpc") {
    SUBCASE("scalar downlink capacity is one bit") {
        const auto s = test_support::scalar_system();
        CovarianceSet cov;
        cov.domain = CovarianceDomain::Bc;
        cov.matrices = {Eigen::MatrixXcd::Ones(1, 1)};
        CHECK(bc_rate_dpc(s.dims, s.channels, cov, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("agrees with the quotient-of-determinants form on three users") {
        auto s = test_support::random_system(34, 3, 4, {2, 2, 3}, {1, 2, 2});
        CovarianceSet cov;
        cov.domain = CovarianceDomain::Bc;
        Xoshiro256pp rng(77);
        for (int k = 0; k < 3; ++k) {
            const Eigen::MatrixXcd m = random_matrix(rng, 4, 2);
            cov.matrices.push_back(m * m.adjoint());
        }
        for (int k = 0; k < 3; ++k) {
            const int r = s.dims.user_antennas[k];
            Eigen::MatrixXcd later = s.dims.noise_var * Eigen::MatrixXcd::Identity(r, r);
            for (int l = k + 1; l < 3; ++l) {
                later += s.channels.H[k].adjoint() * cov.matrices[l] * s.channels.H[k];
            }
            const Eigen::MatrixXcd own =
                s.channels.H[k].adjoint() * cov.matrices[k] * s.channels.H[k];
            CHECK(bc_rate_dpc(s.dims, s.channels, cov, k) ==
                  doctest::Approx(quotient_rate_oracle(later, own)).epsilon(1e-9));
        }
        CovarianceSet zero = cov;
        zero.matrices[1].setZero();
        CHECK(bc_rate_dpc(s.dims, s.channels, zero, 1) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("mac_rate_linear_joint") {
    SUBCASE("single user equals the cancellation rate") {
        auto s = test_support::random_system(35, 1, 3, {2}, {2});
        const CovarianceSet q = mac_covariances(s.mac_filters);
        CHECK(mac_rate_linear_joint(s.dims, s.channels, q, 0) ==
              doctest::Approx(mac_rate_sic(s.dims, s.channels, q, 0)).epsilon(1e-10));
    }
    SUBCASE("agrees with the explicit interference-inverse form") {
        auto s = test_support::random_system(36, 2, 3, {2, 2}, {2, 1});
        const CovarianceSet q = mac_covariances(s.mac_filters);
        for (int k = 0; k < 2; ++k) {
            Eigen::MatrixXcd others = s.dims.noise_var * Eigen::MatrixXcd::Identity(3, 3);
            for (int l = 0; l < 2; ++l) {
                if (l == k) continue;
                others += s.channels.H[l] * q.matrices[l] * s.channels.H[l].adjoint();
            }
            const Eigen::MatrixXcd own =
                s.channels.H[k] * q.matrices[k] * s.channels.H[k].adjoint();
            CHECK(mac_rate_linear_joint(s.dims, s.channels, q, k) ==
                  doctest::Approx(quotient_rate_oracle(others, own)).epsilon(1e-9));
        }
        CovarianceSet zero = q;
        zero.matrices[0].setZero();
        CHECK(mac_rate_linear_joint(s.dims, s.channels, zero, 0) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("mac_error_covariance") {
    SUBCASE("zero precoder gives the identity") {
        auto s = test_support::random_system(37, 1, 2, {2}, {2});
        s.mac_filters.T[0].setZero();
        const Eigen::MatrixXcd c =
            mac_error_covariance(s.dims, s.channels, s.mac_filters, 0, InterferenceMode::Sic);
        CHECK((c - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
    }
    SUBCASE("scalar link at unit SNR has error 1/2") {
        const auto s = test_support::scalar_system();
        const Eigen::MatrixXcd c =
            mac_error_covariance(s.dims, s.channels, s.mac_filters, 0, InterferenceMode::Sic);
        CHECK(c(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("matches the direct I - G H T form through the inversion lemma") {
        auto s = test_support::random_system(38, 2, 4, {2, 3}, {2, 2});
        for (int k = 0; k < 2; ++k) {
            // MMSE receiver computed independently with an explicit inverse.
            Eigen::MatrixXcd phi = s.dims.noise_var * Eigen::MatrixXcd::Identity(4, 4);
            for (int l = 0; l <= k; ++l) {
                phi += s.channels.H[l] * s.mac_filters.T[l] * s.mac_filters.T[l].adjoint() *
                       s.channels.H[l].adjoint();
            }
            const Eigen::MatrixXcd g = s.mac_filters.T[k].adjoint() *
                                       s.channels.H[k].adjoint() * phi.inverse();
            const Eigen::MatrixXcd direct =
                Eigen::MatrixXcd::Identity(2, 2) - g * s.channels.H[k] * s.mac_filters.T[k];
            const Eigen::MatrixXcd c = mac_error_covariance(s.dims, s.channels, s.mac_filters,
                                                            k, InterferenceMode::Sic);
            CHECK((c - direct).norm() <= 1e-9 * direct.norm());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
            CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("rate_from_error_cov") {
    CHECK(rate_from_error_cov(Eigen::MatrixXcd::Identity(3, 3)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
    c(0, 0) = 0.5;
    c(1, 1) = 0.25;
    CHECK(rate_from_error_cov(c) == doctest::Approx(3.0).epsilon(1e-12));

    SUBCASE("matches the determinant route on a random valid covariance") {
        Xoshiro256pp rng(39);
        const Eigen::MatrixXcd m = random_matrix(rng, 3, 3);
        const Eigen::MatrixXcd gram =
            Eigen::MatrixXcd::Identity(3, 3) + m * m.adjoint();
        const Eigen::MatrixXcd valid = gram.inverse();
        CHECK(rate_from_error_cov(valid) ==
              doctest::Approx(-log2_abs_det(valid)).epsilon(1e-10));
    }
    SUBCASE("singular covariance is rejected") {
        CHECK_THROWS_AS(rate_from_error_cov(Eigen::MatrixXcd::Zero(2, 2)),
                        std::runtime_error);
    }
}

TEST_CASE("sinr_mac") {
    SUBCASE("scalar link: unit SINR, invariant to receive scaling") {
        auto s = test_support::scalar_system();
        s.mac_filters.G = {Eigen::MatrixXcd::Ones(1, 1)};
        const double a = sinr_mac(s.dims, s.channels, s.mac_filters, 0, 0,
                                  InterferenceMode::Sic);
        s.mac_filters.G[0] *= std::complex<double>(0.3, -1.7);
        const double b = sinr_mac(s.dims, s.channels, s.mac_filters, 0, 0,
                                  InterferenceMode::Sic);
        CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero transmit column gives zero SINR") {
        auto s = test_support::random_system(40, 1, 2, {2}, {2});
        s.mac_filters.T[0].col(1).setZero();
        s.mac_filters.G = mmse_receivers_sic(s.dims, s.channels, s.mac_filters.T);
        s.mac_filters.G[0].row(1).setOnes();  // arbitrary nonzero receive row
        CHECK(sinr_mac(s.dims, s.channels, s.mac_filters, 0, 1, InterferenceMode::Sic) ==
              doctest::Approx(0.0));
    }
    SUBCASE("zero receive row with live transmit column is an error") {
        auto s = test_support::random_system(41, 1, 2, {2}, {1});
        s.mac_filters.G = {Eigen::MatrixXcd::Zero(1, 2)};
        CHECK_THROWS_AS(
            sinr_mac(s.dims, s.channels, s.mac_filters, 0, 0, InterferenceMode::Sic),
            std::invalid_argument);
    }
    SUBCASE("general form equals the simplified and closed forms when decorrelated") {
        auto s = test_support::random_system(42, 2, 4, {2, 3}, {2, 2});
        const std::vector<Eigen::MatrixXcd> g =
            mmse_receivers_sic(s.dims, s.channels, s.mac_filters.T);
        const DecorrelatedMac dec = decorrelate(s.dims, s.channels, s.mac_filters.T, g);
        const MacFilterSet rotated{dec.t_prime, dec.g_prime};
        const CovarianceSet q = mac_covariances(rotated);

        for (int k = 0; k < 2; ++k) {
            Eigen::MatrixXcd x = s.dims.noise_var * Eigen::MatrixXcd::Identity(4, 4);
            for (int l = 0; l < k; ++l) {
                x += s.channels.H[l] * q.matrices[l] * s.channels.H[l].adjoint();
            }
            for (int i = 0; i < 2; ++i) {
                const double general =
                    sinr_mac(s.dims, s.channels, rotated, k, i, InterferenceMode::Sic);

                // Simplified denominator: noise + earlier users, no intra terms.
                const Eigen::RowVectorXcd row = dec.g_prime[k].row(i);
                double denom = s.dims.noise_var * row.squaredNorm();
                for (int l = 0; l < k; ++l) {
                    for (int m = 0; m < s.dims.user_streams[l]; ++m) {
                        denom += std::norm((row * s.channels.H[l] * dec.t_prime[l].col(m)).value());
                    }
                }
                const double simplified =
                    std::norm((row * s.channels.H[k] * dec.t_prime[k].col(i)).value()) / denom;

                // Closed form: t'^H H^H X^{-1} H t'.
                const Eigen::VectorXcd ht = s.channels.H[k] * dec.t_prime[k].col(i);
                const double closed = (ht.adjoint() * x.inverse() * ht)(0, 0).real();

                CHECK(rel_gap(general, simplified) < 1e-9);
                CHECK(rel_gap(general, closed) < 1e-9);
            }
        }
    }
}

TEST_CASE("sinr_bc matches the matrix-form denominator") {
    auto s = test_support::random_system(43, 2, 4, {2, 2}, {2, 1});
    Xoshiro256pp rng(44);
    BcFilterSet bc;
    for (int k = 0; k < 2; ++k) {
        bc.P.push_back(random_matrix(rng, 4, s.dims.user_streams[k]));
        bc.B.push_back(random_matrix(rng, s.dims.user_streams[k], 2));
    }
    const CovarianceSet cov = bc_covariances(bc);

    for (int k = 0; k < 2; ++k) {
        const int r = s.dims.user_antennas[k];
        for (int mode_idx = 0; mode_idx < 2; ++mode_idx) {
            const InterferenceMode mode =
                mode_idx == 0 ? InterferenceMode::Sic : InterferenceMode::Linear;
            Eigen::MatrixXcd y = s.dims.noise_var * Eigen::MatrixXcd::Identity(r, r);
            for (int l = 0; l < 2; ++l) {
                const bool interferes =
                    mode == InterferenceMode::Sic ? l > k : l != k;
                if (interferes) {
                    y += s.channels.H[k].adjoint() * cov.matrices[l] * s.channels.H[k];
                }
            }
            for (int i = 0; i < s.dims.user_streams[k]; ++i) {
                Eigen::MatrixXcd denom_m = y;
                for (int m = 0; m < s.dims.user_streams[k]; ++m) {
                    if (m == i) continue;
                    const Eigen::VectorXcd hp = s.channels.H[k].adjoint() * bc.P[k].col(m);
                    denom_m += hp * hp.adjoint();
                }
                const Eigen::RowVectorXcd row = bc.B[k].row(i);
                const double num =
                    std::norm((row * s.channels.H[k].adjoint() * bc.P[k].col(i)).value());
                const double den = (row * denom_m * row.adjoint())(0, 0).real();
                CHECK(rel_gap(sinr_bc(s.dims, s.channels, bc, k, i, mode), num / den) < 1e-9);
            }
        }
    }

    SUBCASE("zero transmit column gives zero") {
        bc.P[1].col(0).setZero();
        CHECK(sinr_bc(s.dims, s.channels, bc, 1, 0, InterferenceMode::Sic) ==
              doctest::Approx(0.0));
    }
}

TEST_CASE("report") {
    SUBCASE("all-zero precoders: zero rates, zero power") {
        auto s = test_support::random_system(45, 2, 3, {2, 2}, {1, 2});
        for (auto& t : s.mac_filters.T) t.setZero();
        s.mac_filters.G = mmse_receivers_sic(s.dims, s.channels, s.mac_filters.T);
        const RateReport rep = report(s.dims, s.channels, s.mac_filters,
                                      InterferenceMode::Sic);
        CHECK(rep.sum_rate == doctest::Approx(0.0));
        CHECK(rep.sum_power == doctest::Approx(0.0));
    }
    SUBCASE("scalar system: one bit, unit power") {
        auto s = test_support::scalar_system();
        s.mac_filters.G = mmse_receivers_sic(s.dims, s.channels, s.mac_filters.T);
        const RateReport rep = report(s.dims, s.channels, s.mac_filters,
                                      InterferenceMode::Sic);
        CHECK(rep.per_user_rate[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.sum_power == doctest::Approx(1.0));
    }
    SUBCASE("stream-wise accounting hits the covariance rates with decorrelated MMSE") {
        auto s = test_support::random_system(46, 3, 5, {2, 3, 2}, {2, 2, 1});
        const std::vector<Eigen::MatrixXcd> g =
            mmse_receivers_sic(s.dims, s.channels, s.mac_filters.T);
        const DecorrelatedMac dec = decorrelate(s.dims, s.channels, s.mac_filters.T, g);
        const RateReport rep = report(s.dims, s.channels,
                                      MacFilterSet{dec.t_prime, dec.g_prime},
                                      InterferenceMode::Sic);
        const CovarianceSet q = mac_covariances(s.mac_filters);
        for (int k = 0; k < 3; ++k) {
            CHECK(rep.per_user_rate[k] ==
                  doctest::Approx(mac_rate_sic(s.dims, s.channels, q, k)).epsilon(1e-9));
        }
    }
}

TEST_CASE("rates are invariant under the precoder isometry") {
    auto s = test_support::random_system(47, 2, 4, {3, 2}, {2, 2});
    const CovarianceSet q = mac_covariances(s.mac_filters);
    Xoshiro256pp rng(48);
    MacFilterSet rotated = s.mac_filters;
    for (int k = 0; k < 2; ++k) rotated.T[k] *= random_unitary(rng, 2);
    const CovarianceSet q_rot = mac_covariances(rotated);
    for (int k = 0; k < 2; ++k) {
        CHECK(rel_gap(mac_rate_sic(s.dims, s.channels, q, k),
                      mac_rate_sic(s.dims, s.channels, q_rot, k)) < 1e-9);
        CHECK(rel_gap(mac_rate_linear_joint(s.dims, s.channels, q, k),
                      mac_rate_linear_joint(s.dims, s.channels, q_rot, k)) < 1e-9);
    }
}

TEST_CASE("determinant identity |I + AB| = |I + BA|") {
    Xoshiro256pp rng(49);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index a_rows = 1 + static_cast<Eigen::Index>(rng.next() % 5);
        const Eigen::Index b_rows = 1 + static_cast<Eigen::Index>(rng.next() % 5);
        const Eigen::MatrixXcd a = random_matrix(rng, a_rows, b_rows);
        const Eigen::MatrixXcd b = random_matrix(rng, b_rows, a_rows);
        const std::complex<double> lhs =
            (Eigen::MatrixXcd::Identity(a_rows, a_rows) + a * b).determinant();
        const std::complex<double> rhs =
            (Eigen::MatrixXcd::Identity(b_rows, b_rows) + b * a).determinant();
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(lhs), 1.0));
    }
}

TEST_CASE("joint linear decoding dominates separate decoding with self-interference") {
    for (std::uint64_t seed : {50, 51, 52, 53}) {
        auto s = test_support::random_system(seed, 2, 4, {2, 3}, {2, 2});
        const CovarianceSet q = mac_covariances(s.mac_filters);
        for (int k = 0; k < 2; ++k) {
            const Eigen::MatrixXcd c = mac_error_covariance(s.dims, s.channels, s.mac_filters,
                                                            k, InterferenceMode::Linear);
            double separate = 0.0;
            for (Eigen::Index i = 0; i < c.rows(); ++i) {
                separate -= std::log2(c(i, i).real());
            }
            const double joint = mac_rate_linear_joint(s.dims, s.channels, q, k);
            CHECK(joint >= separate - 1e-9);
        }
    }
}
