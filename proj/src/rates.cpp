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

#include "macbc/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace macbc {

namespace {

constexpr double kLogFloor = 1e-300;

double log2_checked(double x) {
    if (x < kLogFloor) {
        throw std::runtime_error("rates: log argument underflow (system numerically singular)");
    }
    return std::log2(x);
}

// sigma^2 I_N + sum over selected users of H_l Q_l H_l^H.
Eigen::MatrixXcd bs_side_noise_plus(const SystemDimensions& dims, const ChannelSet& channels,
                                    const CovarianceSet& q, int first, int last) {
    Eigen::MatrixXcd x = dims.noise_var *
                         Eigen::MatrixXcd::Identity(dims.bs_antennas, dims.bs_antennas);
    for (int l = first; l < last; ++l) {
        x.noalias() += channels.H[l] * q.matrices[l] * channels.H[l].adjoint();
    }
    return x;
}

// sigma^2 I_r + sum over selected users of H_k^H S_l H_k (everything reaches
// user k through its own channel).
Eigen::MatrixXcd user_side_noise_plus(const SystemDimensions& dims, const ChannelSet& channels,
                                      const CovarianceSet& s, int k, int first, int last) {
    const int r = dims.user_antennas[k];
    Eigen::MatrixXcd y = dims.noise_var * Eigen::MatrixXcd::Identity(r, r);
    for (int l = first; l < last; ++l) {
        y.noalias() += channels.H[k].adjoint() * s.matrices[l] * channels.H[k];
    }
    return y;
}

// Eigenvalues of the Hermitian-similar form L^{-1} A L^{-H}, X = L L^H.
// Used for every log-determinant so that near-singular quotients are
// evaluated without cancellation.
Eigen::VectorXd whitened_eigenvalues(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& a) {
    Eigen::LLT<Eigen::MatrixXcd> llt(x);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("rates: interference-plus-noise matrix not positive definite");
    }
    Eigen::MatrixXcd half = llt.matrixL().solve(a);                       // L^{-1} A
    Eigen::MatrixXcd s = llt.matrixL().solve(half.adjoint()).adjoint();   // L^{-1} A L^{-H}
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (s + s.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// log2 |I + X^{-1} A| for PSD A and HPD X.
double log2det_quotient(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& a) {
    const Eigen::VectorXd lambda = whitened_eigenvalues(x, a);
    double rate = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) rate += log2_checked(1.0 + lambda[i]);
    return rate;
}

// -log2 |I - X^{-1} A| for PSD A with A strictly dominated by X.
double neg_log2det_deficit(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& a) {
    const Eigen::VectorXd lambda = whitened_eigenvalues(x, a);
    double rate = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) rate -= log2_checked(1.0 - lambda[i]);
    return rate;
}

void require_domain(const CovarianceSet& set, CovarianceDomain domain, const char* who) {
    if (set.domain != domain) {
        throw std::invalid_argument(std::string(who) + ": covariance set from wrong domain");
    }
}

double stream_rate(double sinr) { return std::log2(1.0 + sinr); }

}  // namespace

Eigen::MatrixXcd mac_interference_matrix(const SystemDimensions& dims,
                                         const ChannelSet& channels, const CovarianceSet& q,
                                         int k, InterferenceMode mode) {
    require_domain(q, CovarianceDomain::Mac, "mac_interference_matrix");
    const int last = mode == InterferenceMode::Sic ? k : dims.num_users;
    return bs_side_noise_plus(dims, channels, q, 0, last);
}

double mac_rate_sic(const SystemDimensions& dims, const ChannelSet& channels,
                    const CovarianceSet& q, int k) {
    require_domain(q, CovarianceDomain::Mac, "mac_rate_sic");
    const Eigen::MatrixXcd x = bs_side_noise_plus(dims, channels, q, 0, k);
    const Eigen::MatrixXcd a = channels.H[k] * q.matrices[k] * channels.H[k].adjoint();
    return log2det_quotient(x, a);
}

double bc_rate_dpc(const SystemDimensions& dims, const ChannelSet& channels,
                   const CovarianceSet& s, int k) {
    require_domain(s, CovarianceDomain::Bc, "bc_rate_dpc");
    const Eigen::MatrixXcd y = user_side_noise_plus(dims, channels, s, k, k + 1,
                                                    dims.num_users);
    const Eigen::MatrixXcd a = channels.H[k].adjoint() * s.matrices[k] * channels.H[k];
    return log2det_quotient(y, a);
}

double mac_rate_linear_joint(const SystemDimensions& dims, const ChannelSet& channels,
                             const CovarianceSet& q, int k) {
    require_domain(q, CovarianceDomain::Mac, "mac_rate_linear_joint");
    const Eigen::MatrixXcd x = bs_side_noise_plus(dims, channels, q, 0, dims.num_users);
    const Eigen::MatrixXcd a = channels.H[k] * q.matrices[k] * channels.H[k].adjoint();
    return neg_log2det_deficit(x, a);
}

double bc_rate_linear_joint(const SystemDimensions& dims, const ChannelSet& channels,
                            const CovarianceSet& s, int k) {
    require_domain(s, CovarianceDomain::Bc, "bc_rate_linear_joint");
    const Eigen::MatrixXcd y = user_side_noise_plus(dims, channels, s, k, 0, dims.num_users);
    const Eigen::MatrixXcd a = channels.H[k].adjoint() * s.matrices[k] * channels.H[k];
    return neg_log2det_deficit(y, a);
}

Eigen::MatrixXcd mac_error_covariance(const SystemDimensions& dims, const ChannelSet& channels,
                                      const MacFilterSet& filters, int k,
                                      InterferenceMode mode) {
    const CovarianceSet q = mac_covariances(filters);
    // Interference-only covariance: own signal excluded in both modes.
    Eigen::MatrixXcd x = dims.noise_var *
                         Eigen::MatrixXcd::Identity(dims.bs_antennas, dims.bs_antennas);
    for (int l = 0; l < dims.num_users; ++l) {
        const bool interferes = mode == InterferenceMode::Sic ? l < k : l != k;
        if (interferes) x.noalias() += channels.H[l] * q.matrices[l] * channels.H[l].adjoint();
    }
    Eigen::LLT<Eigen::MatrixXcd> llt(x);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("mac_error_covariance: interference matrix not positive definite");
    }
    const Eigen::MatrixXcd white = llt.matrixL().solve(channels.H[k] * filters.T[k]);
    const int streams = dims.user_streams[k];
    const Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(streams, streams) +
                                  white.adjoint() * white;
    Eigen::MatrixXcd c = Eigen::LLT<Eigen::MatrixXcd>(gram).solve(
        Eigen::MatrixXcd::Identity(streams, streams));
    return 0.5 * (c + c.adjoint());
}

double rate_from_error_cov(const Eigen::MatrixXcd& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c, Eigen::EigenvaluesOnly);
    double rate = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lambda = es.eigenvalues()[i];
        if (lambda < kLogFloor) {
            throw std::runtime_error("rate_from_error_cov: singular or non-PD error covariance");
        }
        rate -= std::log2(std::min(lambda, 1.0));
    }
    return rate;
}

namespace {

// Shared general-form SINR: |rx * link * tx_i|^2 over noise plus the
// accumulated |rx * path(l) * tx_{l,m}|^2 of every interfering stream,
// including the user's own streams m != i.
template <typename PathFn>
double general_sinr(const SystemDimensions& dims, const Eigen::RowVectorXcd& rx,
                    const std::vector<Eigen::MatrixXcd>& tx, int k, int i,
                    InterferenceMode mode, bool sic_later_users_interfere, PathFn path) {
    const double rx_sq = rx.squaredNorm();
    const double tx_sq = tx[k].col(i).squaredNorm();
    if (rx_sq == 0.0) {
        if (tx_sq == 0.0) return 0.0;
        throw std::invalid_argument(
            "sinr: zero receive filter row for a transmitting stream (undefined SINR)");
    }

    const std::complex<double> signal = (rx * path(k) * tx[k].col(i)).value();
    double denom = dims.noise_var * rx_sq;
    for (int l = 0; l < dims.num_users; ++l) {
        bool interferes;
        if (l == k) {
            interferes = true;  // own streams m != i handled below
        } else if (mode == InterferenceMode::Linear) {
            interferes = true;
        } else {
            interferes = sic_later_users_interfere ? l > k : l < k;
        }
        if (!interferes) continue;
        const Eigen::RowVectorXcd coupled = rx * path(l);
        for (int m = 0; m < dims.user_streams[l]; ++m) {
            if (l == k && m == i) continue;
            denom += std::norm((coupled * tx[l].col(m)).value());
        }
    }
    return std::norm(signal) / denom;
}

}  // namespace

double sinr_mac(const SystemDimensions& dims, const ChannelSet& channels,
                const MacFilterSet& filters, int k, int i, InterferenceMode mode) {
    if (!filters.has_receive_filters()) {
        throw std::invalid_argument("sinr_mac: receive filters not present");
    }
    const Eigen::RowVectorXcd rx = filters.G[k].row(i);
    // Every user l reaches the base station through its own channel H_l.
    return general_sinr(dims, rx, filters.T, k, i, mode,
                        /*sic_later_users_interfere=*/false,
                        [&](int l) -> const Eigen::MatrixXcd& { return channels.H[l]; });
}

double sinr_bc(const SystemDimensions& dims, const ChannelSet& channels,
               const BcFilterSet& filters, int k, int i, InterferenceMode mode) {
    if (!filters.has_receive_filters()) {
        throw std::invalid_argument("sinr_bc: receive filters not present");
    }
    const Eigen::RowVectorXcd rx = filters.B[k].row(i);
    // Everything reaches user k through its own downlink channel H_k^H.
    const Eigen::MatrixXcd down = channels.H[k].adjoint();
    return general_sinr(dims, rx, filters.P, k, i, mode,
                        /*sic_later_users_interfere=*/true,
                        [&](int) -> const Eigen::MatrixXcd& { return down; });
}

namespace {

template <typename SinrFn>
RateReport stream_report(const SystemDimensions& dims, double sum_power, SinrFn sinr) {
    RateReport rep;
    rep.per_stream_sinr.resize(dims.num_users);
    rep.per_user_rate.resize(dims.num_users, 0.0);
    for (int k = 0; k < dims.num_users; ++k) {
        rep.per_stream_sinr[k].resize(dims.user_streams[k]);
        for (int i = 0; i < dims.user_streams[k]; ++i) {
            const double s = sinr(k, i);
            rep.per_stream_sinr[k][i] = s;
            rep.per_user_rate[k] += stream_rate(s);
        }
        rep.sum_rate += rep.per_user_rate[k];
    }
    rep.sum_power = sum_power;
    return rep;
}

}  // namespace

RateReport report(const SystemDimensions& dims, const ChannelSet& channels,
                  const MacFilterSet& filters, InterferenceMode mode) {
    validate(dims, channels);
    validate(dims, filters);
    if (!filters.has_receive_filters()) {
        throw std::invalid_argument("report: uplink receive filters not present");
    }
    return stream_report(dims, filters.sum_power(), [&](int k, int i) {
        return sinr_mac(dims, channels, filters, k, i, mode);
    });
}

RateReport report(const SystemDimensions& dims, const ChannelSet& channels,
                  const BcFilterSet& filters, InterferenceMode mode) {
    validate(dims, channels);
    validate(dims, filters);
    if (!filters.has_receive_filters()) {
        throw std::invalid_argument("report: downlink receive filters not present");
    }
    return stream_report(dims, filters.sum_power(), [&](int k, int i) {
        return sinr_bc(dims, channels, filters, k, i, mode);
    });
}

RateReport report(const SystemDimensions& dims, const ChannelSet& channels,
                  const CovarianceSet& covariances, InterferenceMode mode) {
    validate(dims, channels);
    validate(dims, covariances);
    RateReport rep;
    rep.per_user_rate.resize(dims.num_users, 0.0);
    for (int k = 0; k < dims.num_users; ++k) {
        double rate;
        if (covariances.domain == CovarianceDomain::Mac) {
            rate = mode == InterferenceMode::Sic
                       ? mac_rate_sic(dims, channels, covariances, k)
                       : mac_rate_linear_joint(dims, channels, covariances, k);
        } else {
            rate = mode == InterferenceMode::Sic
                       ? bc_rate_dpc(dims, channels, covariances, k)
                       : bc_rate_linear_joint(dims, channels, covariances, k);
        }
        rep.per_user_rate[k] = rate;
        rep.sum_rate += rate;
    }
    rep.sum_power = covariances.sum_power();
    return rep;
}

}  // namespace macbc
