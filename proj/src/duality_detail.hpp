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

#include <functional>

#include "macbc/duality_sic.hpp"

// Internals shared by the cancellation and linear dualities and by both
// conversion directions. Both directions reduce to the same scaling system;
// only the interference pattern and the coupling responses differ.

namespace macbc::detail {

void for_each_index(int count, Exec exec, const std::function<void(int)>& fn);

// Which users' signals remain as interference at user dst's primal receiver.
enum class Pattern {
    MacSic,    // src < dst: users decoded after dst are still on air
    BcSic,     // src > dst: users encoded after dst are not presubtracted
    AllOthers  // src != dst: no cancellation
};

bool interferes(Pattern pattern, int src, int dst);

// Assembles M and rhs from per-stream transmit/receive squared norms and the
// coupling responses. coupling(a, b) must return the L_b x L_a matrix whose
// (j, i) entry is the response of user a's stream i at user b's stream-j
// receiver output. The returned MMatrix covers all streams (mask all-true).
MMatrix build_scaling_system(const SystemDimensions& dims, const Eigen::VectorXd& tx_sq,
                             const Eigen::VectorXd& rx_sq,
                             const std::function<Eigen::MatrixXcd(int, int)>& coupling,
                             Pattern pattern);

// Flat user-major vector of squared column norms (transmit side) of a
// per-user matrix list.
Eigen::VectorXd column_norms_sq(const std::vector<Eigen::MatrixXcd>& mats);
// Same for row vectors (receive side).
Eigen::VectorXd row_norms_sq(const std::vector<Eigen::MatrixXcd>& mats);

MMatrix remove_zero_streams_core(const MMatrix& m, const Eigen::VectorXd& tx_sq);

enum class Structure { UpperTriangular, LowerTriangular, General };

// Solves the reduced system, re-expands to full stream length with zeros on
// inactive streams and clamps round-off negatives to zero.
ScalingSolution solve_scaling_core(const MMatrix& m, Structure structure);

// Rotates every link by the eigenbasis of its (Hermitian) filtered link
// matrix product(k); tx/rx are consumed as T_k/G_k (uplink) or P_k/B_k
// (downlink). herm_tol guards against a receive filter set that does not
// belong to tx.
struct DecorrelatedPair {
    std::vector<Eigen::MatrixXcd> tx_prime;
    std::vector<Eigen::MatrixXcd> rx_prime;
    std::vector<Eigen::MatrixXcd> basis;
};

DecorrelatedPair decorrelate_core(const SystemDimensions& dims,
                                  const std::vector<Eigen::MatrixXcd>& tx,
                                  const std::vector<Eigen::MatrixXcd>& rx,
                                  const std::function<Eigen::MatrixXcd(int)>& product,
                                  Exec exec);

// p_{k,i} = alpha conj(rx-row) and b_{k,i} = conj(tx-col) / alpha, shared by
// both flip directions (columns of the new transmit side come from rows of
// the old receive side and vice versa).
struct FlippedFilters {
    std::vector<Eigen::MatrixXcd> tx;  // new transmit filters, one column per stream
    std::vector<Eigen::MatrixXcd> rx;  // new receive filters, one row per stream
};

FlippedFilters flip_filters_core(const SystemDimensions& dims,
                                 const std::vector<Eigen::MatrixXcd>& tx_prime,
                                 const std::vector<Eigen::MatrixXcd>& rx_prime,
                                 const ScalingSolution& scaling, Exec exec);

}  // namespace macbc::detail
