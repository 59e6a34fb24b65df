// SPDX-License-Identifier: Apache-2.0
//
// mmwavesim: spectral and energy efficiency simulation of beamforming
// structures for doubly massive MIMO mmWave links
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

#ifndef MMWAVESIM_BEAMFORMERS_HPP
#define MMWAVESIM_BEAMFORMERS_HPP

#include <armadillo>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmwavesim/channel.hpp"

namespace mmwavesim
{

enum class Architecture
{
    CM_FD,   // channel-matched fully digital
    PZF_FD,  // partial zero-forcing fully digital
    CM_HY,   // channel-matched hybrid analog/digital
    PZF_HY,  // partial zero-forcing hybrid
    AN,      // purely analog beam-steering
    SW_PHSH, // switches + fixed quantized phase shifters
    SW       // switches only (antenna row selection)
};

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& name);

// Thrown when a construction has too few spatial dimensions to proceed
// (e.g. PZF with N_T <= M K).
struct InfeasibleError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Thrown when a projection or effective channel loses rank.
struct SingularProjectionError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Paths chosen by the analog beam-steerer, in acceptance order.
struct AnSelection
{
    std::vector<arma::uword> path_indices;
    bool relaxed = false; // true when the angle-separation rule had to be dropped
};

// Per-user precoder/postcoder pairs plus the RF-chain bookkeeping needed by
// the power model.  For hybrid and switch structures the stored matrices are
// the composed (effective) beamformers.
struct BeamformerSet
{
    Architecture kind = Architecture::CM_FD;
    std::vector<arma::cx_mat> precoders;  // K matrices, N_T x M
    std::vector<arma::cx_mat> postcoders; // K matrices, N_R x M
    int n_rf_tx = 0;
    int n_rf_rx = 0;
    int n_q = 0;                          // SW_PHSH only
    std::vector<AnSelection> an_selection; // AN only

    int num_users() const { return int(precoders.size()); }
};

struct HybridOptions
{
    double tol = 1e-6; // stop when the relative error improvement drops below this
    int max_iters = 100;
};

// Unit-modulus RF factor and unconstrained baseband factor approximating a
// target matrix, found by block coordinate descent.
struct HybridFactors
{
    arma::cx_mat rf;       // P x n_rf, entries of modulus 1
    arma::cx_mat baseband; // n_rf x M
    arma::cx_mat product;  // rf * baseband
    double approx_error = 0.0; // Frobenius distance to the target
    int iterations = 0;
    std::vector<double> error_sequence; // non-increasing
};

// Antenna rows kept by the switch network.
struct SwitchSelection
{
    std::vector<arma::uword> selected_rows; // distinct, ascending
};

struct SwMfnResult
{
    SwitchSelection selection;
    arma::cx_mat baseband; // n_rf x M, the selected rows of the target
    arma::cx_mat composed; // P x M, target with unselected rows zeroed
};

// Dominant singular vectors of the channel: precoder = M leading right
// singular vectors, postcoder = M leading left singular vectors.  Each pair
// is rotated so the largest-magnitude entry of the right vector is real
// positive.
std::pair<arma::cx_mat, arma::cx_mat> cm_fd(const ChannelRealization& h, int m);

// Partial zero-forcing: precoder is the CM-FD precoder projected onto the
// orthogonal complement of the other users' M dominant right singular
// directions and re-orthonormalized; postcoder is the conjugated
// pseudo-inverse of H_k Q_k, so that D^H H Q = I.
std::pair<arma::cx_mat, arma::cx_mat> pzf_fd(std::span<const ChannelRealization> channels,
                                             int k, int m);

// Alternating factorization of `target` into a unit-modulus RF matrix with
// n_rf columns and a baseband matrix: baseband = rf^+ target, then
// rf = entrywise phase of target * baseband^H, until the relative error
// improvement falls below tol.
HybridFactors hybrid_factorize(const arma::cx_mat& target, int n_rf, HybridOptions opts = {});

// Hybrid constructions: factorize the fully-digital target pair for user k.
// cm_hy targets the CM-FD pair (set cm_targets_pzf to follow the literal
// text naming PZF-FD instead); pzf_hy always targets the PZF-FD pair.
std::pair<HybridFactors, HybridFactors> cm_hy(std::span<const ChannelRealization> channels,
                                              int k, int m, int n_rf_tx, int n_rf_rx,
                                              bool cm_targets_pzf = false,
                                              HybridOptions opts = {});
std::pair<HybridFactors, HybridFactors> pzf_hy(std::span<const ChannelRealization> channels,
                                               int k, int m, int n_rf_tx, int n_rf_rx,
                                               HybridOptions opts = {});

// Greedy dominant-path selection with a minimum angle separation between the
// chosen departure angles and between the chosen arrival angles.
AnSelection an_select_paths(const ChannelRealization& h, int m, double min_sep_deg = 5.0);

// Beam-steering beamformer: columns are exact ULA responses at the selected
// path angles.
std::pair<arma::cx_mat, arma::cx_mat> an_beamsteer(const ChannelRealization& h, int m,
                                                   double min_sep_deg = 5.0,
                                                   AnSelection* selection_out = nullptr);

// Replace every entry with a unit-modulus entry whose phase is the nearest
// point of the grid {2 (q-1) pi / n_q}; ties go to the smaller grid index,
// zero entries map to grid point 0.
arma::cx_mat sw_phsh_quantize(const arma::cx_mat& target, int n_q = 8);

// Minimum Frobenius norm antenna selection: keep the n_rf largest-norm rows
// of the target (ties to the lowest index).
SwMfnResult sw_mfn_select(const arma::cx_mat& target, int n_rf);

} // namespace mmwavesim

#endif
