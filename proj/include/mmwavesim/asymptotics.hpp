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

#ifndef MMWAVESIM_ASYMPTOTICS_HPP
#define MMWAVESIM_ASYMPTOTICS_HPP

#include <armadillo>
#include <span>
#include <vector>

#include "mmwavesim/metrics.hpp"

namespace mmwavesim
{

// Which array is taken to infinity in closed-form limits.
enum class AntennaRegime
{
    NT_INF,
    NR_INF,
    BOTH_INF
};

// Per-user singular values of the channels (lambda), their array-size-free
// normalization lambda / sqrt(N_T N_R), and the eigenvalues mu of the
// leaked-interference matrix sum_{l != k} Lam V^H Q_l Q_l^H V Lam^H.
struct SpectralSummary
{
    std::vector<arma::vec> lambdas;            // descending, M per user
    std::vector<arma::vec> lambdas_normalized; // lambda / sqrt(n_t * n_r)
    std::vector<arma::vec> mus;                // descending, M per user
    int n_t = 0;
    int n_r = 0;
    int m = 0;
};

SpectralSummary make_spectral_summary(std::span<const ChannelRealization> channels,
                                      std::span<const arma::cx_mat> precoders, int m);

// Steering-vector overlap tables for the beam-steering analysis:
// f_t[k][l](i, n) = f_{N_T}(selected AoD i of user k, AoD n of user l), and
// the receive-side analogue.  `gains` are the lumped path coefficients and
// `selected` the per-user beam path indices (defaults to the first m).
struct OverlapTables
{
    std::vector<std::vector<arma::cx_mat>> f_r; // [k][l], M x N_l
    std::vector<std::vector<arma::cx_mat>> f_t;
    std::vector<arma::cx_vec> gains;            // lumped, per user, path order
    std::vector<double> gammas;                 // per-user channel normalization
    std::vector<std::vector<arma::uword>> selected;
    int n_t = 0;
    int n_r = 0;
    int m = 0;
};

OverlapTables make_overlap_tables(std::span<const ChannelRealization> channels, int m,
                                  std::span<const AnSelection> selections = {});

// ---- fully digital structures, large-antenna forms ----

// Downlink eigenvalue form: sum_k sum_q log2[1 + N_R N_T c |lt_kq|^2 /
// (sigma^2 + c mu_kq)], c = P_T / (M K), both eigenvalue lists paired in
// descending order.
double cmfd_dl_asymptotic(const SpectralSummary& summary, double p_t_w, const NoiseModel& noise,
                          int k_users, int m);

// Matrix form of the same expression; coincides with the exact downlink ASE
// when fed the CM-FD beamformers.
double cmfd_dl_asymptotic_matrix(std::span<const ChannelRealization> channels,
                                 const BeamformerSet& bf, double p_t_w,
                                 const NoiseModel& noise, int m);

// Uplink per-user log-det with interference built from U_{l,M} Lam_{l,M}.
double cmfd_ul_asymptotic(std::span<const ChannelRealization> channels, const BeamformerSet& bf,
                          int k, const arma::vec& p_t_per_user_w, const NoiseModel& noise, int m);

// Interference-free forms: sum log2[1 + N_T N_R P/(M K) lt^2 / sigma^2].
double pzf_dl_asymptotic(const SpectralSummary& summary, double p_t_w, const NoiseModel& noise,
                         int k_users, int m);
double pzf_ul_asymptotic(const SpectralSummary& summary, int k, double p_t_k_w,
                         const NoiseModel& noise, int m);

// ---- analog beam-steering structures ----

// Downlink ASE limits for the general multi-stream case, dispatched on the
// diverging array.
double an_dl_asymptotic(const OverlapTables& tables, AntennaRegime regime, double p_t_w,
                        const NoiseModel& noise, int k_users, int m);

// Uplink per-user limits (vector of K values).
arma::vec an_ul_asymptotic(const OverlapTables& tables, AntennaRegime regime,
                           const arma::vec& p_t_per_user_w, const NoiseModel& noise, int m);

// Exact single-stream downlink ASE written with scalar overlaps; matches the
// matrix pipeline with beam-steering beamformers at M = 1.
double an_dl_exact_m1(std::span<const ChannelRealization> channels, double p_t_w,
                      const NoiseModel& noise);

// Closed-form single-stream downlink limits per regime.
double an_dl_limits_m1(std::span<const ChannelRealization> channels, AntennaRegime regime,
                       double p_t_w, const NoiseModel& noise);

// Exact and limiting single-stream uplink per-user expressions.
arma::vec an_ul_exact_m1(std::span<const ChannelRealization> channels,
                         const arma::vec& p_t_per_user_w, const NoiseModel& noise);
arma::vec an_ul_limits_m1(std::span<const ChannelRealization> channels, AntennaRegime regime,
                          const arma::vec& p_t_per_user_w, const NoiseModel& noise);

// Monte Carlo estimate of E[|f_P(phi1, phi2)|^2] over the generator's ray
// angle prior; results are cached per array size.
double mean_sq_overlap(int p, const ChannelParams& params, int samples = 10000,
                       std::uint64_t seed = 0x5EED0F00Dull);

// Large-K, large-N_R downlink saturation value (ln 2)^{-1} / E[|f_{N_T}|^2].
double an_dl_largek_limit(int n_t, const ChannelParams& params);

} // namespace mmwavesim

#endif
