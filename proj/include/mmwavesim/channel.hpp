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

#ifndef MMWAVESIM_CHANNEL_HPP
#define MMWAVESIM_CHANNEL_HPP

#include <armadillo>
#include <complex>
#include <vector>

#include "mmwavesim/rng.hpp"

namespace mmwavesim
{

// Uniform linear array with half-wavelength element spacing.
struct UlaGeometry
{
    int num_elements = 1;
    double element_spacing_wavelengths = 0.5;

    void validate() const;
};

// One propagation path: complex small-scale gain, departure/arrival angles
// and the large-scale attenuation of that path.
struct PathComponent
{
    std::complex<double> gain;   // small-scale coefficient
    double aod_rad = 0.0;        // angle of departure
    double aoa_rad = 0.0;        // angle of arrival
    double path_loss_linear = 0; // large-scale attenuation (power gain <= 1)
    int cluster_index = 0;       // -1 for the LOS component
    bool is_los = false;

    // |gain| * sqrt(path_loss); paths are kept sorted by this, descending
    double strength() const
    {
        return std::abs(gain) * std::sqrt(path_loss_linear);
    }

    std::complex<double> effective_gain() const
    {
        return gain * std::sqrt(path_loss_linear);
    }
};

struct PathLossModel
{
    double intercept_db = 69.8;       // at 1 m, 73 GHz free-space-like
    double exponent_los = 2.0;
    double exponent_nlos = 3.19;
    double shadow_sigma_los_db = 5.2;
    double shadow_sigma_nlos_db = 8.29;
};

struct ChannelParams
{
    int n_cl = 2;
    int n_ray_per_cluster = 20;
    double gain_variance = 1.0;
    double angular_spread_deg = 5.0;
    bool los_enabled = true;
    double carrier_hz = 73.0e9;
    PathLossModel pathloss_model;
    double los_prob_d1_m = 20.0;
    double los_prob_d2_m = 39.0;

    void validate() const;
};

// A generated channel matrix together with the path list it was built from.
// The matrix always equals gamma * sum_i g_i sqrt(L_i) a_r(aoa_i) a_t^H(aod_i)
// over all entries of `paths` (the LOS entry, when present, carries a gain of
// sqrt(N) e^{j theta} so that the same sum reproduces its proper scaling).
struct ChannelRealization
{
    arma::cx_mat matrix;              // N_R x N_T
    std::vector<PathComponent> paths; // sorted by descending strength
    double gamma = 0.0;               // sqrt(N_R N_T / (n_cl * n_ray))
    int n_cl = 0;
    int n_ray = 0;
    double distance_m = 0.0;

    int n_rx() const { return int(matrix.n_rows); }
    int n_tx() const { return int(matrix.n_cols); }

    // Effective (lumped) path coefficients g_i sqrt(L_i), in path order
    arma::cx_vec effective_gains() const;
    arma::vec aods() const;
    arma::vec aoas() const;

    // Rebuild the matrix from the path list; used to check the invariant
    arma::cx_mat reconstruct() const;
};

// Unit-norm ULA response: element m equals (1/sqrt(n)) exp(-j pi m sin phi).
arma::cx_vec ula_response(double phi_rad, int n);

// Inner product a^H(phi1) a(phi2) of two length-p ULA responses.  Returns
// exactly 1 when sin(phi1) and sin(phi2) coincide (including the aliased
// case where they differ by 2).
std::complex<double> steering_overlap(double phi1_rad, double phi2_rad, int p);

// Linear power attenuation 10^(-PL/10) with
// PL = intercept + 10 * exponent * log10(d) + shadow, exponent picked by los.
double path_loss_linear(double d_m, bool los, const ChannelParams& params, double shadow_db);

// LOS probability p(d) = min(d1/d, 1) (1 - e^{-d/d2}) + e^{-d/d2}, in [0, 1].
double los_probability(double d_m, const ChannelParams& params);

// Draw one clustered channel realization.  The random draws depend only on
// `params`, `distance_m` and the stream, never on the array sizes, so the
// same stream yields the same path set at any (n_rx, n_tx).
ChannelRealization generate_channel(const ChannelParams& params, int n_rx, int n_tx,
                                    double distance_m, RngStream& stream);

} // namespace mmwavesim

#endif
