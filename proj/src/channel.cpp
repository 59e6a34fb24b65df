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

#include "mmwavesim/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmwavesim
{

namespace
{
constexpr double kPi = 3.14159265358979323846;
// path angles live strictly inside the ULA visible range
constexpr double kAngleMargin = 1e-9;

double clamp_angle(double phi)
{
    const double lim = kPi / 2.0 - kAngleMargin;
    return std::clamp(phi, -lim, lim);
}
} // namespace

void UlaGeometry::validate() const
{
    if (num_elements < 1)
        throw std::invalid_argument("UlaGeometry: num_elements must be >= 1");
    if (element_spacing_wavelengths != 0.5)
        throw std::invalid_argument("UlaGeometry: element spacing is fixed at half wavelength");
}

void ChannelParams::validate() const
{
    if (n_cl < 1 || n_ray_per_cluster < 1)
        throw std::invalid_argument("ChannelParams: n_cl and n_ray_per_cluster must be >= 1");
    if (gain_variance <= 0.0)
        throw std::invalid_argument("ChannelParams: gain_variance must be positive");
    if (angular_spread_deg < 0.0)
        throw std::invalid_argument("ChannelParams: angular_spread_deg must be >= 0");
    if (carrier_hz <= 0.0)
        throw std::invalid_argument("ChannelParams: carrier_hz must be positive");
    if (los_prob_d1_m <= 0.0 || los_prob_d2_m <= 0.0)
        throw std::invalid_argument("ChannelParams: LOS probability distances must be positive");
}

arma::cx_vec ula_response(double phi_rad, int n)
{
    if (n < 1)
        throw std::invalid_argument("ula_response: n must be >= 1");
    if (!std::isfinite(phi_rad))
        throw std::invalid_argument("ula_response: phi must be finite");

    const double scale = 1.0 / std::sqrt(double(n));
    const double step = -kPi * std::sin(phi_rad);
    arma::cx_vec a(n);
    for (int i = 0; i < n; ++i)
        a(i) = std::polar(scale, step * double(i));
    return a;
}

std::complex<double> steering_overlap(double phi1_rad, double phi2_rad, int p)
{
    if (p < 1)
        throw std::invalid_argument("steering_overlap: p must be >= 1");
    if (!std::isfinite(phi1_rad) || !std::isfinite(phi2_rad))
        throw std::invalid_argument("steering_overlap: angles must be finite");

    const double delta = std::sin(phi1_rad) - std::sin(phi2_rad);
    // identical (or aliased, delta = +-2) steering vectors: the ratio is 0/0
    // but the inner product is exactly 1
    if (delta == 0.0 || std::abs(delta) == 2.0)
        return {1.0, 0.0};

    const std::complex<double> j(0.0, 1.0);
    const std::complex<double> num = 1.0 - std::exp(j * (kPi * delta * double(p)));
    const std::complex<double> den = 1.0 - std::exp(j * (kPi * delta));
    return num / (double(p) * den);
}

double path_loss_linear(double d_m, bool los, const ChannelParams& params, double shadow_db)
{
    if (!(d_m > 0.0))
        throw std::invalid_argument("path_loss_linear: distance must be positive");
    const double exponent = los ? params.pathloss_model.exponent_los
                                : params.pathloss_model.exponent_nlos;
    const double pl_db =
        params.pathloss_model.intercept_db + 10.0 * exponent * std::log10(d_m) + shadow_db;
    return std::pow(10.0, -pl_db / 10.0);
}

double los_probability(double d_m, const ChannelParams& params)
{
    if (!(d_m > 0.0))
        throw std::invalid_argument("los_probability: distance must be positive");
    const double d1 = params.los_prob_d1_m;
    const double d2 = params.los_prob_d2_m;
    const double e = std::exp(-d_m / d2);
    const double p = std::min(d1 / d_m, 1.0) * (1.0 - e) + e;
    return std::clamp(p, 0.0, 1.0);
}

arma::cx_vec ChannelRealization::effective_gains() const
{
    arma::cx_vec g(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        g(i) = paths[i].effective_gain();
    return g;
}

arma::vec ChannelRealization::aods() const
{
    arma::vec v(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        v(i) = paths[i].aod_rad;
    return v;
}

arma::vec ChannelRealization::aoas() const
{
    arma::vec v(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        v(i) = paths[i].aoa_rad;
    return v;
}

arma::cx_mat ChannelRealization::reconstruct() const
{
    arma::cx_mat h(matrix.n_rows, matrix.n_cols, arma::fill::zeros);
    for (const PathComponent& p : paths)
    {
        const arma::cx_vec ar = ula_response(p.aoa_rad, int(matrix.n_rows));
        const arma::cx_vec at = ula_response(p.aod_rad, int(matrix.n_cols));
        h += (gamma * p.effective_gain()) * (ar * at.t());
    }
    return h;
}

ChannelRealization generate_channel(const ChannelParams& params, int n_rx, int n_tx,
                                    double distance_m, RngStream& stream)
{
    params.validate();
    if (n_rx < 1 || n_tx < 1)
        throw std::invalid_argument("generate_channel: array sizes must be >= 1");
    if (!(distance_m > 0.0))
        throw std::invalid_argument("generate_channel: distance must be positive");

    const int n_scatter = params.n_cl * params.n_ray_per_cluster;
    const double spread_rad = params.angular_spread_deg * kPi / 180.0;
    const double laplace_scale = spread_rad / std::sqrt(2.0); // rms spread -> scale

    // Draw order is fixed and independent of the array sizes so that the
    // same stream reproduces the same path set at any (n_rx, n_tx).
    std::vector<double> center_aod(params.n_cl), center_aoa(params.n_cl);
    for (int i = 0; i < params.n_cl; ++i)
    {
        center_aod[i] = stream.uniform(-kPi / 2.0, kPi / 2.0);
        center_aoa[i] = stream.uniform(-kPi / 2.0, kPi / 2.0);
    }

    std::vector<PathComponent> paths;
    paths.reserve(std::size_t(n_scatter) + 1);
    for (int i = 0; i < params.n_cl; ++i)
    {
        for (int l = 0; l < params.n_ray_per_cluster; ++l)
        {
            PathComponent p;
            p.aod_rad = clamp_angle(center_aod[std::size_t(i)] + stream.laplace(laplace_scale));
            p.aoa_rad = clamp_angle(center_aoa[std::size_t(i)] + stream.laplace(laplace_scale));
            p.gain = stream.complex_normal() * std::sqrt(params.gain_variance);
            p.cluster_index = i;
            p.is_los = false;
            paths.push_back(p);
        }
    }

    // one NLOS shadowing draw per link, shared by all scattered rays
    const double shadow_nlos =
        stream.normal() * params.pathloss_model.shadow_sigma_nlos_db;
    const double l_nlos = path_loss_linear(distance_m, false, params, shadow_nlos);
    for (PathComponent& p : paths)
        p.path_loss_linear = l_nlos;

    if (params.los_enabled)
    {
        const double p_los = los_probability(distance_m, params);
        if (stream.bernoulli(p_los))
        {
            const double theta = stream.uniform(0.0, 2.0 * kPi);
            PathComponent los;
            los.aod_rad = stream.uniform(-kPi / 2.0, kPi / 2.0);
            los.aoa_rad = stream.uniform(-kPi / 2.0, kPi / 2.0);
            const double shadow_los =
                stream.normal() * params.pathloss_model.shadow_sigma_los_db;
            los.path_loss_linear = path_loss_linear(distance_m, true, params, shadow_los);
            // gamma * sqrt(N) = sqrt(N_R N_T), so this gain reproduces the
            // sqrt(N_R N_T L(d)) e^{j theta} LOS scaling through the common sum
            los.gain = std::polar(std::sqrt(double(n_scatter)), theta);
            los.cluster_index = -1;
            los.is_los = true;
            paths.push_back(los);
        }
    }

    std::stable_sort(paths.begin(), paths.end(),
                     [](const PathComponent& a, const PathComponent& b)
                     { return a.strength() > b.strength(); });

    ChannelRealization h;
    h.gamma = std::sqrt(double(n_rx) * double(n_tx) / double(n_scatter));
    h.n_cl = params.n_cl;
    h.n_ray = params.n_ray_per_cluster;
    h.distance_m = distance_m;
    h.paths = std::move(paths);
    h.matrix.zeros(arma::uword(n_rx), arma::uword(n_tx));
    for (const PathComponent& p : h.paths)
    {
        const arma::cx_vec ar = ula_response(p.aoa_rad, n_rx);
        const arma::cx_vec at = ula_response(p.aod_rad, n_tx);
        h.matrix += (h.gamma * p.effective_gain()) * (ar * at.t());
    }
    return h;
}

} // namespace mmwavesim
