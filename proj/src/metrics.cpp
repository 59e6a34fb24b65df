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

#include "mmwavesim/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace mmwavesim
{

namespace
{
constexpr double kLn2 = 0.69314718055994530942;

// log det of a Hermitian positive definite matrix, with the documented
// trace-scaled jitter fallback for near-singular disturbance covariances.
double log_det_hermitian(arma::cx_mat x, bool* regularized)
{
    x = 0.5 * (x + x.t());
    double val = 0.0;
    if (arma::log_det_sympd(val, x))
        return val;
    const double tr = std::abs(arma::trace(x).real());
    const double jitter = 1e-12 * std::max(tr, 1e-300) / double(x.n_rows);
    x.diag() += jitter;
    if (regularized != nullptr)
        *regularized = true;
    if (arma::log_det_sympd(val, x))
        return val;
    const std::complex<double> ld = arma::log_det(x);
    return ld.real();
}

// log2 det(I + R^{-1} S) for Hermitian PD R and Hermitian PSD S
double log2_det_ratio(const arma::cx_mat& r, const arma::cx_mat& s, bool* regularized)
{
    const double num = log_det_hermitian(r + s, regularized);
    const double den = log_det_hermitian(r, regularized);
    return std::max(0.0, (num - den) / kLn2);
}
} // namespace

void PowerModel::validate() const
{
    const double vals[] = {p_rfc_w, p_dac_w,      p_adc_w, p_pa_w,     p_lna_w,
                           p_bb_w,  p_ps_w,       p_ps_fixed_w, p_sw_w, p_element_w};
    for (double v : vals)
        if (v < 0.0)
            throw std::invalid_argument("PowerModel: component powers must be >= 0");
    if (!(eta > 1.0))
        throw std::invalid_argument("PowerModel: eta must be > 1");
}

AseResult ase_downlink(std::span<const ChannelRealization> channels, const BeamformerSet& bf,
                       double p_t_w, const NoiseModel& noise, int m)
{
    const int k_users = int(channels.size());
    if (bf.num_users() != k_users)
        throw std::invalid_argument("ase_downlink: beamformer/channel count mismatch");
    if (p_t_w < 0.0)
        throw std::invalid_argument("ase_downlink: transmit power must be >= 0");

    const double sigma2 = noise.noise_power_w();
    const double share = p_t_w / (double(k_users) * double(m));

    AseResult out;
    out.per_user.zeros(arma::uword(k_users));
    for (int k = 0; k < k_users; ++k)
    {
        const arma::cx_mat& d = bf.postcoders[std::size_t(k)];
        const arma::cx_mat dh_h = d.t() * channels[std::size_t(k)].matrix; // M x N_T

        arma::cx_mat r = sigma2 * (d.t() * d);
        for (int l = 0; l < k_users; ++l)
        {
            if (l == k)
                continue;
            const arma::cx_mat c = dh_h * bf.precoders[std::size_t(l)];
            r += share * (c * c.t());
        }
        const arma::cx_mat b = dh_h * bf.precoders[std::size_t(k)];
        const arma::cx_mat s = share * (b * b.t());
        out.per_user(arma::uword(k)) = log2_det_ratio(r, s, &out.regularized);
    }
    out.total = arma::accu(out.per_user);
    return out;
}

double ase_uplink_user(std::span<const ChannelRealization> channels, const BeamformerSet& bf,
                       int k, const arma::vec& p_t_per_user_w, const NoiseModel& noise, int m)
{
    const int k_users = int(channels.size());
    if (k < 0 || k >= k_users)
        throw std::invalid_argument("ase_uplink_user: user index out of range");
    if (int(p_t_per_user_w.n_elem) != k_users)
        throw std::invalid_argument("ase_uplink_user: need one power per user");

    const double sigma2 = noise.noise_power_w();
    const arma::cx_mat& d = bf.postcoders[std::size_t(k)];

    arma::cx_mat r = sigma2 * (d.t() * d);
    for (int l = 0; l < k_users; ++l)
    {
        if (l == k)
            continue;
        const arma::cx_mat c =
            d.t() * channels[std::size_t(l)].matrix * bf.precoders[std::size_t(l)];
        r += (p_t_per_user_w(arma::uword(l)) / double(m)) * (c * c.t());
    }
    const arma::cx_mat b = d.t() * channels[std::size_t(k)].matrix * bf.precoders[std::size_t(k)];
    const arma::cx_mat s = (p_t_per_user_w(arma::uword(k)) / double(m)) * (b * b.t());
    return log2_det_ratio(r, s, nullptr);
}

double consumed_power(Architecture kind, PowerSide side, int n_ant, int n_rf, int n_q,
                      const PowerModel& pm, int n_other)
{
    if (n_ant < 1)
        throw std::invalid_argument("consumed_power: n_ant must be >= 1");
    const double na = double(n_ant);
    const double nrf = double(n_rf);

    switch (kind)
    {
    case Architecture::CM_FD:
    case Architecture::PZF_FD:
        return (side == PowerSide::TX)
                   ? na * (pm.p_rfc_w + pm.p_dac_w + pm.p_pa_w) + pm.p_bb_w
                   : na * (pm.p_rfc_w + pm.p_adc_w + pm.p_lna_w) + pm.p_bb_w;

    case Architecture::CM_HY:
    case Architecture::PZF_HY:
        if (n_rf < 1)
            throw std::invalid_argument("consumed_power: hybrid needs n_rf >= 1");
        if (side == PowerSide::TX)
            return nrf * (pm.p_rfc_w + pm.p_dac_w + na * pm.p_ps_w) + na * pm.p_pa_w + pm.p_bb_w;
        else
        {
            // the receiver equation as printed multiplies the LNA term by the
            // transmit array size; the default reading uses the receive array
            double lna_count = na;
            if (pm.hy_rx_lna_verbatim)
            {
                if (n_other < 1)
                    throw std::invalid_argument(
                        "consumed_power: verbatim hybrid RX needs the transmit antenna count");
                lna_count = double(n_other);
            }
            return nrf * (pm.p_rfc_w + pm.p_adc_w + na * pm.p_ps_w) + lna_count * pm.p_lna_w +
                   pm.p_bb_w;
        }

    case Architecture::AN:
        if (n_rf < 1)
            throw std::invalid_argument("consumed_power: analog needs n_rf >= 1");
        return (side == PowerSide::TX)
                   ? nrf * (pm.p_rfc_w + na * pm.p_element_w + pm.p_dac_w)
                   : nrf * (pm.p_rfc_w + na * pm.p_element_w + pm.p_adc_w);

    case Architecture::SW_PHSH:
        if (n_rf < 1 || n_q < 1)
            throw std::invalid_argument("consumed_power: SW-PHSH needs n_rf and n_q >= 1");
        return (side == PowerSide::TX)
                   ? nrf * (pm.p_rfc_w + pm.p_dac_w + double(n_q) * pm.p_ps_fixed_w) +
                         na * (nrf * pm.p_sw_w + pm.p_pa_w) + pm.p_bb_w
                   : nrf * (pm.p_rfc_w + pm.p_adc_w + double(n_q) * pm.p_ps_fixed_w) +
                         na * (nrf * pm.p_sw_w + pm.p_lna_w) + pm.p_bb_w;

    case Architecture::SW:
        if (n_rf < 1)
            throw std::invalid_argument("consumed_power: SW needs n_rf >= 1");
        return (side == PowerSide::TX)
                   ? nrf * (pm.p_rfc_w + pm.p_dac_w + pm.p_sw_w) + nrf * pm.p_pa_w + pm.p_bb_w
                   : nrf * (pm.p_rfc_w + pm.p_adc_w + pm.p_sw_w) + nrf * pm.p_lna_w + pm.p_bb_w;
    }
    throw std::invalid_argument("consumed_power: unknown architecture");
}

GeeResult gee_downlink(const AseResult& ase, double p_t_w, const BeamformerSet& bf,
                       const SystemDims& dims, const PowerModel& pm, const NoiseModel& noise)
{
    pm.validate();
    const double p_tx_c =
        consumed_power(bf.kind, PowerSide::TX, dims.n_t, bf.n_rf_tx, bf.n_q, pm, dims.n_r);
    const double p_rx_c =
        consumed_power(bf.kind, PowerSide::RX, dims.n_r, bf.n_rf_rx, bf.n_q, pm, dims.n_t);
    const double denom = pm.eta * p_t_w + p_tx_c + double(dims.k_users) * p_rx_c;

    GeeResult out;
    out.consumed_power_w = denom;
    out.total = noise.bandwidth_hz * ase.total / denom;
    out.per_user = noise.bandwidth_hz * ase.per_user / denom;
    return out;
}

double gee_uplink_user(double ase_k, double p_t_k_w, Architecture kind, const SystemDims& dims,
                       int n_rf_tx, int n_q, const PowerModel& pm, const NoiseModel& noise)
{
    pm.validate();
    const double p_tx_c =
        consumed_power(kind, PowerSide::TX, dims.n_t, n_rf_tx, n_q, pm, dims.n_r);
    return noise.bandwidth_hz * ase_k / (pm.eta * p_t_k_w + p_tx_c);
}

} // namespace mmwavesim
