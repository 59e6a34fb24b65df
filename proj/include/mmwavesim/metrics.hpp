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

#ifndef MMWAVESIM_METRICS_HPP
#define MMWAVESIM_METRICS_HPP

#include <armadillo>
#include <span>

#include "mmwavesim/beamformers.hpp"

namespace mmwavesim
{

struct NoiseModel
{
    double bandwidth_hz = 500.0e6;
    double noise_figure_db = 3.0;
    double noise_psd_dbm_hz = -174.0;

    // F * N0 * W in linear watts
    double noise_power_w() const
    {
        return std::pow(10.0, (noise_figure_db + noise_psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
    }
};

// Hardware power draw per component, watts.
struct PowerModel
{
    double p_rfc_w = 0.040;      // RF chain
    double p_dac_w = 0.110;
    double p_adc_w = 0.200;
    double p_pa_w = 0.016;       // power amplifier
    double p_lna_w = 0.030;      // low noise amplifier
    double p_bb_w = 0.243;       // baseband precoding/combining
    double p_ps_w = 0.0195;      // tunable phase shifter
    double p_ps_fixed_w = 0.001; // fixed phase shifter
    double p_sw_w = 0.005;       // switch
    double p_element_w = 0.027;  // phased-array element
    double eta = 2.0;            // PA inefficiency, > 1
    // The hybrid receiver equation as printed scales the LNA term by the
    // transmit array size; the corrected reading uses the receive array.
    bool hy_rx_lna_verbatim = false;

    void validate() const;
};

enum class PowerSide
{
    TX,
    RX
};

struct AseResult
{
    double total = 0.0;   // bit/s/Hz
    arma::vec per_user;   // K entries
    bool regularized = false; // true if any disturbance covariance needed jitter
};

struct GeeResult
{
    double total = 0.0;         // bit/Joule
    arma::vec per_user;         // shares of the total, same denominator
    double consumed_power_w = 0.0; // eta P_T + P_TX,c + K P_RX,c
};

struct SystemDims
{
    int n_t = 0;
    int n_r = 0;
    int k_users = 0;
};

// Sum log-det rate over users with per-user disturbance covariance
// sigma^2 D^H D + (P_T / M K) sum_{l != k} D^H H_k Q_l Q_l^H H_k^H D.
AseResult ase_downlink(std::span<const ChannelRealization> channels, const BeamformerSet& bf,
                       double p_t_w, const NoiseModel& noise, int m);

// Uplink rate of user k with interference sum_{l != k} (P_l / M)
// D_k^H H_l Q_l Q_l^H H_l^H D_k.
double ase_uplink_user(std::span<const ChannelRealization> channels, const BeamformerSet& bf,
                       int k, const arma::vec& p_t_per_user_w, const NoiseModel& noise, int m);

// Circuitry power consumed by one side of the link for the given
// architecture.  `n_other` is the opposite side's antenna count; it is only
// read for the verbatim hybrid receiver formula.
double consumed_power(Architecture kind, PowerSide side, int n_ant, int n_rf, int n_q,
                      const PowerModel& pm, int n_other = 0);

// W * ASE / (eta P_T + P_TX,c + K P_RX,c)
GeeResult gee_downlink(const AseResult& ase, double p_t_w, const BeamformerSet& bf,
                       const SystemDims& dims, const PowerModel& pm, const NoiseModel& noise);

// W * ASE_k / (eta P_{T,k} + P_TX,c) with the transmitter on the user side.
double gee_uplink_user(double ase_k, double p_t_k_w, Architecture kind, const SystemDims& dims,
                       int n_rf_tx, int n_q, const PowerModel& pm, const NoiseModel& noise);

} // namespace mmwavesim

#endif
