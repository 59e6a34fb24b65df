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

#ifndef MMWAVESIM_EXPERIMENTS_HPP
#define MMWAVESIM_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmwavesim/asymptotics.hpp"
#include "mmwavesim/metrics.hpp"
#include "mmwavesim/optimize.hpp"

namespace mmwavesim
{

struct BeamformerOptions
{
    bool cm_hy_targets_pzf = false;     // follow the literal text for the CM-HY target
    Architecture sw_target = Architecture::CM_FD;
    Architecture sw_phsh_target = Architecture::CM_FD;
    double an_min_sep_deg = 5.0;
    int n_q = 8;
    HybridOptions hybrid;
};

struct ScenarioConfig
{
    int k_users = 10;
    int m_streams = 3;
    int n_t = 64;
    int n_r = 16;
    double cell_radius_m = 100.0;
    double min_distance_m = 5.0;
    double p_t_dbw = 0.0;
    int trials = 500;
    std::uint64_t seed = 1;
    bool uplink = false;
    // 0 means "use the rule": K*M chains at the BS, M at the terminal.
    int n_rf_bs = 0;
    int n_rf_terminal = 0;
    ChannelParams channel;
    NoiseModel noise;
    PowerModel power;
    BeamformerOptions beamformer;
    std::vector<Architecture> architectures = {
        Architecture::CM_FD, Architecture::PZF_FD, Architecture::CM_HY, Architecture::PZF_HY,
        Architecture::AN,    Architecture::SW_PHSH, Architecture::SW};

    double p_t_w() const { return std::pow(10.0, p_t_dbw / 10.0); }
    int rf_bs() const { return n_rf_bs > 0 ? n_rf_bs : k_users * m_streams; }
    int rf_terminal() const { return n_rf_terminal > 0 ? n_rf_terminal : m_streams; }

    void validate() const;
};

// Strict JSON round-trip: unknown keys are rejected at every level.
ScenarioConfig scenario_from_json_text(const std::string& text);
ScenarioConfig scenario_from_json_file(const std::string& path);
std::string scenario_to_json_text(const ScenarioConfig& cfg);

// Construct the full beamformer set for one architecture.  `uplink` selects
// the RF-chain split and, for PZF, the mirrored construction on the
// conjugate-transposed channels.
BeamformerSet build_beamformer_set(Architecture arch,
                                   std::span<const ChannelRealization> channels,
                                   const ScenarioConfig& cfg, bool uplink);

struct ArchOutcome
{
    double ase = 0.0; // sum rate (downlink) or mean per-user rate (uplink)
    double gee = 0.0;
    arma::vec ase_per_user;
    arma::vec gee_per_user;
};

struct TrialResult
{
    // one entry per requested architecture; empty when that construction
    // was infeasible for this trial
    std::vector<std::optional<ArchOutcome>> per_arch;
};

// Draw user positions and channels for (cfg, trial_index) deterministically.
std::vector<ChannelRealization> draw_trial_channels(const ScenarioConfig& cfg,
                                                    std::uint64_t trial_index,
                                                    std::uint64_t point_key = 0);

TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t trial_index,
                      std::uint64_t point_key = 0);

enum class SweepAxis
{
    N_T,
    N_R,
    P_T_DBW
};

std::string to_string(SweepAxis axis);

struct ArchPointStats
{
    double ase_mean = 0.0;
    double ase_std = 0.0;
    double gee_mean = 0.0;
    double gee_std = 0.0;
    int samples = 0; // feasible trials at this point
};

struct SweepResult
{
    std::string axis_name;
    std::vector<double> axis_values;
    std::vector<Architecture> architectures;
    // stats[arch][point]
    std::vector<std::vector<ArchPointStats>> stats;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string config_json;
};

// Run `cfg.trials` trials at every axis value.  Substreams are keyed on the
// axis value itself, so permuting `values` permutes the result columns and
// nothing else.  Trials run on `threads` workers (0 = hardware default) with
// a fixed pairwise reduction, making the output independent of the thread
// count.
SweepResult sweep(const ScenarioConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                  int threads = 0);

void write_sweep_csv(const SweepResult& result, const std::string& path);
void write_sweep_json(const SweepResult& result, const std::string& path);

struct ConvergenceRow
{
    std::string formula;
    double dimension = 0;
    double exact_mean = 0.0;
    double asymptotic_mean = 0.0;
    double rel_error = 0.0;
};

struct ConvergenceReport
{
    std::vector<ConvergenceRow> rows;
};

// Compare exact Monte Carlo ASE with every applicable closed form along a
// ladder of array sizes.  The non-ladder dimension is held at cfg.n_r or
// cfg.n_t.  Paths are drawn once per (trial, user) and reused across ladder
// points.
ConvergenceReport validate_asymptotics(const ScenarioConfig& cfg, SweepAxis axis,
                                       const std::vector<int>& ladder, int threads = 0);

void write_convergence_csv(const ConvergenceReport& report, const std::string& path);

// Asymptotic PZF-FD downlink GEE as a function of (N_T, N_R, P_T), built
// from normalized eigenvalues sampled over `sample_trials` channel draws at
// the configured dimensions.
GeeObjective make_asymptotic_pzf_gee_objective(const ScenarioConfig& cfg, int sample_trials = 50);

// Numerically stable mean/stddev used by the sweep aggregation: pairwise
// summation with a fixed tree shape.
double pairwise_sum(std::span<const double> values);

} // namespace mmwavesim

#endif
