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

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmwavesim/experiments.hpp"

using namespace mmwavesim;

namespace
{

struct CommonArgs
{
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int trials = 0;
    int m_streams = 0;
    int k_users = 0;
    int n_t = 0;
    int n_r = 0;
    double p_t_dbw = -1e9;
    std::vector<std::string> archs;
    bool uplink = false;
    int threads = 0;
};

// Shared flags.  Scenario fields keep the given per-command defaults when
// neither a config file nor an explicit flag provides them; explicit flags
// always win over the config file.
void add_common(CLI::App* cmd, CommonArgs& a, int def_nt, int def_nr, double def_pt, int def_m)
{
    cmd->add_option("--config", a.config_path, "scenario config JSON (strict keys)");
    cmd->add_option("--out", a.out_path, "output CSV path (a .json companion is written too)");
    cmd->add_option("--seed", a.seed, "root RNG seed")->default_val(std::uint64_t(1));
    cmd->add_option("--trials", a.trials, "Monte Carlo trials per point")->default_val(500);
    cmd->add_option("--m", a.m_streams, "streams per user")->default_val(def_m);
    cmd->add_option("--k", a.k_users, "number of users")->default_val(10);
    cmd->add_option("--nt", a.n_t, "transmit antennas")->default_val(def_nt);
    cmd->add_option("--nr", a.n_r, "receive antennas")->default_val(def_nr);
    cmd->add_option("--pt-dbw", a.p_t_dbw, "transmit power in dBW")->default_val(def_pt);
    cmd->add_option("--arch", a.archs,
                    "architectures (CM-FD, PZF-FD, CM-HY, PZF-HY, AN, SW-PHSH, SW)")
        ->delimiter(',');
    cmd->add_flag("--uplink", a.uplink, "evaluate the uplink (per-user ASE/GEE)");
    cmd->add_option("--threads", a.threads, "worker threads (0 = hardware)")->default_val(0);
}

ScenarioConfig build_config(const CLI::App* cmd, const CommonArgs& a)
{
    ScenarioConfig cfg;
    if (!a.config_path.empty())
        cfg = scenario_from_json_file(a.config_path);

    auto passed = [&](const char* name) { return cmd->count(name) > 0; };
    const bool have_file = !a.config_path.empty();
    // without a config file the per-command defaults apply; with one, only
    // explicit flags override it
    if (!have_file || passed("--seed"))
        cfg.seed = a.seed;
    if (!have_file || passed("--trials"))
        cfg.trials = a.trials;
    if (!have_file || passed("--m"))
        cfg.m_streams = a.m_streams;
    if (!have_file || passed("--k"))
        cfg.k_users = a.k_users;
    if (!have_file || passed("--nt"))
        cfg.n_t = a.n_t;
    if (!have_file || passed("--nr"))
        cfg.n_r = a.n_r;
    if (!have_file || passed("--pt-dbw"))
        cfg.p_t_dbw = a.p_t_dbw;
    if (passed("--uplink"))
        cfg.uplink = a.uplink;
    if (!a.archs.empty())
    {
        cfg.architectures.clear();
        for (const std::string& name : a.archs)
            cfg.architectures.push_back(architecture_from_string(name));
    }
    cfg.validate();
    return cfg;
}

std::string json_companion(const std::string& csv_path)
{
    const std::size_t dot = csv_path.rfind('.');
    if (dot == std::string::npos)
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

void print_sweep(const SweepResult& r)
{
    std::printf("%-10s %-8s %12s %12s %14s %14s %8s\n", r.axis_name.c_str(), "arch", "ase_mean",
                "ase_std", "gee_mean", "gee_std", "samples");
    for (std::size_t vi = 0; vi < r.axis_values.size(); ++vi)
        for (std::size_t a = 0; a < r.architectures.size(); ++a)
        {
            const ArchPointStats& s = r.stats[a][vi];
            std::printf("%-10.4g %-8s %12.4f %12.4f %14.5e %14.5e %8d\n", r.axis_values[vi],
                        to_string(r.architectures[a]).c_str(), s.ase_mean, s.ase_std, s.gee_mean,
                        s.gee_std, s.samples);
        }
}

int run_sweep(const CLI::App* cmd, const CommonArgs& a, SweepAxis axis,
              const std::vector<double>& values, const std::string& default_out)
{
    const ScenarioConfig cfg = build_config(cmd, a);
    const SweepResult r = sweep(cfg, axis, values, a.threads);
    print_sweep(r);
    const std::string out = a.out_path.empty() ? default_out : a.out_path;
    write_sweep_csv(r, out);
    write_sweep_json(r, json_companion(out));
    std::printf("wrote %s and %s\n", out.c_str(), json_companion(out).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mmWave doubly massive MIMO beamforming: spectral and energy efficiency "
                 "simulation"};
    app.require_subcommand(1);

    // sweep over the number of transmit antennas
    CommonArgs a_nt;
    std::vector<double> nt_values = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    CLI::App* c_nt = app.add_subcommand("sweep-nt", "downlink ASE/GEE versus N_T");
    add_common(c_nt, a_nt, 64, 30, 0.0, 3);
    c_nt->add_option("--values", nt_values, "N_T grid")->delimiter(',');

    // sweep over the number of receive antennas
    CommonArgs a_nr;
    std::vector<double> nr_values = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    CLI::App* c_nr = app.add_subcommand("sweep-nr", "downlink ASE/GEE versus N_R");
    add_common(c_nr, a_nr, 50, 30, 0.0, 3);
    c_nr->add_option("--values", nr_values, "N_R grid")->delimiter(',');

    // sweep over the transmit power
    CommonArgs a_pt;
    std::vector<double> pt_values = {-30, -25, -20, -15, -10, -5, 0, 5, 10};
    CLI::App* c_pt = app.add_subcommand("sweep-pt", "downlink ASE/GEE versus P_T");
    add_common(c_pt, a_pt, 100, 30, 0.0, 1);
    c_pt->add_option("--values", pt_values, "P_T grid in dBW")->delimiter(',');

    // asymptotic-formula validation
    CommonArgs a_va;
    std::string va_axis = "nt";
    std::vector<int> ladder = {32, 64, 128, 256};
    CLI::App* c_va =
        app.add_subcommand("validate-asymptotics", "exact versus closed-form ASE along a ladder");
    add_common(c_va, a_va, 50, 30, 0.0, 3);
    c_va->add_option("--axis", va_axis, "ladder axis: nt or nr")
        ->check(CLI::IsMember({"nt", "nr"}));
    c_va->add_option("--ladder", ladder, "array sizes")->delimiter(',');

    // GEE maximization
    CommonArgs a_opt;
    std::vector<int> nt_grid = {16, 32, 64, 96, 128, 192, 256};
    std::vector<int> nr_grid = {8, 16, 32, 64};
    double pmin_dbw = -40.0, pmax_dbw = 10.0;
    int sample_trials = 50;
    CLI::App* c_opt = app.add_subcommand(
        "optimize-gee", "maximize the asymptotic PZF-FD GEE over N_T, N_R and P_T");
    add_common(c_opt, a_opt, 64, 16, 0.0, 1);
    c_opt->add_option("--nt-grid", nt_grid, "N_T grid")->delimiter(',');
    c_opt->add_option("--nr-grid", nr_grid, "N_R grid")->delimiter(',');
    c_opt->add_option("--pmin-dbw", pmin_dbw, "lower power bound, dBW");
    c_opt->add_option("--pmax-dbw", pmax_dbw, "upper power bound, dBW");
    c_opt->add_option("--sample-trials", sample_trials,
                      "channel draws used to sample the normalized eigenvalues");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (c_nt->parsed())
            return run_sweep(c_nt, a_nt, SweepAxis::N_T, nt_values, "sweep_nt.csv");
        if (c_nr->parsed())
            return run_sweep(c_nr, a_nr, SweepAxis::N_R, nr_values, "sweep_nr.csv");
        if (c_pt->parsed())
            return run_sweep(c_pt, a_pt, SweepAxis::P_T_DBW, pt_values, "sweep_pt.csv");

        if (c_va->parsed())
        {
            const ScenarioConfig cfg = build_config(c_va, a_va);
            const SweepAxis axis = (va_axis == "nt") ? SweepAxis::N_T : SweepAxis::N_R;
            const ConvergenceReport rep = validate_asymptotics(cfg, axis, ladder, a_va.threads);
            std::printf("%-10s %10s %14s %16s %12s\n", "formula", "dim", "exact_mean",
                        "asymptotic_mean", "rel_error");
            for (const ConvergenceRow& row : rep.rows)
                std::printf("%-10s %10.0f %14.5f %16.5f %12.5f\n", row.formula.c_str(),
                            row.dimension, row.exact_mean, row.asymptotic_mean, row.rel_error);
            const std::string out =
                a_va.out_path.empty() ? std::string("validate_asymptotics.csv") : a_va.out_path;
            write_convergence_csv(rep, out);
            std::printf("wrote %s\n", out.c_str());
            return 0;
        }

        if (c_opt->parsed())
        {
            const ScenarioConfig cfg = build_config(c_opt, a_opt);
            const GeeObjective obj = make_asymptotic_pzf_gee_objective(cfg, sample_trials);
            const double pmin = std::pow(10.0, pmin_dbw / 10.0);
            const double pmax = std::pow(10.0, pmax_dbw / 10.0);
            const AltMaxResult r = alternating_gee_max(obj, nt_grid, nr_grid, pmin, pmax);
            std::printf("best GEE %.5e bit/J at N_T=%d, N_R=%d, P_T=%.4f W (%+.2f dBW) "
                        "after %d rounds\n",
                        r.gee, r.n_t, r.n_r, r.p_t_w, 10.0 * std::log10(r.p_t_w), r.rounds);
            return 0;
        }
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
