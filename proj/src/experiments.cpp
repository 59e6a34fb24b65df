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

#include "mmwavesim/experiments.hpp"

#include <atomic>
#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace mmwavesim
{

using json = nlohmann::ordered_json;

namespace
{

void reject_unknown_keys(const json& j, std::initializer_list<const char*> keys,
                         const std::string& ctx)
{
    for (const auto& item : j.items())
    {
        bool known = false;
        for (const char* k : keys)
        {
            if (item.key() == k)
            {
                known = true;
                break;
            }
        }
        if (!known)
            throw std::invalid_argument("unknown key '" + item.key() + "' in " + ctx);
    }
}

template <typename T>
void read_if(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

std::uint64_t hash_double(double v)
{
    if (v == 0.0)
        v = 0.0; // fold -0.0 into +0.0
    return std::bit_cast<std::uint64_t>(v);
}

// trial substream purposes
constexpr std::uint64_t kPurposePosition = 1;
constexpr std::uint64_t kPurposeChannel = 2;

} // namespace

void ScenarioConfig::validate() const
{
    if (k_users < 1)
        throw std::invalid_argument("ScenarioConfig: k_users must be >= 1");
    if (m_streams < 1)
        throw std::invalid_argument("ScenarioConfig: m_streams must be >= 1");
    if (n_t < 1 || n_r < 1)
        throw std::invalid_argument("ScenarioConfig: array sizes must be >= 1");
    if (!(cell_radius_m > 0.0) || !(min_distance_m > 0.0) || min_distance_m >= cell_radius_m)
        throw std::invalid_argument("ScenarioConfig: need 0 < min_distance_m < cell_radius_m");
    if (trials < 1)
        throw std::invalid_argument("ScenarioConfig: trials must be >= 1");
    if (architectures.empty())
        throw std::invalid_argument("ScenarioConfig: at least one architecture is required");
    channel.validate();
    power.validate();
}

ScenarioConfig scenario_from_json_text(const std::string& text)
{
    const json j = json::parse(text);
    ScenarioConfig cfg;

    reject_unknown_keys(j,
                        {"k_users", "m_streams", "n_t", "n_r", "cell_radius_m", "min_distance_m",
                         "p_t_dbw", "trials", "seed", "uplink", "n_rf_bs", "n_rf_terminal",
                         "channel", "noise", "power", "beamformer", "architectures"},
                        "scenario");
    read_if(j, "k_users", cfg.k_users);
    read_if(j, "m_streams", cfg.m_streams);
    read_if(j, "n_t", cfg.n_t);
    read_if(j, "n_r", cfg.n_r);
    read_if(j, "cell_radius_m", cfg.cell_radius_m);
    read_if(j, "min_distance_m", cfg.min_distance_m);
    read_if(j, "p_t_dbw", cfg.p_t_dbw);
    read_if(j, "trials", cfg.trials);
    read_if(j, "seed", cfg.seed);
    read_if(j, "uplink", cfg.uplink);
    read_if(j, "n_rf_bs", cfg.n_rf_bs);
    read_if(j, "n_rf_terminal", cfg.n_rf_terminal);

    if (j.contains("channel"))
    {
        const json& c = j.at("channel");
        reject_unknown_keys(c,
                            {"n_cl", "n_ray_per_cluster", "gain_variance", "angular_spread_deg",
                             "los_enabled", "carrier_hz", "pathloss_model", "los_prob_d1_m",
                             "los_prob_d2_m"},
                            "channel");
        read_if(c, "n_cl", cfg.channel.n_cl);
        read_if(c, "n_ray_per_cluster", cfg.channel.n_ray_per_cluster);
        read_if(c, "gain_variance", cfg.channel.gain_variance);
        read_if(c, "angular_spread_deg", cfg.channel.angular_spread_deg);
        read_if(c, "los_enabled", cfg.channel.los_enabled);
        read_if(c, "carrier_hz", cfg.channel.carrier_hz);
        read_if(c, "los_prob_d1_m", cfg.channel.los_prob_d1_m);
        read_if(c, "los_prob_d2_m", cfg.channel.los_prob_d2_m);
        if (c.contains("pathloss_model"))
        {
            const json& p = c.at("pathloss_model");
            reject_unknown_keys(p,
                                {"intercept_db", "exponent_los", "exponent_nlos",
                                 "shadow_sigma_los_db", "shadow_sigma_nlos_db"},
                                "pathloss_model");
            read_if(p, "intercept_db", cfg.channel.pathloss_model.intercept_db);
            read_if(p, "exponent_los", cfg.channel.pathloss_model.exponent_los);
            read_if(p, "exponent_nlos", cfg.channel.pathloss_model.exponent_nlos);
            read_if(p, "shadow_sigma_los_db", cfg.channel.pathloss_model.shadow_sigma_los_db);
            read_if(p, "shadow_sigma_nlos_db", cfg.channel.pathloss_model.shadow_sigma_nlos_db);
        }
    }

    if (j.contains("noise"))
    {
        const json& n = j.at("noise");
        reject_unknown_keys(n, {"bandwidth_hz", "noise_figure_db", "noise_psd_dbm_hz"}, "noise");
        read_if(n, "bandwidth_hz", cfg.noise.bandwidth_hz);
        read_if(n, "noise_figure_db", cfg.noise.noise_figure_db);
        read_if(n, "noise_psd_dbm_hz", cfg.noise.noise_psd_dbm_hz);
    }

    if (j.contains("power"))
    {
        const json& p = j.at("power");
        reject_unknown_keys(p,
                            {"p_rfc_w", "p_dac_w", "p_adc_w", "p_pa_w", "p_lna_w", "p_bb_w",
                             "p_ps_w", "p_ps_fixed_w", "p_sw_w", "p_element_w", "eta",
                             "hy_rx_lna_verbatim"},
                            "power");
        read_if(p, "p_rfc_w", cfg.power.p_rfc_w);
        read_if(p, "p_dac_w", cfg.power.p_dac_w);
        read_if(p, "p_adc_w", cfg.power.p_adc_w);
        read_if(p, "p_pa_w", cfg.power.p_pa_w);
        read_if(p, "p_lna_w", cfg.power.p_lna_w);
        read_if(p, "p_bb_w", cfg.power.p_bb_w);
        read_if(p, "p_ps_w", cfg.power.p_ps_w);
        read_if(p, "p_ps_fixed_w", cfg.power.p_ps_fixed_w);
        read_if(p, "p_sw_w", cfg.power.p_sw_w);
        read_if(p, "p_element_w", cfg.power.p_element_w);
        read_if(p, "eta", cfg.power.eta);
        read_if(p, "hy_rx_lna_verbatim", cfg.power.hy_rx_lna_verbatim);
    }

    if (j.contains("beamformer"))
    {
        const json& b = j.at("beamformer");
        reject_unknown_keys(b,
                            {"cm_hy_targets_pzf", "sw_target", "sw_phsh_target", "an_min_sep_deg",
                             "n_q", "hybrid"},
                            "beamformer");
        read_if(b, "cm_hy_targets_pzf", cfg.beamformer.cm_hy_targets_pzf);
        if (b.contains("sw_target"))
            cfg.beamformer.sw_target = architecture_from_string(b.at("sw_target").get<std::string>());
        if (b.contains("sw_phsh_target"))
            cfg.beamformer.sw_phsh_target =
                architecture_from_string(b.at("sw_phsh_target").get<std::string>());
        read_if(b, "an_min_sep_deg", cfg.beamformer.an_min_sep_deg);
        read_if(b, "n_q", cfg.beamformer.n_q);
        if (b.contains("hybrid"))
        {
            const json& h = b.at("hybrid");
            reject_unknown_keys(h, {"tol", "max_iters"}, "hybrid");
            read_if(h, "tol", cfg.beamformer.hybrid.tol);
            read_if(h, "max_iters", cfg.beamformer.hybrid.max_iters);
        }
    }

    if (j.contains("architectures"))
    {
        cfg.architectures.clear();
        for (const auto& a : j.at("architectures"))
            cfg.architectures.push_back(architecture_from_string(a.get<std::string>()));
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig scenario_from_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str());
}

std::string scenario_to_json_text(const ScenarioConfig& cfg)
{
    json j;
    j["k_users"] = cfg.k_users;
    j["m_streams"] = cfg.m_streams;
    j["n_t"] = cfg.n_t;
    j["n_r"] = cfg.n_r;
    j["cell_radius_m"] = cfg.cell_radius_m;
    j["min_distance_m"] = cfg.min_distance_m;
    j["p_t_dbw"] = cfg.p_t_dbw;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["uplink"] = cfg.uplink;
    j["n_rf_bs"] = cfg.n_rf_bs;
    j["n_rf_terminal"] = cfg.n_rf_terminal;
    j["channel"] = {{"n_cl", cfg.channel.n_cl},
                    {"n_ray_per_cluster", cfg.channel.n_ray_per_cluster},
                    {"gain_variance", cfg.channel.gain_variance},
                    {"angular_spread_deg", cfg.channel.angular_spread_deg},
                    {"los_enabled", cfg.channel.los_enabled},
                    {"carrier_hz", cfg.channel.carrier_hz},
                    {"pathloss_model",
                     {{"intercept_db", cfg.channel.pathloss_model.intercept_db},
                      {"exponent_los", cfg.channel.pathloss_model.exponent_los},
                      {"exponent_nlos", cfg.channel.pathloss_model.exponent_nlos},
                      {"shadow_sigma_los_db", cfg.channel.pathloss_model.shadow_sigma_los_db},
                      {"shadow_sigma_nlos_db", cfg.channel.pathloss_model.shadow_sigma_nlos_db}}},
                    {"los_prob_d1_m", cfg.channel.los_prob_d1_m},
                    {"los_prob_d2_m", cfg.channel.los_prob_d2_m}};
    j["noise"] = {{"bandwidth_hz", cfg.noise.bandwidth_hz},
                  {"noise_figure_db", cfg.noise.noise_figure_db},
                  {"noise_psd_dbm_hz", cfg.noise.noise_psd_dbm_hz}};
    j["power"] = {{"p_rfc_w", cfg.power.p_rfc_w},
                  {"p_dac_w", cfg.power.p_dac_w},
                  {"p_adc_w", cfg.power.p_adc_w},
                  {"p_pa_w", cfg.power.p_pa_w},
                  {"p_lna_w", cfg.power.p_lna_w},
                  {"p_bb_w", cfg.power.p_bb_w},
                  {"p_ps_w", cfg.power.p_ps_w},
                  {"p_ps_fixed_w", cfg.power.p_ps_fixed_w},
                  {"p_sw_w", cfg.power.p_sw_w},
                  {"p_element_w", cfg.power.p_element_w},
                  {"eta", cfg.power.eta},
                  {"hy_rx_lna_verbatim", cfg.power.hy_rx_lna_verbatim}};
    j["beamformer"] = {{"cm_hy_targets_pzf", cfg.beamformer.cm_hy_targets_pzf},
                       {"sw_target", to_string(cfg.beamformer.sw_target)},
                       {"sw_phsh_target", to_string(cfg.beamformer.sw_phsh_target)},
                       {"an_min_sep_deg", cfg.beamformer.an_min_sep_deg},
                       {"n_q", cfg.beamformer.n_q},
                       {"hybrid",
                        {{"tol", cfg.beamformer.hybrid.tol},
                         {"max_iters", cfg.beamformer.hybrid.max_iters}}}};
    json archs = json::array();
    for (Architecture a : cfg.architectures)
        archs.push_back(to_string(a));
    j["architectures"] = archs;
    return j.dump(2);
}

namespace
{

ChannelRealization flip_channel(const ChannelRealization& h)
{
    ChannelRealization f;
    f.matrix = h.matrix.t();
    f.gamma = h.gamma;
    f.n_cl = h.n_cl;
    f.n_ray = h.n_ray;
    f.distance_m = h.distance_m;
    f.paths = h.paths;
    for (PathComponent& p : f.paths)
        std::swap(p.aod_rad, p.aoa_rad);
    return f;
}

arma::cx_mat architecture_target(Architecture target, std::span<const ChannelRealization> channels,
                                 int k, int m, bool precoder_side, bool uplink)
{
    switch (target)
    {
    case Architecture::CM_FD:
    {
        auto [q, d] = cm_fd(channels[std::size_t(k)], m);
        return precoder_side ? q : d;
    }
    case Architecture::PZF_FD:
    {
        if (!uplink)
        {
            auto [q, d] = pzf_fd(channels, k, m);
            return precoder_side ? q : d;
        }
        std::vector<ChannelRealization> flipped;
        flipped.reserve(channels.size());
        for (const ChannelRealization& h : channels)
            flipped.push_back(flip_channel(h));
        auto [qf, df] = pzf_fd(flipped, k, m);
        // the flipped precoder nulls at the receive side of the real link
        return precoder_side ? df : qf;
    }
    default:
        throw std::invalid_argument("architecture_target: target must be fully digital");
    }
}

} // namespace

BeamformerSet build_beamformer_set(Architecture arch,
                                   std::span<const ChannelRealization> channels,
                                   const ScenarioConfig& cfg, bool uplink)
{
    const int k_users = int(channels.size());
    const int m = cfg.m_streams;

    BeamformerSet bf;
    bf.kind = arch;
    bf.n_rf_tx = uplink ? cfg.rf_terminal() : cfg.rf_bs();
    bf.n_rf_rx = uplink ? cfg.rf_bs() : cfg.rf_terminal();
    bf.n_q = (arch == Architecture::SW_PHSH) ? cfg.beamformer.n_q : 0;
    bf.precoders.resize(std::size_t(k_users));
    bf.postcoders.resize(std::size_t(k_users));
    if (arch == Architecture::AN)
        bf.an_selection.resize(std::size_t(k_users));

    for (int k = 0; k < k_users; ++k)
    {
        switch (arch)
        {
        case Architecture::CM_FD:
        {
            auto [q, d] = cm_fd(channels[std::size_t(k)], m);
            bf.precoders[std::size_t(k)] = std::move(q);
            bf.postcoders[std::size_t(k)] = std::move(d);
            break;
        }
        case Architecture::PZF_FD:
        {
            bf.precoders[std::size_t(k)] =
                architecture_target(Architecture::PZF_FD, channels, k, m, true, uplink);
            bf.postcoders[std::size_t(k)] =
                architecture_target(Architecture::PZF_FD, channels, k, m, false, uplink);
            break;
        }
        case Architecture::CM_HY:
        case Architecture::PZF_HY:
        {
            const Architecture target =
                (arch == Architecture::PZF_HY || cfg.beamformer.cm_hy_targets_pzf)
                    ? Architecture::PZF_FD
                    : Architecture::CM_FD;
            const arma::cx_mat q_t =
                architecture_target(target, channels, k, m, true, uplink);
            const arma::cx_mat d_t =
                architecture_target(target, channels, k, m, false, uplink);
            const HybridFactors pre = hybrid_factorize(q_t, bf.n_rf_tx, cfg.beamformer.hybrid);
            const HybridFactors post = hybrid_factorize(d_t, bf.n_rf_rx, cfg.beamformer.hybrid);
            bf.precoders[std::size_t(k)] = pre.product;
            bf.postcoders[std::size_t(k)] = post.product;
            break;
        }
        case Architecture::AN:
        {
            auto [q, d] = an_beamsteer(channels[std::size_t(k)], m, cfg.beamformer.an_min_sep_deg,
                                       &bf.an_selection[std::size_t(k)]);
            bf.precoders[std::size_t(k)] = std::move(q);
            bf.postcoders[std::size_t(k)] = std::move(d);
            break;
        }
        case Architecture::SW_PHSH:
        {
            const arma::cx_mat q_t = architecture_target(cfg.beamformer.sw_phsh_target, channels,
                                                         k, m, true, uplink);
            const arma::cx_mat d_t = architecture_target(cfg.beamformer.sw_phsh_target, channels,
                                                         k, m, false, uplink);
            // common gain 1/sqrt(N): keeps the equal-modulus grid structure
            // while meeting the same per-column power budget as the other
            // precoders (raw phase entries would radiate N times the budget)
            bf.precoders[std::size_t(k)] =
                sw_phsh_quantize(q_t, cfg.beamformer.n_q) / std::sqrt(double(q_t.n_rows));
            bf.postcoders[std::size_t(k)] =
                sw_phsh_quantize(d_t, cfg.beamformer.n_q) / std::sqrt(double(d_t.n_rows));
            break;
        }
        case Architecture::SW:
        {
            const arma::cx_mat q_t =
                architecture_target(cfg.beamformer.sw_target, channels, k, m, true, uplink);
            const arma::cx_mat d_t =
                architecture_target(cfg.beamformer.sw_target, channels, k, m, false, uplink);
            bf.precoders[std::size_t(k)] = sw_mfn_select(q_t, std::min(bf.n_rf_tx, cfg.n_t)).composed;
            bf.postcoders[std::size_t(k)] =
                sw_mfn_select(d_t, std::min(bf.n_rf_rx, cfg.n_r)).composed;
            break;
        }
        }
    }
    return bf;
}

std::vector<ChannelRealization> draw_trial_channels(const ScenarioConfig& cfg,
                                                    std::uint64_t trial_index,
                                                    std::uint64_t point_key)
{
    std::vector<ChannelRealization> channels;
    channels.reserve(std::size_t(cfg.k_users));
    for (int u = 0; u < cfg.k_users; ++u)
    {
        RngStream pos = RngStream::substream(
            cfg.seed, {point_key, trial_index, std::uint64_t(u), kPurposePosition});
        // uniform over the annulus between the minimum distance and the cell edge
        const double r2 = pos.uniform(cfg.min_distance_m * cfg.min_distance_m,
                                      cfg.cell_radius_m * cfg.cell_radius_m);
        const double dist = std::sqrt(r2);

        RngStream ch = RngStream::substream(
            cfg.seed, {point_key, trial_index, std::uint64_t(u), kPurposeChannel});
        channels.push_back(generate_channel(cfg.channel, cfg.n_r, cfg.n_t, dist, ch));
    }
    return channels;
}

TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t trial_index,
                      std::uint64_t point_key)
{
    cfg.validate();
    const std::vector<ChannelRealization> channels =
        draw_trial_channels(cfg, trial_index, point_key);
    const double p_t = cfg.p_t_w();
    const SystemDims dims{cfg.n_t, cfg.n_r, cfg.k_users};

    TrialResult out;
    out.per_arch.resize(cfg.architectures.size());
    for (std::size_t a = 0; a < cfg.architectures.size(); ++a)
    {
        const Architecture arch = cfg.architectures[a];
        try
        {
            const BeamformerSet bf = build_beamformer_set(arch, channels, cfg, cfg.uplink);
            ArchOutcome oc;
            if (!cfg.uplink)
            {
                const AseResult ase = ase_downlink(channels, bf, p_t, cfg.noise, cfg.m_streams);
                const GeeResult gee = gee_downlink(ase, p_t, bf, dims, cfg.power, cfg.noise);
                oc.ase = ase.total;
                oc.gee = gee.total;
                oc.ase_per_user = ase.per_user;
                oc.gee_per_user = gee.per_user;
            }
            else
            {
                arma::vec powers(arma::uword(cfg.k_users));
                powers.fill(p_t);
                oc.ase_per_user.set_size(arma::uword(cfg.k_users));
                oc.gee_per_user.set_size(arma::uword(cfg.k_users));
                for (int k = 0; k < cfg.k_users; ++k)
                {
                    const double ase_k =
                        ase_uplink_user(channels, bf, k, powers, cfg.noise, cfg.m_streams);
                    oc.ase_per_user(arma::uword(k)) = ase_k;
                    oc.gee_per_user(arma::uword(k)) = gee_uplink_user(
                        ase_k, p_t, arch, dims, bf.n_rf_tx, bf.n_q, cfg.power, cfg.noise);
                }
                oc.ase = arma::mean(oc.ase_per_user);
                oc.gee = arma::mean(oc.gee_per_user);
            }
            out.per_arch[a] = std::move(oc);
        }
        catch (const InfeasibleError&)
        {
            out.per_arch[a] = std::nullopt;
        }
        catch (const SingularProjectionError&)
        {
            out.per_arch[a] = std::nullopt;
        }
    }
    return out;
}

std::string to_string(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::N_T: return "n_t";
    case SweepAxis::N_R: return "n_r";
    case SweepAxis::P_T_DBW: return "p_t_dbw";
    }
    throw std::invalid_argument("to_string: unknown sweep axis");
}

double pairwise_sum(std::span<const double> values)
{
    if (values.empty())
        return 0.0;
    if (values.size() == 1)
        return values[0];
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

namespace
{

ArchPointStats summarize(const std::vector<double>& ase, const std::vector<double>& gee)
{
    ArchPointStats s;
    s.samples = int(ase.size());
    if (ase.empty())
    {
        s.ase_mean = s.ase_std = s.gee_mean = s.gee_std = arma::datum::nan;
        return s;
    }
    const double n = double(ase.size());
    s.ase_mean = pairwise_sum(ase) / n;
    s.gee_mean = pairwise_sum(gee) / n;
    if (ase.size() > 1)
    {
        std::vector<double> dev(ase.size());
        for (std::size_t i = 0; i < ase.size(); ++i)
            dev[i] = (ase[i] - s.ase_mean) * (ase[i] - s.ase_mean);
        s.ase_std = std::sqrt(pairwise_sum(dev) / (n - 1.0));
        for (std::size_t i = 0; i < gee.size(); ++i)
            dev[i] = (gee[i] - s.gee_mean) * (gee[i] - s.gee_mean);
        s.gee_std = std::sqrt(pairwise_sum(dev) / (n - 1.0));
    }
    return s;
}

// run fn(trial) for trial in [0, trials) on a worker pool
void parallel_trials(int trials, int threads, const std::function<void(int)>& fn)
{
    int n_workers = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    if (n_workers < 1)
        n_workers = 1;
    n_workers = std::min(n_workers, trials);

    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w)
    {
        pool.emplace_back(
            [&, w]()
            {
                try
                {
                    for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
                        fn(t);
                }
                catch (...)
                {
                    errors[std::size_t(w)] = std::current_exception();
                }
            });
    }
    for (std::thread& th : pool)
        th.join();
    for (const std::exception_ptr& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

SweepResult sweep(const ScenarioConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                  int threads)
{
    cfg.validate();
    if (values.empty())
        throw std::invalid_argument("sweep: values must be non-empty");

    SweepResult result;
    result.axis_name = to_string(axis);
    result.axis_values = values;
    result.architectures = cfg.architectures;
    result.seed = cfg.seed;
    result.trials = cfg.trials;
    result.config_json = scenario_to_json_text(cfg);
    result.stats.assign(cfg.architectures.size(),
                        std::vector<ArchPointStats>(values.size()));

    for (std::size_t vi = 0; vi < values.size(); ++vi)
    {
        ScenarioConfig point_cfg = cfg;
        switch (axis)
        {
        case SweepAxis::N_T: point_cfg.n_t = int(values[vi]); break;
        case SweepAxis::N_R: point_cfg.n_r = int(values[vi]); break;
        case SweepAxis::P_T_DBW: point_cfg.p_t_dbw = values[vi]; break;
        }
        point_cfg.validate();
        const std::uint64_t point_key = hash_double(values[vi]);

        std::vector<TrialResult> trials(std::size_t(cfg.trials));
        parallel_trials(cfg.trials, threads,
                        [&](int t)
                        { trials[std::size_t(t)] = run_trial(point_cfg, std::uint64_t(t), point_key); });

        for (std::size_t a = 0; a < cfg.architectures.size(); ++a)
        {
            std::vector<double> ase, gee;
            ase.reserve(trials.size());
            gee.reserve(trials.size());
            for (const TrialResult& tr : trials)
            {
                if (tr.per_arch[a].has_value())
                {
                    ase.push_back(tr.per_arch[a]->ase);
                    gee.push_back(tr.per_arch[a]->gee);
                }
            }
            result.stats[a][vi] = summarize(ase, gee);
        }
    }
    return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr)
        throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "axis,arch,ase_mean,ase_std,gee_mean,gee_std,trials,seed\n");
    for (std::size_t vi = 0; vi < result.axis_values.size(); ++vi)
    {
        for (std::size_t a = 0; a < result.architectures.size(); ++a)
        {
            const ArchPointStats& s = result.stats[a][vi];
            std::fprintf(f, "%.10g,%s,%.10g,%.10g,%.10g,%.10g,%d,%llu\n", result.axis_values[vi],
                         to_string(result.architectures[a]).c_str(), s.ase_mean, s.ase_std,
                         s.gee_mean, s.gee_std, result.trials,
                         (unsigned long long)result.seed);
        }
    }
    std::fclose(f);
}

void write_sweep_json(const SweepResult& result, const std::string& path)
{
    json j;
    j["axis"] = result.axis_name;
    j["axis_values"] = result.axis_values;
    j["seed"] = result.seed;
    j["trials"] = result.trials;
    j["config"] = json::parse(result.config_json);
    json points = json::array();
    for (std::size_t vi = 0; vi < result.axis_values.size(); ++vi)
    {
        json point;
        point["axis_value"] = result.axis_values[vi];
        json per_arch = json::object();
        for (std::size_t a = 0; a < result.architectures.size(); ++a)
        {
            const ArchPointStats& s = result.stats[a][vi];
            per_arch[to_string(result.architectures[a])] = {
                {"ase_mean", s.ase_mean}, {"ase_std", s.ase_std},   {"gee_mean", s.gee_mean},
                {"gee_std", s.gee_std},   {"samples", s.samples}};
        }
        point["architectures"] = per_arch;
        points.push_back(point);
    }
    j["points"] = points;

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

ConvergenceReport validate_asymptotics(const ScenarioConfig& cfg, SweepAxis axis,
                                       const std::vector<int>& ladder, int threads)
{
    cfg.validate();
    if (ladder.empty())
        throw std::invalid_argument("validate_asymptotics: ladder must be non-empty");
    if (axis == SweepAxis::P_T_DBW)
        throw std::invalid_argument("validate_asymptotics: ladder axis must be N_T or N_R");

    const int m = cfg.m_streams;
    const double p_t = cfg.p_t_w();
    arma::vec powers(arma::uword(cfg.k_users));
    powers.fill(p_t);

    struct Accum
    {
        std::vector<double> exact, asymp; // per trial
    };
    // formulas x ladder points
    const std::vector<std::string> formulas = {"cmfd-dl", "pzf-dl", "an-dl",
                                               "cmfd-ul", "pzf-ul", "an-ul"};
    std::vector<std::vector<Accum>> acc(formulas.size(),
                                        std::vector<Accum>(ladder.size()));
    for (auto& row : acc)
        for (auto& cell : row)
        {
            cell.exact.resize(std::size_t(cfg.trials));
            cell.asymp.resize(std::size_t(cfg.trials));
        }

    parallel_trials(
        cfg.trials, threads,
        [&](int t)
        {
            for (std::size_t li = 0; li < ladder.size(); ++li)
            {
                ScenarioConfig point_cfg = cfg;
                if (axis == SweepAxis::N_T)
                    point_cfg.n_t = ladder[li];
                else
                    point_cfg.n_r = ladder[li];
                // paths are keyed only by (seed, trial, user): the ladder sees
                // the same propagation draws at every dimension
                const std::vector<ChannelRealization> channels =
                    draw_trial_channels(point_cfg, std::uint64_t(t), 0);
                const AntennaRegime regime =
                    (axis == SweepAxis::N_T) ? AntennaRegime::NT_INF : AntennaRegime::NR_INF;

                // downlink: CM-FD
                const BeamformerSet bf_cm =
                    build_beamformer_set(Architecture::CM_FD, channels, point_cfg, false);
                const SpectralSummary summary =
                    make_spectral_summary(channels, bf_cm.precoders, m);
                acc[0][li].exact[std::size_t(t)] =
                    ase_downlink(channels, bf_cm, p_t, cfg.noise, m).total;
                acc[0][li].asymp[std::size_t(t)] =
                    cmfd_dl_asymptotic(summary, p_t, cfg.noise, cfg.k_users, m);

                // downlink: PZF-FD (may be infeasible at small N_T)
                try
                {
                    const BeamformerSet bf_pzf =
                        build_beamformer_set(Architecture::PZF_FD, channels, point_cfg, false);
                    acc[1][li].exact[std::size_t(t)] =
                        ase_downlink(channels, bf_pzf, p_t, cfg.noise, m).total;
                    acc[1][li].asymp[std::size_t(t)] =
                        pzf_dl_asymptotic(summary, p_t, cfg.noise, cfg.k_users, m);
                }
                catch (const InfeasibleError&)
                {
                    acc[1][li].exact[std::size_t(t)] = arma::datum::nan;
                    acc[1][li].asymp[std::size_t(t)] = arma::datum::nan;
                }

                // downlink: AN
                const BeamformerSet bf_an =
                    build_beamformer_set(Architecture::AN, channels, point_cfg, false);
                const OverlapTables tables =
                    make_overlap_tables(channels, m, bf_an.an_selection);
                acc[2][li].exact[std::size_t(t)] =
                    ase_downlink(channels, bf_an, p_t, cfg.noise, m).total;
                acc[2][li].asymp[std::size_t(t)] =
                    an_dl_asymptotic(tables, regime, p_t, cfg.noise, cfg.k_users, m);

                // uplink variants (per-user averages)
                const double kk = double(cfg.k_users);
                const BeamformerSet ul_cm =
                    build_beamformer_set(Architecture::CM_FD, channels, point_cfg, true);
                const BeamformerSet ul_an =
                    build_beamformer_set(Architecture::AN, channels, point_cfg, true);
                double e_cm = 0, a_cm = 0, e_an = 0;
                for (int k = 0; k < cfg.k_users; ++k)
                {
                    e_cm += ase_uplink_user(channels, ul_cm, k, powers, cfg.noise, m);
                    a_cm += cmfd_ul_asymptotic(channels, ul_cm, k, powers, cfg.noise, m);
                    e_an += ase_uplink_user(channels, ul_an, k, powers, cfg.noise, m);
                }
                const arma::vec a_an_vec =
                    an_ul_asymptotic(tables, regime, powers, cfg.noise, m);
                acc[3][li].exact[std::size_t(t)] = e_cm / kk;
                acc[3][li].asymp[std::size_t(t)] = a_cm / kk;
                acc[5][li].exact[std::size_t(t)] = e_an / kk;
                acc[5][li].asymp[std::size_t(t)] = arma::mean(a_an_vec);

                try
                {
                    const BeamformerSet ul_pzf =
                        build_beamformer_set(Architecture::PZF_FD, channels, point_cfg, true);
                    double e_pzf = 0, a_pzf = 0;
                    for (int k = 0; k < cfg.k_users; ++k)
                    {
                        e_pzf += ase_uplink_user(channels, ul_pzf, k, powers, cfg.noise, m);
                        a_pzf += pzf_ul_asymptotic(summary, k, p_t, cfg.noise, m);
                    }
                    acc[4][li].exact[std::size_t(t)] = e_pzf / kk;
                    acc[4][li].asymp[std::size_t(t)] = a_pzf / kk;
                }
                catch (const InfeasibleError&)
                {
                    acc[4][li].exact[std::size_t(t)] = arma::datum::nan;
                    acc[4][li].asymp[std::size_t(t)] = arma::datum::nan;
                }
            }
        });

    ConvergenceReport report;
    for (std::size_t fi = 0; fi < formulas.size(); ++fi)
    {
        for (std::size_t li = 0; li < ladder.size(); ++li)
        {
            ConvergenceRow row;
            row.formula = formulas[fi];
            row.dimension = double(ladder[li]);
            row.exact_mean = pairwise_sum(acc[fi][li].exact) / double(cfg.trials);
            row.asymptotic_mean = pairwise_sum(acc[fi][li].asymp) / double(cfg.trials);
            row.rel_error =
                std::abs(row.exact_mean - row.asymptotic_mean) / std::abs(row.exact_mean);
            report.rows.push_back(row);
        }
    }
    return report;
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& path)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr)
        throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "formula,dimension,exact_mean,asymptotic_mean,rel_error\n");
    for (const ConvergenceRow& r : report.rows)
        std::fprintf(f, "%s,%.10g,%.10g,%.10g,%.10g\n", r.formula.c_str(), r.dimension,
                     r.exact_mean, r.asymptotic_mean, r.rel_error);
    std::fclose(f);
}

GeeObjective make_asymptotic_pzf_gee_objective(const ScenarioConfig& cfg, int sample_trials)
{
    cfg.validate();
    if (sample_trials < 1)
        throw std::invalid_argument("make_asymptotic_pzf_gee_objective: need >= 1 sample trial");

    const int m = cfg.m_streams;
    // average the array-size-free squared eigenvalues over channel draws
    arma::mat lt_sq(arma::uword(cfg.k_users), arma::uword(m), arma::fill::zeros);
    for (int t = 0; t < sample_trials; ++t)
    {
        const std::vector<ChannelRealization> channels =
            draw_trial_channels(cfg, std::uint64_t(t), 0xA57Full);
        const BeamformerSet bf = build_beamformer_set(Architecture::CM_FD, channels, cfg, false);
        const SpectralSummary s = make_spectral_summary(channels, bf.precoders, m);
        for (int k = 0; k < cfg.k_users; ++k)
            for (int q = 0; q < m; ++q)
                lt_sq(arma::uword(k), arma::uword(q)) +=
                    s.lambdas_normalized[std::size_t(k)](arma::uword(q)) *
                    s.lambdas_normalized[std::size_t(k)](arma::uword(q));
    }
    lt_sq /= double(sample_trials);

    const double sigma2 = cfg.noise.noise_power_w();
    const double w = cfg.noise.bandwidth_hz;
    const int k_users = cfg.k_users;
    const PowerModel pm = cfg.power;
    const int n_rf_bs = cfg.rf_bs();
    const int n_rf_term = cfg.rf_terminal();

    GeeObjective obj;
    obj.numerator = [lt_sq, sigma2, w, k_users, m](int n_t, int n_r, double p_t_w)
    {
        const double c = double(n_t) * double(n_r) * p_t_w / (double(m) * double(k_users) * sigma2);
        double ase = 0.0;
        for (arma::uword k = 0; k < lt_sq.n_rows; ++k)
            for (arma::uword q = 0; q < lt_sq.n_cols; ++q)
                ase += std::log2(1.0 + c * lt_sq(k, q));
        return w * ase;
    };
    obj.denominator = [pm, k_users, n_rf_bs, n_rf_term](int n_t, int n_r, double p_t_w)
    {
        const double tx =
            consumed_power(Architecture::PZF_FD, PowerSide::TX, n_t, n_rf_bs, 0, pm, n_r);
        const double rx =
            consumed_power(Architecture::PZF_FD, PowerSide::RX, n_r, n_rf_term, 0, pm, n_t);
        return pm.eta * p_t_w + tx + double(k_users) * rx;
    };
    return obj;
}

} // namespace mmwavesim
