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

#include "mmwavesim/asymptotics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mmwavesim
{

namespace
{
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;

double log2_det_ratio(const arma::cx_mat& r, const arma::cx_mat& s)
{
    arma::cx_mat a = 0.5 * ((r + s) + (r + s).t());
    arma::cx_mat b = 0.5 * (r + r.t());
    double la = 0.0, lb = 0.0;
    if (!arma::log_det_sympd(la, a))
        la = arma::log_det(a).real();
    if (!arma::log_det_sympd(lb, b))
        lb = arma::log_det(b).real();
    return std::max(0.0, (la - lb) / kLn2);
}

arma::cx_mat eye_cx(int m)
{
    return arma::eye<arma::cx_mat>(arma::uword(m), arma::uword(m));
}

double user_gamma_sq(const OverlapTables& t, int k)
{
    return t.gammas[std::size_t(k)] * t.gammas[std::size_t(k)];
}

// [L F^tH F^t L^*] restricted to the selected rows/columns of user `paths_of`
arma::cx_mat lumped_transmit_block(const OverlapTables& t, int beams_of, int paths_of,
                                   const std::vector<arma::uword>& sel)
{
    const arma::cx_mat& f = t.f_t[std::size_t(beams_of)][std::size_t(paths_of)];
    const arma::cx_vec& g = t.gains[std::size_t(paths_of)];
    arma::cx_mat z = f; // M x N
    for (arma::uword c = 0; c < z.n_cols; ++c)
        z.col(c) *= std::conj(g(c));
    arma::uvec cols(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i)
        cols(i) = sel[i];
    const arma::cx_mat zs = z.cols(cols);
    return zs.t() * zs; // M x M
}

// F^r columns at the selected paths of `paths_of`, scaled by those gains
arma::cx_mat receive_selected(const OverlapTables& t, int beams_of, int paths_of,
                              const std::vector<arma::uword>& sel, bool apply_gains)
{
    const arma::cx_mat& f = t.f_r[std::size_t(beams_of)][std::size_t(paths_of)];
    const arma::cx_vec& g = t.gains[std::size_t(paths_of)];
    arma::cx_mat out(f.n_rows, arma::uword(sel.size()));
    for (std::size_t i = 0; i < sel.size(); ++i)
    {
        out.col(arma::uword(i)) = f.col(sel[i]);
        if (apply_gains)
            out.col(arma::uword(i)) *= g(sel[i]);
    }
    return out;
}
} // namespace

SpectralSummary make_spectral_summary(std::span<const ChannelRealization> channels,
                                      std::span<const arma::cx_mat> precoders, int m)
{
    const int k_users = int(channels.size());
    if (int(precoders.size()) != k_users)
        throw std::invalid_argument("make_spectral_summary: precoder/channel count mismatch");

    SpectralSummary out;
    out.m = m;
    out.n_r = channels[0].n_rx();
    out.n_t = channels[0].n_tx();
    const double root = std::sqrt(double(out.n_t) * double(out.n_r));

    std::vector<arma::cx_mat> v_m(static_cast<std::size_t>(k_users));
    std::vector<arma::vec> lam(static_cast<std::size_t>(k_users));
    for (int k = 0; k < k_users; ++k)
    {
        arma::cx_mat u, v;
        arma::vec s;
        if (!arma::svd_econ(u, s, v, channels[std::size_t(k)].matrix))
            throw std::runtime_error("make_spectral_summary: SVD failed");
        lam[std::size_t(k)] = s.head(arma::uword(m));
        v_m[std::size_t(k)] = v.cols(0, arma::uword(m) - 1);
    }

    for (int k = 0; k < k_users; ++k)
    {
        const arma::cx_mat lam_vh =
            arma::diagmat(arma::conv_to<arma::cx_vec>::from(lam[std::size_t(k)])) *
            v_m[std::size_t(k)].t();
        arma::cx_mat interf(static_cast<arma::uword>(m), static_cast<arma::uword>(m), arma::fill::zeros);
        for (int l = 0; l < k_users; ++l)
        {
            if (l == k)
                continue;
            const arma::cx_mat c = lam_vh * precoders[std::size_t(l)];
            interf += c * c.t();
        }
        arma::vec mu;
        if (!arma::eig_sym(mu, 0.5 * (interf + interf.t())))
            throw std::runtime_error("make_spectral_summary: eigendecomposition failed");
        mu = arma::clamp(mu, 0.0, arma::datum::inf);

        out.lambdas.push_back(lam[std::size_t(k)]);
        out.lambdas_normalized.push_back(lam[std::size_t(k)] / root);
        out.mus.push_back(arma::sort(mu, "descend"));
    }
    return out;
}

double cmfd_dl_asymptotic(const SpectralSummary& summary, double p_t_w, const NoiseModel& noise,
                          int k_users, int m)
{
    const double sigma2 = noise.noise_power_w();
    const double c = p_t_w / (double(m) * double(k_users));
    const double nn = double(summary.n_t) * double(summary.n_r);

    double ase = 0.0;
    for (int k = 0; k < k_users; ++k)
    {
        const arma::vec& lt = summary.lambdas_normalized[std::size_t(k)];
        const arma::vec& mu = summary.mus[std::size_t(k)];
        for (int q = 0; q < m; ++q)
        {
            const double num = nn * c * lt(arma::uword(q)) * lt(arma::uword(q));
            const double den = sigma2 + c * mu(arma::uword(q));
            ase += std::log2(1.0 + num / den);
        }
    }
    return ase;
}

double cmfd_dl_asymptotic_matrix(std::span<const ChannelRealization> channels,
                                 const BeamformerSet& bf, double p_t_w,
                                 const NoiseModel& noise, int m)
{
    const int k_users = int(channels.size());
    const double sigma2 = noise.noise_power_w();
    const double c = p_t_w / (double(m) * double(k_users));

    double ase = 0.0;
    for (int k = 0; k < k_users; ++k)
    {
        arma::cx_mat u, v;
        arma::vec s;
        if (!arma::svd_econ(u, s, v, channels[std::size_t(k)].matrix))
            throw std::runtime_error("cmfd_dl_asymptotic_matrix: SVD failed");
        const arma::cx_mat lam_vh =
            arma::diagmat(arma::conv_to<arma::cx_vec>::from(s.head(arma::uword(m)))) *
            v.cols(0, arma::uword(m) - 1).t();

        arma::cx_mat r = sigma2 * eye_cx(m);
        for (int l = 0; l < k_users; ++l)
        {
            if (l == k)
                continue;
            const arma::cx_mat x = lam_vh * bf.precoders[std::size_t(l)];
            r += c * (x * x.t());
        }
        arma::cx_mat sig(static_cast<arma::uword>(m), static_cast<arma::uword>(m), arma::fill::zeros);
        sig.diag() = arma::conv_to<arma::cx_vec>::from(
            c * arma::square(s.head(arma::uword(m))));
        ase += log2_det_ratio(r, sig);
    }
    return ase;
}

double cmfd_ul_asymptotic(std::span<const ChannelRealization> channels, const BeamformerSet& bf,
                          int k, const arma::vec& p_t_per_user_w, const NoiseModel& noise, int m)
{
    const int k_users = int(channels.size());
    if (k < 0 || k >= k_users)
        throw std::invalid_argument("cmfd_ul_asymptotic: user index out of range");
    const double sigma2 = noise.noise_power_w();
    const arma::cx_mat& d = bf.postcoders[std::size_t(k)];

    arma::cx_mat r = sigma2 * eye_cx(m);
    arma::vec lam_k;
    for (int l = 0; l < k_users; ++l)
    {
        arma::cx_mat u, v;
        arma::vec s;
        if (!arma::svd_econ(u, s, v, channels[std::size_t(l)].matrix))
            throw std::runtime_error("cmfd_ul_asymptotic: SVD failed");
        if (l == k)
        {
            lam_k = s.head(arma::uword(m));
            continue;
        }
        const arma::cx_mat ul =
            u.cols(0, arma::uword(m) - 1) *
            arma::diagmat(arma::conv_to<arma::cx_vec>::from(s.head(arma::uword(m))));
        const arma::cx_mat c = d.t() * ul;
        r += (p_t_per_user_w(arma::uword(l)) / double(m)) * (c * c.t());
    }

    arma::cx_mat sig(static_cast<arma::uword>(m), static_cast<arma::uword>(m), arma::fill::zeros);
    sig.diag() = arma::conv_to<arma::cx_vec>::from(
        (p_t_per_user_w(arma::uword(k)) / double(m)) * arma::square(lam_k));
    return log2_det_ratio(r, sig);
}

double pzf_dl_asymptotic(const SpectralSummary& summary, double p_t_w, const NoiseModel& noise,
                         int k_users, int m)
{
    const double sigma2 = noise.noise_power_w();
    const double c = double(summary.n_t) * double(summary.n_r) * p_t_w /
                     (double(m) * double(k_users) * sigma2);
    double ase = 0.0;
    for (int k = 0; k < k_users; ++k)
    {
        const arma::vec& lt = summary.lambdas_normalized[std::size_t(k)];
        for (int q = 0; q < m; ++q)
            ase += std::log2(1.0 + c * lt(arma::uword(q)) * lt(arma::uword(q)));
    }
    return ase;
}

double pzf_ul_asymptotic(const SpectralSummary& summary, int k, double p_t_k_w,
                         const NoiseModel& noise, int m)
{
    const double sigma2 = noise.noise_power_w();
    const double c =
        double(summary.n_t) * double(summary.n_r) * p_t_k_w / (double(m) * sigma2);
    const arma::vec& lt = summary.lambdas_normalized[std::size_t(k)];
    double ase = 0.0;
    for (int q = 0; q < m; ++q)
        ase += std::log2(1.0 + c * lt(arma::uword(q)) * lt(arma::uword(q)));
    return ase;
}

OverlapTables make_overlap_tables(std::span<const ChannelRealization> channels, int m,
                                  std::span<const AnSelection> selections)
{
    const int k_users = int(channels.size());
    if (k_users < 1)
        throw std::invalid_argument("make_overlap_tables: need at least one channel");
    if (!selections.empty() && int(selections.size()) != k_users)
        throw std::invalid_argument("make_overlap_tables: one selection per user expected");

    OverlapTables t;
    t.m = m;
    t.n_r = channels[0].n_rx();
    t.n_t = channels[0].n_tx();

    for (int k = 0; k < k_users; ++k)
    {
        t.gains.push_back(channels[std::size_t(k)].effective_gains());
        t.gammas.push_back(channels[std::size_t(k)].gamma);
        std::vector<arma::uword> sel;
        if (!selections.empty())
            sel = selections[std::size_t(k)].path_indices;
        else
            for (int q = 0; q < m; ++q)
                sel.push_back(arma::uword(q));
        if (int(sel.size()) != m || sel.size() > channels[std::size_t(k)].paths.size())
            throw std::invalid_argument("make_overlap_tables: bad selection size");
        t.selected.push_back(std::move(sel));
    }

    t.f_r.assign(std::size_t(k_users), std::vector<arma::cx_mat>(std::size_t(k_users)));
    t.f_t.assign(std::size_t(k_users), std::vector<arma::cx_mat>(std::size_t(k_users)));
    for (int k = 0; k < k_users; ++k)
    {
        const auto& sel_k = t.selected[std::size_t(k)];
        for (int l = 0; l < k_users; ++l)
        {
            const auto& paths_l = channels[std::size_t(l)].paths;
            arma::cx_mat fr(arma::uword(m), arma::uword(paths_l.size()));
            arma::cx_mat ft(arma::uword(m), arma::uword(paths_l.size()));
            for (int i = 0; i < m; ++i)
            {
                const PathComponent& beam = channels[std::size_t(k)].paths[sel_k[std::size_t(i)]];
                for (arma::uword n = 0; n < paths_l.size(); ++n)
                {
                    fr(arma::uword(i), n) =
                        steering_overlap(beam.aoa_rad, paths_l[n].aoa_rad, t.n_r);
                    ft(arma::uword(i), n) =
                        steering_overlap(beam.aod_rad, paths_l[n].aod_rad, t.n_t);
                }
            }
            t.f_r[std::size_t(k)][std::size_t(l)] = std::move(fr);
            t.f_t[std::size_t(k)][std::size_t(l)] = std::move(ft);
        }
    }
    return t;
}

double an_dl_asymptotic(const OverlapTables& t, AntennaRegime regime, double p_t_w,
                        const NoiseModel& noise, int k_users, int m)
{
    const double sigma2 = noise.noise_power_w();
    const double share = p_t_w / (double(k_users) * double(m));

    double ase = 0.0;
    for (int k = 0; k < k_users; ++k)
    {
        const double g2 = user_gamma_sq(t, k);
        const auto& sel = t.selected[std::size_t(k)];
        const arma::cx_vec& gains = t.gains[std::size_t(k)];

        switch (regime)
        {
        case AntennaRegime::NT_INF:
        {
            // transmit side becomes ideal: only the selected paths survive
            const arma::cx_mat gram = receive_selected(t, k, k, sel, false); // D^H D
            const arma::cx_mat x = receive_selected(t, k, k, sel, true);     // D^H A L columns
            ase += log2_det_ratio(sigma2 * gram, (share * g2) * (x * x.t()));
            break;
        }
        case AntennaRegime::NR_INF:
        {
            arma::cx_mat r = sigma2 * eye_cx(m);
            for (int l = 0; l < k_users; ++l)
            {
                if (l == k)
                    continue;
                r += (share * g2) * lumped_transmit_block(t, l, k, sel);
            }
            const arma::cx_mat sig = (share * g2) * lumped_transmit_block(t, k, k, sel);
            ase += log2_det_ratio(r, sig);
            break;
        }
        case AntennaRegime::BOTH_INF:
        {
            for (arma::uword j : sel)
            {
                const double a2 = std::norm(gains(j));
                ase += std::log2(1.0 + share * g2 * a2 / sigma2);
            }
            break;
        }
        }
    }
    return ase;
}

arma::vec an_ul_asymptotic(const OverlapTables& t, AntennaRegime regime,
                           const arma::vec& p_t_per_user_w, const NoiseModel& noise, int m)
{
    const int k_users = int(t.gains.size());
    if (int(p_t_per_user_w.n_elem) != k_users)
        throw std::invalid_argument("an_ul_asymptotic: need one power per user");
    const double sigma2 = noise.noise_power_w();

    arma::vec ase(arma::uword(k_users), arma::fill::zeros);
    for (int k = 0; k < k_users; ++k)
    {
        const double g2k = user_gamma_sq(t, k);
        const double pk = p_t_per_user_w(arma::uword(k)) / double(m);
        const auto& sel_k = t.selected[std::size_t(k)];

        switch (regime)
        {
        case AntennaRegime::NR_INF:
        {
            const arma::cx_mat sig = (pk * g2k) * lumped_transmit_block(t, k, k, sel_k);
            ase(arma::uword(k)) = log2_det_ratio(sigma2 * eye_cx(m), sig);
            break;
        }
        case AntennaRegime::NT_INF:
        {
            const arma::cx_mat gram = receive_selected(t, k, k, sel_k, false);
            arma::cx_mat r = sigma2 * gram;
            for (int l = 0; l < k_users; ++l)
            {
                if (l == k)
                    continue;
                const double pl = p_t_per_user_w(arma::uword(l)) / double(m);
                const arma::cx_mat x = receive_selected(t, k, l, t.selected[std::size_t(l)], true);
                r += (pl * user_gamma_sq(t, l)) * (x * x.t());
            }
            const arma::cx_mat xs = receive_selected(t, k, k, sel_k, true);
            ase(arma::uword(k)) = log2_det_ratio(r, (pk * g2k) * (xs * xs.t()));
            break;
        }
        case AntennaRegime::BOTH_INF:
        {
            double val = 0.0;
            for (arma::uword j : sel_k)
                val += std::log2(1.0 + pk * g2k * std::norm(t.gains[std::size_t(k)](j)) / sigma2);
            ase(arma::uword(k)) = val;
            break;
        }
        }
    }
    return ase;
}

namespace
{
// a_r^H(beam aoa of k) H_k a_t(aod of path 1 of l), written с scalar overlaps
std::complex<double> scalar_beam_product(const ChannelRealization& hk,
                                         const ChannelRealization& hl, int n_t, int n_r)
{
    const arma::cx_vec g = hk.effective_gains();
    const double aoa_beam = hk.paths[0].aoa_rad;
    const double aod_target = hl.paths[0].aod_rad;
    std::complex<double> sum = 0.0;
    for (arma::uword i = 0; i < g.n_elem; ++i)
    {
        sum += g(i) * steering_overlap(aoa_beam, hk.paths[i].aoa_rad, n_r) *
               steering_overlap(hk.paths[i].aod_rad, aod_target, n_t);
    }
    return sum;
}
} // namespace

double an_dl_exact_m1(std::span<const ChannelRealization> channels, double p_t_w,
                      const NoiseModel& noise)
{
    const int k_users = int(channels.size());
    const double sigma2 = noise.noise_power_w();
    const double share = p_t_w / double(k_users); // M = 1

    double ase = 0.0;
    for (int k = 0; k < k_users; ++k)
    {
        const ChannelRealization& hk = channels[std::size_t(k)];
        const double g2 = hk.gamma * hk.gamma;
        const std::complex<double> sig = scalar_beam_product(hk, hk, hk.n_tx(), hk.n_rx());
        const double num = share * g2 * std::norm(sig);

        double den = sigma2;
        for (int l = 0; l < k_users; ++l)
        {
            if (l == k)
                continue;
            const std::complex<double> cross =
                scalar_beam_product(hk, channels[std::size_t(l)], hk.n_tx(), hk.n_rx());
            den += share * g2 * std::norm(cross);
        }
        ase += std::log2(1.0 + num / den);
    }
    return ase;
}

double an_dl_limits_m1(std::span<const ChannelRealization> channels, AntennaRegime regime,
                       double p_t_w, const NoiseModel& noise)
{
    const int k_users = int(channels.size());
    const double sigma2 = noise.noise_power_w();
    const double share = p_t_w / double(k_users);

    double ase = 0.0;
    for (int k = 0; k < k_users; ++k)
    {
        const ChannelRealization& hk = channels[std::size_t(k)];
        const double g2 = hk.gamma * hk.gamma;
        const double a1 = std::norm(hk.paths[0].effective_gain());

        if (regime == AntennaRegime::NR_INF)
        {
            double denom = 0.0;
            for (int l = 0; l < k_users; ++l)
            {
                if (l == k)
                    continue;
                denom += std::norm(steering_overlap(
                    hk.paths[0].aod_rad, channels[std::size_t(l)].paths[0].aod_rad, hk.n_tx()));
            }
            ase += std::log2(1.0 + 1.0 / denom);
        }
        else
        {
            // NT_INF and BOTH_INF coincide for single-stream beam steering
            ase += std::log2(1.0 + share * g2 * a1 / sigma2);
        }
    }
    return ase;
}

arma::vec an_ul_exact_m1(std::span<const ChannelRealization> channels,
                         const arma::vec& p_t_per_user_w, const NoiseModel& noise)
{
    const int k_users = int(channels.size());
    const double sigma2 = noise.noise_power_w();

    arma::vec ase(arma::uword(k_users), arma::fill::zeros);
    for (int k = 0; k < k_users; ++k)
    {
        const ChannelRealization& hk = channels[std::size_t(k)];
        const std::complex<double> sig = scalar_beam_product(hk, hk, hk.n_tx(), hk.n_rx());
        const double num =
            p_t_per_user_w(arma::uword(k)) * hk.gamma * hk.gamma * std::norm(sig);

        double den = sigma2;
        for (int l = 0; l < k_users; ++l)
        {
            if (l == k)
                continue;
            const ChannelRealization& hl = channels[std::size_t(l)];
            // D_k^H H_l Q_l: user l's own beams arriving at user k's combiner
            const arma::cx_vec g = hl.effective_gains();
            std::complex<double> cross = 0.0;
            for (arma::uword i = 0; i < g.n_elem; ++i)
            {
                cross += g(i) *
                         steering_overlap(hk.paths[0].aoa_rad, hl.paths[i].aoa_rad, hk.n_rx()) *
                         steering_overlap(hl.paths[i].aod_rad, hl.paths[0].aod_rad, hk.n_tx());
            }
            den += p_t_per_user_w(arma::uword(l)) * hl.gamma * hl.gamma * std::norm(cross);
        }
        ase(arma::uword(k)) = std::log2(1.0 + num / den);
    }
    return ase;
}

arma::vec an_ul_limits_m1(std::span<const ChannelRealization> channels, AntennaRegime regime,
                          const arma::vec& p_t_per_user_w, const NoiseModel& noise)
{
    const int k_users = int(channels.size());
    const double sigma2 = noise.noise_power_w();

    arma::vec ase(arma::uword(k_users), arma::fill::zeros);
    for (int k = 0; k < k_users; ++k)
    {
        const ChannelRealization& hk = channels[std::size_t(k)];
        const double g2k = hk.gamma * hk.gamma;
        const double a1k = std::norm(hk.paths[0].effective_gain());
        const double pk = p_t_per_user_w(arma::uword(k));

        if (regime == AntennaRegime::NT_INF)
        {
            double denom = 0.0;
            for (int l = 0; l < k_users; ++l)
            {
                if (l == k)
                    continue;
                const ChannelRealization& hl = channels[std::size_t(l)];
                denom += p_t_per_user_w(arma::uword(l)) * hl.gamma * hl.gamma *
                         std::norm(hl.paths[0].effective_gain()) *
                         std::norm(steering_overlap(hk.paths[0].aoa_rad, hl.paths[0].aoa_rad,
                                                    hk.n_rx()));
            }
            ase(arma::uword(k)) = std::log2(1.0 + pk * g2k * a1k / denom);
        }
        else
        {
            // NR_INF and BOTH_INF coincide for single-stream beam steering
            ase(arma::uword(k)) = std::log2(1.0 + pk * g2k * a1k / sigma2);
        }
    }
    return ase;
}

double mean_sq_overlap(int p, const ChannelParams& params, int samples, std::uint64_t seed)
{
    if (p < 1 || samples < 1)
        throw std::invalid_argument("mean_sq_overlap: p and samples must be >= 1");

    static std::mutex cache_mutex;
    static std::map<std::tuple<int, double, int, std::uint64_t>, double> cache;
    const auto key = std::make_tuple(p, params.angular_spread_deg, samples, seed);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }

    const double spread_rad = params.angular_spread_deg * kPi / 180.0;
    const double scale = spread_rad / std::sqrt(2.0);
    const double lim = kPi / 2.0 - 1e-9;
    RngStream stream = RngStream::substream(seed, {0x0F0F0F0Full, arma::uword(p)});
    double acc = 0.0;
    for (int i = 0; i < samples; ++i)
    {
        const double phi1 =
            std::clamp(stream.uniform(-kPi / 2.0, kPi / 2.0) + stream.laplace(scale), -lim, lim);
        const double phi2 =
            std::clamp(stream.uniform(-kPi / 2.0, kPi / 2.0) + stream.laplace(scale), -lim, lim);
        acc += std::norm(steering_overlap(phi1, phi2, p));
    }
    const double val = acc / double(samples);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        cache[key] = val;
    }
    return val;
}

double an_dl_largek_limit(int n_t, const ChannelParams& params)
{
    return (1.0 / kLn2) / mean_sq_overlap(n_t, params);
}

} // namespace mmwavesim
