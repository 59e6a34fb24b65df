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

#include "mmwavesim/beamformers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmwavesim
{

namespace
{
constexpr double kPi = 3.14159265358979323846;

// Fix the SVD phase ambiguity: rotate each (u, v) pair so the
// largest-magnitude entry of v is real positive (first index wins ties).
void fix_svd_phases(arma::cx_mat& u, arma::cx_mat& v)
{
    for (arma::uword q = 0; q < v.n_cols; ++q)
    {
        const arma::uword imax = arma::abs(v.col(q)).index_max();
        const std::complex<double> val = v(imax, q);
        if (std::abs(val) == 0.0)
            continue;
        const std::complex<double> rot = std::polar(1.0, -std::arg(val));
        v.col(q) *= rot;
        u.col(q) *= rot;
    }
}

arma::cx_mat unit_phases(const arma::cx_mat& x)
{
    arma::cx_mat out(x.n_rows, x.n_cols);
    for (arma::uword i = 0; i < x.n_elem; ++i)
        out(i) = std::polar(1.0, std::arg(x(i))); // arg(0) = 0 -> entry 1
    return out;
}
} // namespace

std::string to_string(Architecture a)
{
    switch (a)
    {
    case Architecture::CM_FD: return "CM-FD";
    case Architecture::PZF_FD: return "PZF-FD";
    case Architecture::CM_HY: return "CM-HY";
    case Architecture::PZF_HY: return "PZF-HY";
    case Architecture::AN: return "AN";
    case Architecture::SW_PHSH: return "SW-PHSH";
    case Architecture::SW: return "SW";
    }
    throw std::invalid_argument("to_string: unknown architecture");
}

Architecture architecture_from_string(const std::string& name)
{
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::toupper(c)); });
    std::replace(s.begin(), s.end(), '_', '-');
    if (s == "CM-FD") return Architecture::CM_FD;
    if (s == "PZF-FD") return Architecture::PZF_FD;
    if (s == "CM-HY") return Architecture::CM_HY;
    if (s == "PZF-HY") return Architecture::PZF_HY;
    if (s == "AN") return Architecture::AN;
    if (s == "SW-PHSH" || s == "SW+PHSH") return Architecture::SW_PHSH;
    if (s == "SW") return Architecture::SW;
    throw std::invalid_argument("unknown architecture name: " + name);
}

std::pair<arma::cx_mat, arma::cx_mat> cm_fd(const ChannelRealization& h, int m)
{
    const int n_r = h.n_rx();
    const int n_t = h.n_tx();
    if (m < 1 || m > std::min(n_r, n_t))
        throw std::invalid_argument("cm_fd: m must satisfy 1 <= m <= min(N_R, N_T)");

    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd_econ(u, s, v, h.matrix))
        throw std::runtime_error("cm_fd: SVD failed");
    arma::cx_mat um = u.cols(0, arma::uword(m) - 1);
    arma::cx_mat vm = v.cols(0, arma::uword(m) - 1);
    fix_svd_phases(um, vm);
    return {vm, um};
}

std::pair<arma::cx_mat, arma::cx_mat> pzf_fd(std::span<const ChannelRealization> channels,
                                             int k, int m)
{
    const int k_users = int(channels.size());
    if (k < 0 || k >= k_users)
        throw std::invalid_argument("pzf_fd: user index out of range");
    const int n_t = channels[std::size_t(k)].n_tx();
    if (n_t <= m * (k_users - 1) + m)
        throw InfeasibleError("pzf_fd: N_T must exceed M (K - 1) + M to project and keep rank");

    auto [q_cm, d_cm] = cm_fd(channels[std::size_t(k)], m);

    // subspace spanned by the other users' M dominant right singular vectors
    arma::cx_mat stacked(arma::uword(n_t), arma::uword(m * (k_users - 1)));
    arma::uword col = 0;
    for (int l = 0; l < k_users; ++l)
    {
        if (l == k)
            continue;
        auto [q_l, d_l] = cm_fd(channels[std::size_t(l)], m);
        stacked.cols(col, col + arma::uword(m) - 1) = q_l;
        col += arma::uword(m);
    }

    arma::cx_mat basis;
    if (k_users > 1)
    {
        if (!arma::orth(basis, stacked))
            throw std::runtime_error("pzf_fd: orthonormal basis computation failed");
    }

    arma::cx_mat projected = q_cm;
    if (basis.n_cols > 0)
        projected -= basis * (basis.t() * q_cm);

    // re-orthonormalize the projected columns, keeping their order
    arma::cx_mat q_orth, r;
    if (!arma::qr_econ(q_orth, r, projected))
        throw std::runtime_error("pzf_fd: QR failed");
    const arma::vec rdiag = arma::abs(r.diag());
    if (rdiag.min() < 1e-12 * std::max(1.0, rdiag.max()))
        throw SingularProjectionError("pzf_fd: projected precoder lost rank");
    // rotate so diag(R) is real positive: columns that were already
    // orthonormal pass through unchanged
    for (arma::uword c = 0; c < q_orth.n_cols; ++c)
        q_orth.col(c) *= std::polar(1.0, std::arg(r(c, c)));
    arma::cx_mat q_k = q_orth.cols(0, arma::uword(m) - 1);

    const arma::cx_mat eff = channels[std::size_t(k)].matrix * q_k; // N_R x M
    const arma::vec sv = arma::svd(eff);
    if (sv.min() < 1e-12 * std::max(1.0, sv.max()))
        throw SingularProjectionError("pzf_fd: effective channel H Q is rank deficient");
    arma::cx_mat d_k = arma::pinv(eff).t(); // N_R x M, so that D^H H Q = I
    return {q_k, d_k};
}

HybridFactors hybrid_factorize(const arma::cx_mat& target, int n_rf, HybridOptions opts)
{
    const arma::uword p = target.n_rows;
    const arma::uword m = target.n_cols;
    if (n_rf < 1)
        throw std::invalid_argument("hybrid_factorize: n_rf must be >= 1");

    HybridFactors out;
    if (arma::norm(target, "fro") == 0.0)
    {
        out.rf.ones(p, arma::uword(n_rf));
        out.baseband.zeros(arma::uword(n_rf), m);
        out.product.zeros(p, m);
        out.approx_error = 0.0;
        out.error_sequence = {0.0};
        return out;
    }

    // init: phases of the target columns tiled cyclically, with a
    // deterministic phase ramp per column so repeated columns stay linearly
    // independent (a plain tiling is a rank-M fixed point of the iteration)
    arma::cx_mat rf(p, arma::uword(n_rf));
    for (arma::uword c = 0; c < arma::uword(n_rf); ++c)
    {
        rf.col(c) = unit_phases(target.col(c % m));
        for (arma::uword r = 0; r < p; ++r)
            rf(r, c) *= std::polar(1.0, -2.0 * kPi * double(r) * double(c) / double(n_rf));
    }

    auto solve_bb = [&](const arma::cx_mat& rf_mat) { return arma::cx_mat(arma::pinv(rf_mat) * target); };

    arma::cx_mat bb = solve_bb(rf);
    double err = arma::norm(target - rf * bb, "fro");
    out.error_sequence.push_back(err);

    for (int it = 0; it < opts.max_iters; ++it)
    {
        arma::cx_mat rf_next = unit_phases(target * bb.t());
        arma::cx_mat bb_next = solve_bb(rf_next);
        const double err_next = arma::norm(target - rf_next * bb_next, "fro");
        if (err_next > err)
            break; // the phase step is not guaranteed to descend; keep the best
        const double improvement = err - err_next;
        rf = std::move(rf_next);
        bb = std::move(bb_next);
        err = err_next;
        out.error_sequence.push_back(err);
        out.iterations = it + 1;
        if (improvement < opts.tol * std::max(err, 1e-300))
            break;
    }

    out.rf = std::move(rf);
    out.baseband = std::move(bb);
    out.product = out.rf * out.baseband;
    out.approx_error = err;
    return out;
}

namespace
{
std::pair<HybridFactors, HybridFactors> factorize_pair(const arma::cx_mat& pre_target,
                                                       const arma::cx_mat& post_target,
                                                       int n_rf_tx, int n_rf_rx,
                                                       const HybridOptions& opts)
{
    return {hybrid_factorize(pre_target, n_rf_tx, opts),
            hybrid_factorize(post_target, n_rf_rx, opts)};
}
} // namespace

std::pair<HybridFactors, HybridFactors> cm_hy(std::span<const ChannelRealization> channels,
                                              int k, int m, int n_rf_tx, int n_rf_rx,
                                              bool cm_targets_pzf, HybridOptions opts)
{
    if (cm_targets_pzf)
    {
        auto [q, d] = pzf_fd(channels, k, m);
        return factorize_pair(q, d, n_rf_tx, n_rf_rx, opts);
    }
    auto [q, d] = cm_fd(channels[std::size_t(k)], m);
    return factorize_pair(q, d, n_rf_tx, n_rf_rx, opts);
}

std::pair<HybridFactors, HybridFactors> pzf_hy(std::span<const ChannelRealization> channels,
                                               int k, int m, int n_rf_tx, int n_rf_rx,
                                               HybridOptions opts)
{
    auto [q, d] = pzf_fd(channels, k, m);
    return factorize_pair(q, d, n_rf_tx, n_rf_rx, opts);
}

AnSelection an_select_paths(const ChannelRealization& h, int m, double min_sep_deg)
{
    if (h.paths.empty())
        throw std::invalid_argument("an_select_paths: channel has no paths");
    if (m < 1 || std::size_t(m) > h.paths.size())
        throw std::invalid_argument("an_select_paths: need at least m paths");

    const double min_sep = min_sep_deg * kPi / 180.0;
    AnSelection sel;
    for (arma::uword i = 0; i < h.paths.size() && int(sel.path_indices.size()) < m; ++i)
    {
        bool ok = true;
        for (arma::uword j : sel.path_indices)
        {
            if (std::abs(h.paths[i].aod_rad - h.paths[j].aod_rad) < min_sep ||
                std::abs(h.paths[i].aoa_rad - h.paths[j].aoa_rad) < min_sep)
            {
                ok = false;
                break;
            }
        }
        if (ok)
            sel.path_indices.push_back(i);
    }

    if (int(sel.path_indices.size()) < m)
    {
        // not enough well-separated paths: fall back to raw strength order
        sel.relaxed = true;
        for (arma::uword i = 0; i < h.paths.size() && int(sel.path_indices.size()) < m; ++i)
        {
            if (std::find(sel.path_indices.begin(), sel.path_indices.end(), i) ==
                sel.path_indices.end())
                sel.path_indices.push_back(i);
        }
    }
    return sel;
}

std::pair<arma::cx_mat, arma::cx_mat> an_beamsteer(const ChannelRealization& h, int m,
                                                   double min_sep_deg, AnSelection* selection_out)
{
    const AnSelection sel = an_select_paths(h, m, min_sep_deg);
    arma::cx_mat q(arma::uword(h.n_tx()), arma::uword(m));
    arma::cx_mat d(arma::uword(h.n_rx()), arma::uword(m));
    for (int c = 0; c < m; ++c)
    {
        const PathComponent& p = h.paths[sel.path_indices[std::size_t(c)]];
        q.col(arma::uword(c)) = ula_response(p.aod_rad, h.n_tx());
        d.col(arma::uword(c)) = ula_response(p.aoa_rad, h.n_rx());
    }
    if (selection_out != nullptr)
        *selection_out = sel;
    return {q, d};
}

arma::cx_mat sw_phsh_quantize(const arma::cx_mat& target, int n_q)
{
    if (n_q < 2)
        throw std::invalid_argument("sw_phsh_quantize: n_q must be >= 2");

    const double step = 2.0 * kPi / double(n_q);
    arma::cx_mat out(target.n_rows, target.n_cols);
    for (arma::uword i = 0; i < target.n_elem; ++i)
    {
        double a = std::arg(target(i)); // (-pi, pi], zero entries give 0
        if (a < 0.0)
            a += 2.0 * kPi;
        // nearest grid point under circular distance; the strict comparison
        // makes exact ties go to the smaller grid index
        int best = 0;
        double best_dist = arma::datum::inf;
        for (int q = 0; q < n_q; ++q)
        {
            double d = std::abs(a - double(q) * step);
            d = std::min(d, 2.0 * kPi - d);
            if (d < best_dist)
            {
                best_dist = d;
                best = q;
            }
        }
        out(i) = std::polar(1.0, double(best) * step);
    }
    return out;
}

SwMfnResult sw_mfn_select(const arma::cx_mat& target, int n_rf)
{
    const arma::uword p = target.n_rows;
    if (n_rf < 1 || arma::uword(n_rf) > p)
        throw std::invalid_argument("sw_mfn_select: need 1 <= n_rf <= rows(target)");

    arma::vec row_norms(p);
    for (arma::uword r = 0; r < p; ++r)
        row_norms(r) = arma::norm(target.row(r), 2);

    // strongest rows first; ties resolved toward the lowest index
    std::vector<arma::uword> order(p);
    std::iota(order.begin(), order.end(), arma::uword(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](arma::uword a, arma::uword b) { return row_norms(a) > row_norms(b); });
    order.resize(std::size_t(n_rf));
    std::sort(order.begin(), order.end());

    SwMfnResult out;
    out.selection.selected_rows = order;
    out.baseband.set_size(arma::uword(n_rf), target.n_cols);
    out.composed.zeros(p, target.n_cols);
    for (arma::uword i = 0; i < arma::uword(n_rf); ++i)
    {
        out.baseband.row(i) = target.row(order[i]);
        out.composed.row(order[i]) = target.row(order[i]);
    }
    return out;
}

} // namespace mmwavesim
