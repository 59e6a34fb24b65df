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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmwavesim/metrics.hpp"

using namespace mmwavesim;

namespace
{
arma::cx_mat random_cx(arma::uword rows, arma::uword cols, RngStream& s)
{
    arma::cx_mat x(rows, cols);
    for (arma::uword i = 0; i < x.n_elem; ++i)
        x(i) = s.complex_normal();
    return x;
}

ChannelRealization random_channel(int n_r, int n_t, std::uint64_t salt)
{
    ChannelParams params;
    params.n_cl = 2;
    params.n_ray_per_cluster = 5;
    RngStream s = RngStream::substream(777, {salt});
    return generate_channel(params, n_r, n_t, 30.0, s);
}

BeamformerSet cm_fd_set(std::span<const ChannelRealization> channels, int m)
{
    BeamformerSet bf;
    bf.kind = Architecture::CM_FD;
    for (const ChannelRealization& h : channels)
    {
        auto [q, d] = cm_fd(h, m);
        bf.precoders.push_back(std::move(q));
        bf.postcoders.push_back(std::move(d));
    }
    bf.n_rf_tx = channels[0].n_tx();
    bf.n_rf_rx = channels[0].n_rx();
    return bf;
}

arma::cx_mat random_unitary(int m, RngStream& s)
{
    arma::cx_mat q, r;
    arma::qr(q, r, random_cx(arma::uword(m), arma::uword(m), s));
    return q;
}
} // namespace

TEST_CASE("noise power follows F N0 W in watts")
{
    NoiseModel noise; // F = 3 dB, N0 = -174 dBm/Hz, W = 500 MHz
    const double f_lin = std::pow(10.0, 0.3);
    const double n0_w = std::pow(10.0, (-174.0 - 30.0) / 10.0);
    CHECK(noise.noise_power_w() == doctest::Approx(f_lin * n0_w * 5e8).epsilon(1e-12));
    CHECK(noise.noise_power_w() == doctest::Approx(3.9716e-12).epsilon(1e-4));
}

TEST_CASE("downlink ASE is zero at zero transmit power")
{
    std::vector<ChannelRealization> channels{random_channel(4, 8, 1), random_channel(4, 8, 2)};
    const BeamformerSet bf = cm_fd_set(channels, 2);
    const AseResult r = ase_downlink(channels, bf, 0.0, NoiseModel{}, 2);
    CHECK(r.total == 0.0);
}

TEST_CASE("single-user CM-FD ASE matches the spectral oracle")
{
    NoiseModel noise;
    const double sigma2 = noise.noise_power_w();
    const double p_t = 0.5;
    const int m = 2;
    for (std::uint64_t t = 0; t < 50; ++t)
    {
        std::vector<ChannelRealization> channels{random_channel(8, 8, 100 + t)};
        const BeamformerSet bf = cm_fd_set(channels, m);
        const AseResult r = ase_downlink(channels, bf, p_t, noise, m);

        // independent route: eigenvalues of H^H H
        arma::vec ev;
        arma::eig_sym(ev, channels[0].matrix.t() * channels[0].matrix);
        ev = arma::sort(ev, "descend");
        double oracle = 0.0;
        for (int q = 0; q < m; ++q)
            oracle += std::log2(1.0 + (p_t / double(m)) * ev(arma::uword(q)) / sigma2);
        CHECK(r.total == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("PZF with block-orthogonal channels splits into isolated links")
{
    RngStream s = RngStream::substream(9, {4});
    // orthogonal row and column spaces: separate antenna blocks per user
    arma::cx_mat h0(8, 16, arma::fill::zeros), h1(8, 16, arma::fill::zeros);
    h0.submat(0, 0, 3, 7) = random_cx(4, 8, s);
    h1.submat(4, 8, 7, 15) = random_cx(4, 8, s);
    ChannelRealization c0, c1;
    c0.matrix = h0;
    c1.matrix = h1;
    std::vector<ChannelRealization> channels{c0, c1};

    const int m = 2;
    NoiseModel noise;
    BeamformerSet bf;
    bf.kind = Architecture::PZF_FD;
    for (int k = 0; k < 2; ++k)
    {
        auto [q, d] = pzf_fd(channels, k, m);
        bf.precoders.push_back(q);
        bf.postcoders.push_back(d);
    }
    const double p_t = 2.0;
    const AseResult joint = ase_downlink(channels, bf, p_t, noise, m);

    // isolated runs at the same per-user power share P_T / 2
    double isolated = 0.0;
    for (int k = 0; k < 2; ++k)
    {
        std::vector<ChannelRealization> solo{channels[std::size_t(k)]};
        BeamformerSet one;
        one.kind = Architecture::PZF_FD;
        one.precoders = {bf.precoders[std::size_t(k)]};
        one.postcoders = {bf.postcoders[std::size_t(k)]};
        isolated += ase_downlink(solo, one, p_t / 2.0, noise, m).total;
    }
    CHECK(joint.total == doctest::Approx(isolated).epsilon(1e-10));
}

TEST_CASE("uplink reduces to the single-user log-det without interference")
{
    std::vector<ChannelRealization> channels{random_channel(8, 4, 11), random_channel(8, 4, 12)};
    const int m = 2;
    const BeamformerSet bf = cm_fd_set(channels, m);
    NoiseModel noise;
    arma::vec powers = {0.7, 0.0};
    const double got = ase_uplink_user(channels, bf, 0, powers, noise, m);

    arma::vec ev;
    arma::eig_sym(ev, channels[0].matrix.t() * channels[0].matrix);
    ev = arma::sort(ev, "descend");
    double oracle = 0.0;
    for (int q = 0; q < m; ++q)
        oracle += std::log2(1.0 + (0.7 / double(m)) * ev(arma::uword(q)) / noise.noise_power_w());
    CHECK(got == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("uplink ASE is symmetric under a user swap")
{
    std::vector<ChannelRealization> channels{random_channel(6, 4, 21), random_channel(6, 4, 22)};
    const int m = 2;
    const BeamformerSet bf = cm_fd_set(channels, m);
    NoiseModel noise;
    arma::vec powers = {0.3, 0.3};
    const double a0 = ase_uplink_user(channels, bf, 0, powers, noise, m);
    const double a1 = ase_uplink_user(channels, bf, 1, powers, noise, m);

    std::vector<ChannelRealization> swapped{channels[1], channels[0]};
    BeamformerSet bfs;
    bfs.kind = Architecture::CM_FD;
    bfs.precoders = {bf.precoders[1], bf.precoders[0]};
    bfs.postcoders = {bf.postcoders[1], bf.postcoders[0]};
    CHECK(ase_uplink_user(swapped, bfs, 1, powers, noise, m) == doctest::Approx(a0).epsilon(1e-12));
    CHECK(ase_uplink_user(swapped, bfs, 0, powers, noise, m) == doctest::Approx(a1).epsilon(1e-12));
}

TEST_CASE("uplink ASE matches an independently assembled covariance")
{
    const int m = 2, k_users = 3, n_r = 6, n_t = 4;
    std::vector<ChannelRealization> channels;
    for (int u = 0; u < k_users; ++u)
        channels.push_back(random_channel(n_r, n_t, 300 + std::uint64_t(u)));
    const BeamformerSet bf = cm_fd_set(channels, m);
    NoiseModel noise;
    arma::vec powers = {0.4, 0.9, 0.2};
    const int k = 1;
    const double got = ase_uplink_user(channels, bf, k, powers, noise, m);

    // naive element-by-element assembly of R and the signal matrix
    auto triple_product = [&](int user) {
        const arma::cx_mat& d = bf.postcoders[std::size_t(k)];
        const arma::cx_mat& h = channels[std::size_t(user)].matrix;
        const arma::cx_mat& q = bf.precoders[std::size_t(user)];
        arma::cx_mat b(static_cast<arma::uword>(m), static_cast<arma::uword>(m), arma::fill::zeros);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int a = 0; a < n_r; ++a)
                    for (int c = 0; c < n_t; ++c)
                        b(arma::uword(i), arma::uword(j)) += std::conj(d(arma::uword(a), arma::uword(i))) *
                                                             h(arma::uword(a), arma::uword(c)) *
                                                             q(arma::uword(c), arma::uword(j));
        return b;
    };
    arma::cx_mat r(static_cast<arma::uword>(m), static_cast<arma::uword>(m), arma::fill::zeros);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int a = 0; a < n_r; ++a)
                r(arma::uword(i), arma::uword(j)) +=
                    noise.noise_power_w() *
                    std::conj(bf.postcoders[std::size_t(k)](arma::uword(a), arma::uword(i))) *
                    bf.postcoders[std::size_t(k)](arma::uword(a), arma::uword(j));
    for (int l = 0; l < k_users; ++l)
    {
        if (l == k)
            continue;
        const arma::cx_mat b = triple_product(l);
        r += (powers(arma::uword(l)) / double(m)) * b * b.t();
    }
    const arma::cx_mat bsig = triple_product(k);
    const arma::cx_mat sig = (powers(arma::uword(k)) / double(m)) * bsig * bsig.t();
    const std::complex<double> det_ratio =
        arma::det(r + sig) / arma::det(r);
    const double oracle = std::log2(det_ratio.real());
    CHECK(got == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("ASE is invariant under per-user unitary rotations")
{
    const int m = 3;
    std::vector<ChannelRealization> channels{random_channel(8, 12, 31), random_channel(8, 12, 32)};
    BeamformerSet bf = cm_fd_set(channels, m);
    NoiseModel noise;
    const double base = ase_downlink(channels, bf, 1.3, noise, m).total;

    RngStream s = RngStream::substream(55, {1});
    for (std::size_t k = 0; k < 2; ++k)
    {
        bf.precoders[k] = bf.precoders[k] * random_unitary(m, s);
        bf.postcoders[k] = bf.postcoders[k] * random_unitary(m, s);
    }
    const double rotated = ase_downlink(channels, bf, 1.3, noise, m).total;
    CHECK(rotated == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("single-user ASE is monotone in transmit power")
{
    std::vector<ChannelRealization> channels{random_channel(8, 8, 41)};
    const BeamformerSet bf = cm_fd_set(channels, 2);
    NoiseModel noise;
    double prev = 0.0;
    for (double p : {0.0, 0.01, 0.1, 1.0, 10.0})
    {
        const double ase = ase_downlink(channels, bf, p, noise, 2).total;
        CHECK(ase >= prev - 1e-12);
        prev = ase;
    }
}

TEST_CASE("consumed_power reproduces the hand-computed reference values")
{
    PowerModel pm;
    CHECK(consumed_power(Architecture::CM_FD, PowerSide::TX, 64, 64, 0, pm) ==
          doctest::Approx(10.867).epsilon(1e-12));
    CHECK(consumed_power(Architecture::CM_HY, PowerSide::TX, 64, 3, 0, pm) ==
          doctest::Approx(5.461).epsilon(1e-12));
    CHECK(consumed_power(Architecture::AN, PowerSide::TX, 64, 3, 0, pm) ==
          doctest::Approx(5.634).epsilon(1e-12));
}

TEST_CASE("consumed_power covers every architecture and both sides")
{
    PowerModel pm;
    const int n_ant = 32, n_rf = 4, n_q = 8;
    for (Architecture a : {Architecture::CM_FD, Architecture::PZF_FD, Architecture::CM_HY,
                           Architecture::PZF_HY, Architecture::AN, Architecture::SW_PHSH,
                           Architecture::SW})
    {
        for (PowerSide side : {PowerSide::TX, PowerSide::RX})
        {
            const double w = consumed_power(a, side, n_ant, n_rf, n_q, pm, 64);
            CHECK(w > 0.0);
            CHECK(std::isfinite(w));
        }
    }
    // SW-PHSH TX formula spelled out
    const double sw_phsh = consumed_power(Architecture::SW_PHSH, PowerSide::TX, 64, 3, 8, pm);
    const double expected = 3.0 * (0.040 + 0.110 + 8.0 * 0.001) + 64.0 * (3.0 * 0.005 + 0.016) + 0.243;
    CHECK(sw_phsh == doctest::Approx(expected).epsilon(1e-12));
    // SW TX formula spelled out
    const double sw = consumed_power(Architecture::SW, PowerSide::TX, 64, 3, 0, pm);
    CHECK(sw == doctest::Approx(3.0 * (0.040 + 0.110 + 0.005) + 3.0 * 0.016 + 0.243).epsilon(1e-12));
}

TEST_CASE("consumed_power is linear in antenna and chain counts")
{
    PowerModel pm;
    for (Architecture a : {Architecture::CM_FD, Architecture::CM_HY, Architecture::AN,
                           Architecture::SW_PHSH, Architecture::SW})
    {
        // finite differences in n_ant at fixed n_rf are constant
        const double d1 = consumed_power(a, PowerSide::TX, 17, 3, 8, pm) -
                          consumed_power(a, PowerSide::TX, 16, 3, 8, pm);
        const double d2 = consumed_power(a, PowerSide::TX, 33, 3, 8, pm) -
                          consumed_power(a, PowerSide::TX, 32, 3, 8, pm);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
        // and in n_rf at fixed n_ant
        const double e1 = consumed_power(a, PowerSide::TX, 32, 4, 8, pm) -
                          consumed_power(a, PowerSide::TX, 32, 3, 8, pm);
        const double e2 = consumed_power(a, PowerSide::TX, 32, 8, 8, pm) -
                          consumed_power(a, PowerSide::TX, 32, 7, 8, pm);
        CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
    }
}

TEST_CASE("hybrid receiver LNA term: corrected and verbatim readings")
{
    PowerModel pm;
    const double corrected = consumed_power(Architecture::CM_HY, PowerSide::RX, 16, 3, 0, pm, 64);
    pm.hy_rx_lna_verbatim = true;
    const double verbatim = consumed_power(Architecture::CM_HY, PowerSide::RX, 16, 3, 0, pm, 64);
    CHECK(verbatim - corrected == doctest::Approx((64.0 - 16.0) * 0.030).epsilon(1e-12));
    CHECK_THROWS_AS(consumed_power(Architecture::CM_HY, PowerSide::RX, 16, 3, 0, pm, 0),
                    std::invalid_argument);
}

TEST_CASE("gee_downlink arithmetic on the FD reference scenario")
{
    // N_T = 64, N_R = 16, K = 4, P_T = 1 W, eta = 2, ASE = 40 bit/s/Hz
    PowerModel pm;
    NoiseModel noise;
    AseResult ase;
    ase.total = 40.0;
    ase.per_user = {10.0, 10.0, 10.0, 10.0};
    BeamformerSet bf;
    bf.kind = Architecture::CM_FD;
    bf.n_rf_tx = 64;
    bf.n_rf_rx = 16;
    const SystemDims dims{64, 16, 4};
    const GeeResult gee = gee_downlink(ase, 1.0, bf, dims, pm, noise);

    const double denom = 2.0 + 10.867 + 4.0 * (16.0 * (0.040 + 0.200 + 0.030) + 0.243);
    CHECK(denom == doctest::Approx(31.119).epsilon(1e-12));
    CHECK(gee.consumed_power_w == doctest::Approx(denom).epsilon(1e-12));
    CHECK(gee.total == doctest::Approx(5e8 * 40.0 / denom).epsilon(1e-12));
}

TEST_CASE("GEE is zero at zero ASE and decreasing in transmit power")
{
    PowerModel pm;
    NoiseModel noise;
    AseResult zero;
    zero.total = 0.0;
    zero.per_user = arma::vec(3, arma::fill::zeros);
    BeamformerSet bf;
    bf.kind = Architecture::AN;
    bf.n_rf_tx = 3;
    bf.n_rf_rx = 3;
    const SystemDims dims{32, 8, 3};
    CHECK(gee_downlink(zero, 0.5, bf, dims, pm, noise).total == 0.0);

    AseResult fixed;
    fixed.total = 25.0;
    fixed.per_user = arma::vec(3, arma::fill::value(25.0 / 3.0));
    double prev = arma::datum::inf;
    for (double p : {0.1, 0.5, 1.0, 5.0})
    {
        const double g = gee_downlink(fixed, p, bf, dims, pm, noise).total;
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("uplink GEE mirrors the downlink definition")
{
    PowerModel pm;
    NoiseModel noise;
    const SystemDims dims{16, 64, 4}; // terminal transmits with 16 antennas
    const double g = gee_uplink_user(5.0, 0.2, Architecture::AN, dims, 1, 0, pm, noise);
    const double p_tx_c = 1.0 * (0.040 + 16.0 * 0.027 + 0.110);
    CHECK(g == doctest::Approx(5e8 * 5.0 / (2.0 * 0.2 + p_tx_c)).epsilon(1e-12));
    CHECK(gee_uplink_user(0.0, 0.2, Architecture::AN, dims, 1, 0, pm, noise) == 0.0);
    // monotone decreasing in the user's transmit power at fixed rate
    CHECK(gee_uplink_user(5.0, 0.4, Architecture::AN, dims, 1, 0, pm, noise) < g);
}

TEST_CASE("GEE denominator is positive for every architecture")
{
    PowerModel pm;
    NoiseModel noise;
    AseResult ase;
    ase.total = 1.0;
    ase.per_user = arma::vec(2, arma::fill::value(0.5));
    for (Architecture a : {Architecture::CM_FD, Architecture::PZF_FD, Architecture::CM_HY,
                           Architecture::PZF_HY, Architecture::AN, Architecture::SW_PHSH,
                           Architecture::SW})
    {
        BeamformerSet bf;
        bf.kind = a;
        bf.n_rf_tx = 6;
        bf.n_rf_rx = 3;
        bf.n_q = 8;
        const GeeResult g = gee_downlink(ase, 0.0, bf, SystemDims{24, 8, 2}, pm, noise);
        CHECK(g.consumed_power_w > 0.0);
    }
}

TEST_CASE("a rank-deficient postcoder triggers the jitter fallback")
{
    std::vector<ChannelRealization> channels{random_channel(6, 6, 71)};
    BeamformerSet bf = cm_fd_set(channels, 2);
    bf.postcoders[0].col(1).zeros(); // disturbance covariance becomes singular
    NoiseModel noise;
    const AseResult r = ase_downlink(channels, bf, 0.3, noise, 2);
    CHECK(r.regularized);
    CHECK(std::isfinite(r.total));
    CHECK(r.total >= 0.0);
}

TEST_CASE("power model validation")
{
    PowerModel pm;
    pm.eta = 1.0;
    CHECK_THROWS_AS(pm.validate(), std::invalid_argument);
    pm.eta = 2.0;
    pm.p_adc_w = -0.1;
    CHECK_THROWS_AS(pm.validate(), std::invalid_argument);
}
