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

#ifndef MMWAVESIM_RNG_HPP
#define MMWAVESIM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace mmwavesim
{

// Counter-based substreams: every (seed, id...) tuple maps to an independent
// deterministic stream, so trials can be generated in any order and on any
// number of threads with identical results.
class RngStream
{
  public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    // Derive a stream from a root seed and a tuple of identifiers
    // (e.g. {axis_point, trial, user}).
    static RngStream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
    {
        std::uint64_t key = mix(0x8BADF00DDEADBEEFull, seed);
        for (std::uint64_t id : ids)
            key = mix(key, id);
        return RngStream(key);
    }

    std::uint64_t next_u64()
    {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1)
    double uniform()
    {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    bool bernoulli(double p)
    {
        return uniform() < p;
    }

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal()
    {
        if (has_cached_)
        {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex Gaussian, unit variance overall
    std::complex<double> complex_normal()
    {
        double re = normal();
        double im = normal();
        return {re * 0.7071067811865475244, im * 0.7071067811865475244};
    }

    // Zero-mean Laplace with the given scale parameter b (variance 2 b^2)
    double laplace(double scale)
    {
        double u = uniform() - 0.5;
        double s = (u < 0.0) ? -1.0 : 1.0;
        return -scale * s * std::log1p(-2.0 * std::abs(u));
    }

  private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b)
    {
        std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace mmwavesim

#endif
