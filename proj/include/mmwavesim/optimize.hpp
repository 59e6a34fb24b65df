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

#ifndef MMWAVESIM_OPTIMIZE_HPP
#define MMWAVESIM_OPTIMIZE_HPP

#include <functional>
#include <stdexcept>
#include <vector>

namespace mmwavesim
{

// Ratio N(p)/D(p) to maximize over p in [p_min_w, p_max_w]; the denominator
// must stay positive on the domain.
struct RatioProgram
{
    std::function<double(double)> numerator;   // e.g. W * ASE(P_T)
    std::function<double(double)> denominator; // e.g. eta P_T + const
    double p_min_w = 1e-4;
    double p_max_w = 10.0;
};

struct DinkelbachTrace
{
    std::vector<double> lambda_sequence; // non-decreasing
    double p_star_w = 0.0;
    double gee_star = 0.0; // numerator(p*) / denominator(p*)
    int iterations = 0;
    bool converged = false;
    bool multimodal_hint = false; // bracketing grid saw several local peaks
};

struct EvaluationError : std::runtime_error
{
    double p_w;
    EvaluationError(const std::string& what, double p) : std::runtime_error(what), p_w(p) {}
};

// Dinkelbach iteration: p_i maximizes N(p) - lambda_i D(p) (64-point grid
// bracket + golden section), lambda_{i+1} = N(p_i)/D(p_i), stopping when the
// parametric residual drops below tol * D(p_i).
DinkelbachTrace dinkelbach_max(const RatioProgram& prog, double tol = 1e-6, int max_iter = 50);

// Objective for the alternating antenna-count / power maximization, kept as
// a numerator/denominator pair so the power coordinate can run Dinkelbach.
struct GeeObjective
{
    std::function<double(int n_t, int n_r, double p_t_w)> numerator;
    std::function<double(int n_t, int n_r, double p_t_w)> denominator;

    double value(int n_t, int n_r, double p_t_w) const
    {
        return numerator(n_t, n_r, p_t_w) / denominator(n_t, n_r, p_t_w);
    }
};

struct AltMaxResult
{
    int n_t = 0;
    int n_r = 0;
    double p_t_w = 0.0;
    double gee = 0.0;
    int rounds = 0;
    std::vector<double> objective_trace; // non-decreasing, one entry per round
};

// Coordinate ascent: integer sweep over the N_T grid, then the N_R grid,
// then Dinkelbach over P_T; repeated until no coordinate improves the
// objective by more than rel_tol or max_rounds is hit.
AltMaxResult alternating_gee_max(const GeeObjective& objective, const std::vector<int>& nt_grid,
                                 const std::vector<int>& nr_grid, double p_min_w, double p_max_w,
                                 double rel_tol = 1e-4, int max_rounds = 10);

} // namespace mmwavesim

#endif
