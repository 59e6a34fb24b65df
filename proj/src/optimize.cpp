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

#include "mmwavesim/optimize.hpp"

#include <cmath>
#include <limits>

namespace mmwavesim
{

namespace
{
constexpr int kBracketPoints = 64;
constexpr double kGolden = 0.61803398874989484820;

double checked(const std::function<double(double)>& f, double p)
{
    const double v = f(p);
    if (!std::isfinite(v))
        throw EvaluationError("objective evaluation is not finite", p);
    return v;
}

struct InnerMax
{
    double p = 0.0;
    double value = -std::numeric_limits<double>::infinity();
    bool multimodal = false;
};

// Maximize g over [lo, hi]: bracketing grid, then golden section in the best
// bracket.  `extra` is an additional mandatory candidate.
InnerMax maximize_1d(const std::function<double(double)>& g, double lo, double hi, double extra)
{
    InnerMax out;
    std::vector<double> xs(kBracketPoints), vs(kBracketPoints);
    for (int i = 0; i < kBracketPoints; ++i)
    {
        xs[std::size_t(i)] = lo + (hi - lo) * double(i) / double(kBracketPoints - 1);
        vs[std::size_t(i)] = g(xs[std::size_t(i)]);
    }
    int best = 0;
    int peaks = 0;
    for (int i = 0; i < kBracketPoints; ++i)
    {
        if (vs[std::size_t(i)] > vs[std::size_t(best)])
            best = i;
        const bool left_ok = (i == 0) || vs[std::size_t(i)] >= vs[std::size_t(i - 1)];
        const bool right_ok =
            (i == kBracketPoints - 1) || vs[std::size_t(i)] >= vs[std::size_t(i + 1)];
        if (left_ok && right_ok)
            ++peaks;
    }
    out.multimodal = peaks > 1;

    double a = xs[std::size_t(std::max(0, best - 1))];
    double b = xs[std::size_t(std::min(kBracketPoints - 1, best + 1))];
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(b) + std::abs(a)); ++it)
    {
        if (f1 < f2)
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = g(x2);
        }
        else
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = g(x1);
        }
    }

    const double candidates[] = {xs[std::size_t(best)], 0.5 * (a + b), extra};
    for (double c : candidates)
    {
        if (c < lo || c > hi)
            continue;
        const double v = g(c);
        if (v > out.value)
        {
            out.value = v;
            out.p = c;
        }
    }
    return out;
}
} // namespace

DinkelbachTrace dinkelbach_max(const RatioProgram& prog, double tol, int max_iter)
{
    if (!prog.numerator || !prog.denominator)
        throw std::invalid_argument("dinkelbach_max: numerator and denominator are required");
    if (!(prog.p_min_w < prog.p_max_w))
        throw std::invalid_argument("dinkelbach_max: empty power domain");

    auto num = [&](double p) { return checked(prog.numerator, p); };
    auto den = [&](double p)
    {
        const double d = checked(prog.denominator, p);
        if (!(d > 0.0))
            throw std::invalid_argument("dinkelbach_max: denominator must stay positive");
        return d;
    };

    DinkelbachTrace trace;

    // feasible starting ratio: the best of a coarse scan (includes endpoints)
    double p_cur = prog.p_min_w;
    double lambda = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kBracketPoints; ++i)
    {
        const double p = prog.p_min_w +
                         (prog.p_max_w - prog.p_min_w) * double(i) / double(kBracketPoints - 1);
        const double ratio = num(p) / den(p);
        if (ratio > lambda)
        {
            lambda = ratio;
            p_cur = p;
        }
    }
    trace.lambda_sequence.push_back(lambda);

    for (int it = 0; it < max_iter; ++it)
    {
        auto parametric = [&](double p) { return num(p) - lambda * den(p); };
        const InnerMax inner = maximize_1d(parametric, prog.p_min_w, prog.p_max_w, p_cur);
        trace.multimodal_hint = trace.multimodal_hint || inner.multimodal;
        p_cur = inner.p;
        trace.iterations = it + 1;

        const double residual = num(p_cur) - lambda * den(p_cur);
        lambda = num(p_cur) / den(p_cur);
        trace.lambda_sequence.push_back(lambda);
        if (residual < tol * den(p_cur))
        {
            trace.converged = true;
            break;
        }
    }

    trace.p_star_w = p_cur;
    trace.gee_star = num(p_cur) / den(p_cur);
    return trace;
}

AltMaxResult alternating_gee_max(const GeeObjective& objective, const std::vector<int>& nt_grid,
                                 const std::vector<int>& nr_grid, double p_min_w, double p_max_w,
                                 double rel_tol, int max_rounds)
{
    if (nt_grid.empty() || nr_grid.empty())
        throw std::invalid_argument("alternating_gee_max: grids must be non-empty");
    if (!objective.numerator || !objective.denominator)
        throw std::invalid_argument("alternating_gee_max: objective is required");

    AltMaxResult res;
    res.n_t = nt_grid.front();
    res.n_r = nr_grid.front();
    res.p_t_w = p_min_w;
    res.gee = objective.value(res.n_t, res.n_r, res.p_t_w);

    for (int round = 0; round < max_rounds; ++round)
    {
        const double before = res.gee;

        for (int nt : nt_grid)
        {
            const double v = objective.value(nt, res.n_r, res.p_t_w);
            if (v > res.gee)
            {
                res.gee = v;
                res.n_t = nt;
            }
        }
        for (int nr : nr_grid)
        {
            const double v = objective.value(res.n_t, nr, res.p_t_w);
            if (v > res.gee)
            {
                res.gee = v;
                res.n_r = nr;
            }
        }

        RatioProgram prog;
        prog.numerator = [&, nt = res.n_t, nr = res.n_r](double p)
        { return objective.numerator(nt, nr, p); };
        prog.denominator = [&, nt = res.n_t, nr = res.n_r](double p)
        { return objective.denominator(nt, nr, p); };
        prog.p_min_w = p_min_w;
        prog.p_max_w = p_max_w;
        const DinkelbachTrace inner = dinkelbach_max(prog);
        if (inner.gee_star > res.gee)
        {
            res.gee = inner.gee_star;
            res.p_t_w = inner.p_star_w;
        }

        res.rounds = round + 1;
        res.objective_trace.push_back(res.gee);
        if (res.gee - before <= rel_tol * std::max(std::abs(before), 1e-300))
            break;
    }
    return res;
}

} // namespace mmwavesim
