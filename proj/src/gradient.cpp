// SPDX-License-Identifier: Apache-2.0
//
// risloc: RIS-aided NLoS indoor localization simulator and estimators
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

#include <algorithm>
#include <array>
#include <cmath>

#include "swarm.hpp"

namespace risloc
{
    namespace
    {
        // Central differences, shortened to one side at the region boundary
        std::array<double, 2> clipped_gradient(const Objective &f, const SearchRegion &region, const Vec2 &p,
                                               double h)
        {
            const double xp = std::min(p.x + h, region.x_max), xm = std::max(p.x - h, region.x_min);
            const double yp = std::min(p.y + h, region.y_max), ym = std::max(p.y - h, region.y_min);
            const double gx = (f({xp, p.y}) - f({xm, p.y})) / (xp - xm);
            const double gy = (f({p.x, yp}) - f({p.x, ym})) / (yp - ym);
            return {gx, gy};
        }
    }

    Estimate gradient_baseline(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                               std::uint64_t seed)
    {
        detail::Stopwatch clock;
        if (!(params.gradient_step >= 1e-12))
            throw std::invalid_argument("gradient_baseline: finite-difference step underflow");
        const std::uint64_t limit = params.eval_budget != 0 ? params.eval_budget : params.nominal_pso_evaluations();
        detail::Budget budget(limit);
        CounterStream rng(derive_seed(seed, "gradient"));

        const std::size_t n_starts = std::max<std::size_t>(1, params.gradient_starts);
        std::vector<Vec2> start(n_starts);
        for (auto &p : start)
            p = detail::uniform_point(region, rng);

        // Initial samples first; descents share whatever budget is left
        std::vector<double> start_cost;
        for (std::size_t s = 0; s < n_starts && budget.allows(1); ++s)
        {
            start_cost.push_back(objective(start[s]));
            budget.charge(1);
        }
        if (start_cost.empty())
            throw BudgetError("gradient_baseline: evaluation budget is zero");

        Vec2 best = start[0];
        double best_cost = start_cost[0];
        for (std::size_t s = 1; s < start_cost.size(); ++s)
            if (start_cost[s] < best_cost)
            {
                best_cost = start_cost[s];
                best = start[s];
            }

        Estimate e;
        const double h = params.gradient_step;
        const std::size_t used_starts = start_cost.size();
        for (std::size_t s = 0; s < used_starts; ++s)
        {
            // Even split of the remaining budget over the remaining starts
            const std::uint64_t share = budget.remaining() / (used_starts - s);
            std::uint64_t local = share;
            Vec2 x = start[s];
            double fx = start_cost[s];
            double step = params.line_search_step;

            while (local >= 5)
            {
                const auto g = clipped_gradient(objective, region, x, h);
                local -= 4;
                budget.charge(4);
                const double gn = std::hypot(g[0], g[1]);
                if (!(gn > 0.0) || !std::isfinite(gn))
                    break;
                const Vec2 dir{-g[0] / gn, -g[1] / gn};

                // Backtracking line search with an Armijo condition
                bool accepted = false;
                for (double alpha = step; alpha >= params.line_search_min_step && local >= 1; alpha *= 0.5)
                {
                    const Vec2 trial = region.clamp({x.x + alpha * dir.x, x.y + alpha * dir.y});
                    const double ft = objective(trial);
                    --local;
                    budget.charge(1);
                    if (ft < fx - 1e-4 * alpha * gn)
                    {
                        x = trial;
                        fx = ft;
                        step = std::min(2.0 * alpha, params.line_search_step);
                        accepted = true;
                        break;
                    }
                }
                if (!accepted)
                    break;
            }
            if (fx < best_cost)
            {
                best_cost = fx;
                best = x;
            }
            if (params.keep_trace)
                e.trace.push_back(best_cost);
        }

        e.optimizer = "gradient";
        e.position = region.lift(best);
        e.final_cost = best_cost;
        e.evaluations_used = budget.used();
        e.seed = seed;
        e.wall_time = clock.seconds();
        return e;
    }
}
