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

#include "swarm.hpp"

#include <algorithm>

namespace risloc
{
    namespace detail
    {
        SwarmResult swarm_search(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                                 std::vector<Vec2> positions, CounterStream &rng, Budget &budget)
        {
            const std::size_t n = positions.size();
            if (n == 0)
                throw std::invalid_argument("swarm_search: empty swarm");
            if (!budget.allows(n))
                throw BudgetError("evaluation budget exhausted before the first PSO iteration completed");

            const double span_x = region.width(), span_y = region.height();
            std::vector<Vec2> velocity(n);
            for (auto &v : velocity)
            {
                v.x = rng.uniform(-span_x, span_x);
                v.y = rng.uniform(-span_y, span_y);
            }

            SwarmResult out;
            std::vector<Vec2> personal = positions;
            std::vector<double> personal_cost(n);
            std::size_t best_index = 0;
            for (std::size_t i = 0; i < n; ++i)
            {
                personal_cost[i] = objective(positions[i]);
                if (personal_cost[i] < personal_cost[best_index])
                    best_index = i;
            }
            budget.charge(n);
            out.evaluations += n;
            out.best = personal[best_index];
            out.best_cost = personal_cost[best_index];
            if (params.keep_trace)
                out.trace.push_back(out.best_cost);

            const double tolerance = params.fitness_stall_tolerance * objective.cost_scale();
            std::vector<double> history{out.best_cost};

            for (std::size_t iter = 0; iter < params.max_iterations; ++iter)
            {
                if (!budget.allows(n))
                    break;
                for (std::size_t i = 0; i < n; ++i)
                {
                    auto &x = positions[i];
                    auto &v = velocity[i];
                    const double r1x = rng.uniform(), r2x = rng.uniform();
                    const double r1y = rng.uniform(), r2y = rng.uniform();
                    v.x = params.inertia * v.x + params.cognitive * r1x * (personal[i].x - x.x) +
                          params.social * r2x * (out.best.x - x.x);
                    v.y = params.inertia * v.y + params.cognitive * r1y * (personal[i].y - x.y) +
                          params.social * r2y * (out.best.y - x.y);
                    x.x += v.x;
                    x.y += v.y;
                    // Clamp to the box and stop the offending velocity component
                    if (x.x < region.x_min || x.x > region.x_max)
                    {
                        x.x = std::clamp(x.x, region.x_min, region.x_max);
                        v.x = 0.0;
                    }
                    if (x.y < region.y_min || x.y > region.y_max)
                    {
                        x.y = std::clamp(x.y, region.y_min, region.y_max);
                        v.y = 0.0;
                    }
                }
                // Reduce in particle order: lowest index wins ties
                for (std::size_t i = 0; i < n; ++i)
                {
                    const double c = objective(positions[i]);
                    if (c < personal_cost[i])
                    {
                        personal_cost[i] = c;
                        personal[i] = positions[i];
                    }
                }
                budget.charge(n);
                out.evaluations += n;
                for (std::size_t i = 0; i < n; ++i)
                    if (personal_cost[i] < out.best_cost)
                    {
                        out.best_cost = personal_cost[i];
                        out.best = personal[i];
                    }
                if (params.keep_trace)
                    out.trace.push_back(out.best_cost);

                history.push_back(out.best_cost);
                const std::size_t h = history.size() - 1;
                if (h >= params.stall_iterations &&
                    history[h - params.stall_iterations] - history[h] < tolerance)
                    break;
            }
            return out;
        }
    }

    Estimate pso(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                 std::uint64_t seed)
    {
        detail::Stopwatch clock;
        CounterStream rng(derive_seed(seed, "pso"));
        detail::Budget budget(params.eval_budget);

        std::vector<Vec2> init(params.swarm_size);
        for (auto &p : init)
            p = detail::uniform_point(region, rng);
        auto result = detail::swarm_search(objective, region, params, std::move(init), rng, budget);

        Estimate e;
        e.optimizer = "pso";
        e.position = region.lift(result.best);
        e.final_cost = result.best_cost;
        e.evaluations_used = result.evaluations;
        e.trace = std::move(result.trace);
        e.seed = seed;
        e.wall_time = clock.seconds();
        return e;
    }
}
