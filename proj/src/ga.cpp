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
#include <cmath>
#include <numeric>

#include "swarm.hpp"

namespace risloc
{
    namespace
    {
        struct Genome
        {
            std::uint64_t ix = 0, iy = 0;
        };

        struct Lattice
        {
            SearchRegion region;
            double dx, dy;
            std::uint64_t nx, ny;

            // Clamped so the last lattice line never leaves the region through rounding
            Vec2 point(const Genome &g) const
            {
                return region.clamp({region.x_min + static_cast<double>(g.ix) * dx,
                                     region.y_min + static_cast<double>(g.iy) * dy});
            }
        };

        std::uint64_t lattice_count(double extent, double step)
        {
            return static_cast<std::uint64_t>(std::floor(extent / step + 1e-9)) + 1;
        }

        // Uniform re-draw within +-window of the current index, clipped to [0, n)
        std::uint64_t mutate_index(std::uint64_t i, std::uint64_t n, std::uint64_t window, CounterStream &rng)
        {
            const std::uint64_t lo = i > window ? i - window : 0;
            const std::uint64_t hi = std::min(n - 1, i + window);
            return lo + rng.below(hi - lo + 1);
        }
    }

    Estimate discrete_ga(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                         std::uint64_t seed)
    {
        detail::Stopwatch clock;
        if (!(params.ga_x_step > 0.0) || !(params.ga_y_step > 0.0))
            throw std::invalid_argument("discrete_ga: lattice steps must be positive");
        const std::size_t ps = params.population_size;
        if (ps < 1)
            throw std::invalid_argument("discrete_ga: population_size must be at least 1");

        const Lattice lat{region, params.ga_x_step, params.ga_y_step,
                          lattice_count(region.width(), params.ga_x_step),
                          lattice_count(region.height(), params.ga_y_step)};
        if (lat.nx * lat.ny < ps)
            throw std::invalid_argument("discrete_ga: lattice of " + std::to_string(lat.nx * lat.ny) +
                                        " points is smaller than the population of " + std::to_string(ps));

        const auto window_x = std::max<std::uint64_t>(1, std::llround(params.mutation_window / lat.dx));
        const auto window_y = std::max<std::uint64_t>(1, std::llround(params.mutation_window / lat.dy));
        const std::size_t elites = std::min(params.elitism, ps);
        const std::size_t tournament = std::max<std::size_t>(1, params.tournament_size);

        CounterStream rng(derive_seed(seed, "ga"));
        detail::Budget budget(params.eval_budget);
        if (!budget.allows(ps))
            throw BudgetError("evaluation budget exhausted before the initial GA population was evaluated");

        std::vector<Genome> pop(ps);
        std::vector<double> fitness(ps);
        for (auto &g : pop)
        {
            g.ix = rng.below(lat.nx);
            g.iy = rng.below(lat.ny);
        }
        for (std::size_t i = 0; i < ps; ++i)
            fitness[i] = objective(lat.point(pop[i]));
        budget.charge(ps);
        std::uint64_t evaluations = ps;

        // Ranking by (cost, index) keeps argmin deterministic
        std::vector<std::size_t> order(ps);
        auto rank = [&]
        {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b)
                             { return fitness[a] < fitness[b]; });
        };
        rank();

        Estimate e;
        if (params.keep_trace)
            e.trace.push_back(fitness[order.front()]);

        auto select = [&]
        {
            std::size_t best = rng.below(ps);
            for (std::size_t r = 1; r < tournament; ++r)
            {
                const std::size_t c = rng.below(ps);
                if (fitness[c] < fitness[best] || (fitness[c] == fitness[best] && c < best))
                    best = c;
            }
            return best;
        };

        std::vector<Genome> next;
        std::vector<double> next_fitness;
        for (std::size_t gen = 0; gen < params.max_generations; ++gen)
        {
            const std::size_t offspring = ps - elites;
            if (!budget.allows(offspring))
                break;

            next.clear();
            next_fitness.clear();
            for (std::size_t i = 0; i < elites; ++i)
            {
                next.push_back(pop[order[i]]);
                next_fitness.push_back(fitness[order[i]]);
            }
            while (next.size() < ps)
            {
                Genome a = pop[select()];
                Genome b = pop[select()];
                if (rng.uniform() < params.crossover_rate)
                {
                    // Uniform crossover over the two coordinates
                    if (rng.uniform() < 0.5)
                        std::swap(a.ix, b.ix);
                    if (rng.uniform() < 0.5)
                        std::swap(a.iy, b.iy);
                }
                for (Genome *child : {&a, &b})
                {
                    if (rng.uniform() < params.mutation_rate)
                        child->ix = mutate_index(child->ix, lat.nx, window_x, rng);
                    if (rng.uniform() < params.mutation_rate)
                        child->iy = mutate_index(child->iy, lat.ny, window_y, rng);
                }
                next.push_back(a);
                if (next.size() < ps)
                    next.push_back(b);
            }
            for (std::size_t i = elites; i < ps; ++i)
                next_fitness.push_back(objective(lat.point(next[i])));
            budget.charge(offspring);
            evaluations += offspring;

            pop.swap(next);
            fitness.swap(next_fitness);
            rank();
            if (params.keep_trace)
                e.trace.push_back(fitness[order.front()]);
        }

        e.optimizer = "ga";
        e.position = region.lift(lat.point(pop[order.front()]));
        e.final_cost = fitness[order.front()];
        e.evaluations_used = evaluations;
        e.seed = seed;
        e.wall_time = clock.seconds();
        return e;
    }
}
