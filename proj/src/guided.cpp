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

// Two-stage estimators built from the PSO and GA primitives

#include <algorithm>
#include <cmath>

#include "swarm.hpp"

namespace risloc
{
    SearchRegion confined_square(const SearchRegion &region, const Vec2 &c, double area)
    {
        if (!(area > 0.0))
            throw std::invalid_argument("confined_square: area must be positive");
        const double half = 0.5 * std::sqrt(area);
        SearchRegion box = region;
        box.x_min = std::max(region.x_min, c.x - half);
        box.x_max = std::min(region.x_max, c.x + half);
        box.y_min = std::max(region.y_min, c.y - half);
        box.y_max = std::min(region.y_max, c.y + half);
        return box;
    }

    Estimate a_priori_guided_pso(const Objective &objective, const SearchRegion &region, const RegionMask &mask,
                                 const OptimizerParams &params, std::uint64_t seed)
    {
        detail::Stopwatch clock;
        const bool mask_empty = mask.nx() == 0 || mask.empty();
        if (!mask_empty && !mask.covers(region))
            throw std::invalid_argument("a_priori_guided_pso: region mask does not cover the search region");

        Estimate first = pso(objective, region, params, seed);
        first.optimizer = "apso";
        if (first.final_cost < params.apriori_threshold * objective.cost_scale())
            return first;

        const std::size_t ss = params.swarm_size;
        detail::Budget budget(params.eval_budget == 0 ? 0 : params.eval_budget - first.evaluations_used);
        if (params.eval_budget != 0 && !budget.allows(2 * ss))
        {
            first.note = "re-run skipped: evaluation budget exhausted";
            first.wall_time = clock.seconds();
            return first;
        }

        CounterStream rng(derive_seed(seed, "apso-rerun"));
        std::vector<Vec2> init;
        init.reserve(2 * ss);
        for (std::size_t i = 0; i < ss; ++i)
            init.push_back(detail::uniform_point(region, rng));
        for (std::size_t i = 0; i < ss; ++i)
            init.push_back(mask_empty ? detail::uniform_point(region, rng) : mask.sample(region, rng));

        auto second = detail::swarm_search(objective, region, params, std::move(init), rng, budget);

        Estimate e;
        e.optimizer = "apso";
        e.position = region.lift(second.best);
        e.final_cost = second.best_cost;
        e.evaluations_used = first.evaluations_used + second.evaluations;
        e.seed = seed;
        e.note = mask_empty ? "re-run with empty region mask: uniform 2*ss swarm" : "re-run in problematic regions";
        if (params.keep_trace)
        {
            e.trace = std::move(first.trace);
            e.trace.insert(e.trace.end(), second.trace.begin(), second.trace.end());
        }
        e.wall_time = clock.seconds();
        return e;
    }

    Estimate ga_pso_hybrid(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                           std::uint64_t seed)
    {
        detail::Stopwatch clock;
        if (!(params.hybrid_area < region.area()))
            throw std::invalid_argument("ga_pso_hybrid: hybrid_area must be smaller than the search region");

        // Same stream as a plain GA run with this seed
        const Estimate coarse = discrete_ga(objective, region, params, seed);
        const SearchRegion box = confined_square(region, {coarse.position.x, coarse.position.y}, params.hybrid_area);

        detail::Budget budget(params.eval_budget == 0 ? 0 : params.eval_budget - coarse.evaluations_used);
        CounterStream rng(derive_seed(seed, "hybrid-pso"));
        std::vector<Vec2> init(params.hybrid_swarm_size);
        for (auto &p : init)
            p = detail::uniform_point(box, rng);
        auto fine = detail::swarm_search(objective, box, params, std::move(init), rng, budget);

        Estimate e;
        e.optimizer = "hybrid";
        e.position = region.lift(fine.best);
        e.final_cost = fine.best_cost;
        e.evaluations_used = coarse.evaluations_used + fine.evaluations;
        e.seed = seed;
        if (params.keep_trace)
        {
            e.trace = coarse.trace;
            e.trace.insert(e.trace.end(), fine.trace.begin(), fine.trace.end());
        }
        e.wall_time = clock.seconds();
        return e;
    }
}
