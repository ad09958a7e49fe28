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

// Internal building blocks shared by the optimizers

#ifndef RISLOC_SRC_SWARM_HPP
#define RISLOC_SRC_SWARM_HPP

#include <chrono>
#include <limits>
#include <vector>

#include "risloc/optim.hpp"

namespace risloc::detail
{
    // Counts evaluations against an optional cap
    class Budget
    {
    public:
        explicit Budget(std::uint64_t limit) : limit_(limit) {}
        bool unlimited() const { return limit_ == 0; }
        bool allows(std::uint64_t n) const { return unlimited() || used_ + n <= limit_; }
        std::uint64_t remaining() const
        {
            return unlimited() ? std::numeric_limits<std::uint64_t>::max() : limit_ - used_;
        }
        void charge(std::uint64_t n) { used_ += n; }
        std::uint64_t used() const { return used_; }

    private:
        std::uint64_t limit_;
        std::uint64_t used_ = 0;
    };

    struct SwarmResult
    {
        Vec2 best;
        double best_cost = std::numeric_limits<double>::infinity();
        std::uint64_t evaluations = 0;
        std::vector<double> trace;
    };

    // Global-best PSO from the given initial positions. Velocities start uniform
    // in +-(region extent). Throws BudgetError when the budget cannot cover the
    // initial evaluation of the swarm.
    SwarmResult swarm_search(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                             std::vector<Vec2> positions, CounterStream &rng, Budget &budget);

    inline Vec2 uniform_point(const SearchRegion &region, CounterStream &rng)
    {
        const double x = rng.uniform(region.x_min, region.x_max);
        const double y = rng.uniform(region.y_min, region.y_max);
        return {x, y};
    }

    class Stopwatch
    {
    public:
        Stopwatch() : start_(std::chrono::steady_clock::now()) {}
        double seconds() const
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        }

    private:
        std::chrono::steady_clock::time_point start_;
    };
}

#endif
