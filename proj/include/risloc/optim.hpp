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

#ifndef RISLOC_OPTIM_HPP
#define RISLOC_OPTIM_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "objective.hpp"
#include "random.hpp"
#include "scene.hpp"

namespace risloc
{
    // Tolerances and thresholds on cost are relative to Objective::cost_scale()
    // (the total weight for a CostEvaluator), so the same values apply with and
    // without noise normalization.
    struct OptimizerParams
    {
        // Particle swarm
        std::size_t swarm_size = 400;
        double inertia = 0.729;
        double cognitive = 1.49445;
        double social = 1.49445;
        std::size_t max_iterations = 300;
        double fitness_stall_tolerance = 1e-10;
        std::size_t stall_iterations = 50;

        // Discrete GA on the (x_step, y_step) lattice
        std::size_t population_size = 2000;
        std::size_t max_generations = 100;
        std::size_t tournament_size = 3;
        double crossover_rate = 0.9;
        double mutation_rate = 0.5;    // per gene
        double mutation_window = 2.0;  // m, half-width of the re-draw window
        std::size_t elitism = 1;
        double ga_x_step = 0.001; // m
        double ga_y_step = 0.001; // m

        // GA-PSO hybrid: swarm confined to a square of this area around the GA estimate
        double hybrid_area = 1.0; // m^2
        std::size_t hybrid_swarm_size = 200;

        // A-priori guided PSO: re-run when final cost >= apriori_threshold * cost_scale
        double apriori_threshold = 0.01;

        // Gradient baseline
        std::size_t gradient_starts = 64;
        double gradient_step = 1e-5;        // m, finite-difference step
        double line_search_step = 0.05;     // m, first trial step along the descent direction
        double line_search_min_step = 1e-9; // m

        // Total cost evaluations allowed per estimate; 0 means unlimited
        std::uint64_t eval_budget = 0;

        bool keep_trace = true;

        // Keys under "optim."; missing keys keep the defaults above
        static OptimizerParams from_config(const KeyValueFile &kv);
        KeyValueFile to_config() const;
        std::string digest() const;

        // Returns a description of every violated invariant
        std::vector<std::string> violations() const;

        // Nominal evaluation count of one plain PSO run (used to match budgets)
        std::uint64_t nominal_pso_evaluations() const { return swarm_size * (max_iterations + 1); }
    };

    struct Estimate
    {
        std::string optimizer;
        Vec3 position;
        double final_cost = 0.0;
        std::uint64_t evaluations_used = 0;
        double wall_time = 0.0; // s
        std::vector<double> trace; // best cost after each iteration / generation
        std::uint64_t seed = 0;
        std::string note; // non-fatal conditions, e.g. a fallback path taken
    };

    // Cells of a raster over the search region flagged as problematic
    class RegionMask
    {
    public:
        RegionMask() = default;
        RegionMask(const SearchRegion &region, double cell_size);

        double origin_x() const { return origin_x_; }
        double origin_y() const { return origin_y_; }
        double cell_size() const { return cell_size_; }
        std::size_t nx() const { return nx_; }
        std::size_t ny() const { return ny_; }

        bool at(std::size_t i, std::size_t j) const { return cells_[j * nx_ + i] != 0; }
        void set(std::size_t i, std::size_t j, bool v) { cells_[j * nx_ + i] = v ? 1 : 0; }
        std::size_t count() const;
        bool empty() const { return count() == 0; }

        // Cell index holding p, clamped to the raster
        std::pair<std::size_t, std::size_t> cell_of(const Vec2 &p) const;
        bool contains(const Vec2 &p) const;
        bool covers(const SearchRegion &region) const;

        // Uniform draw over the union of flagged cells clipped to region
        Vec2 sample(const SearchRegion &region, CounterStream &rng) const;

        std::string source;     // digest of the error map it was derived from
        double threshold = 0.0; // cm

        bool operator==(const RegionMask &) const = default;

        void write(std::ostream &out) const;
        static RegionMask read(std::istream &in);

    private:
        double origin_x_ = 0.0, origin_y_ = 0.0, cell_size_ = 1.0;
        std::size_t nx_ = 0, ny_ = 0;
        std::vector<std::uint8_t> cells_;
    };

    class BudgetError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    Estimate pso(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                 std::uint64_t seed);

    Estimate discrete_ga(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                         std::uint64_t seed);

    Estimate a_priori_guided_pso(const Objective &objective, const SearchRegion &region, const RegionMask &mask,
                                 const OptimizerParams &params, std::uint64_t seed);

    Estimate ga_pso_hybrid(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                           std::uint64_t seed);

    Estimate gradient_baseline(const Objective &objective, const SearchRegion &region, const OptimizerParams &params,
                               std::uint64_t seed);

    // Square of the given area centred on c, intersected with region
    SearchRegion confined_square(const SearchRegion &region, const Vec2 &c, double area);

    enum class OptimizerKind
    {
        pso,
        ga,
        apso,
        hybrid,
        gradient
    };

    std::string_view optimizer_name(OptimizerKind kind);
    std::optional<OptimizerKind> parse_optimizer(std::string_view name);
    const std::vector<OptimizerKind> &all_optimizers();
    std::string optimizer_names(); // comma-separated list of valid names

    // Dispatch; a mask is required for apso
    Estimate run_optimizer(OptimizerKind kind, const Objective &objective, const SearchRegion &region,
                           const OptimizerParams &params, std::uint64_t seed, const RegionMask *mask = nullptr);
}

#endif
