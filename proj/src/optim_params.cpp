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

#include <array>

#include "risloc/optim.hpp"

namespace risloc
{
    OptimizerParams OptimizerParams::from_config(const KeyValueFile &kv)
    {
        OptimizerParams p;
        p.swarm_size = kv.get_size("optim.swarm_size", p.swarm_size);
        p.inertia = kv.get_double("optim.inertia", p.inertia);
        p.cognitive = kv.get_double("optim.cognitive", p.cognitive);
        p.social = kv.get_double("optim.social", p.social);
        p.max_iterations = kv.get_size("optim.max_iterations", p.max_iterations);
        p.fitness_stall_tolerance = kv.get_double("optim.fitness_stall_tolerance", p.fitness_stall_tolerance);
        p.stall_iterations = kv.get_size("optim.stall_iterations", p.stall_iterations);
        p.population_size = kv.get_size("optim.population_size", p.population_size);
        p.max_generations = kv.get_size("optim.max_generations", p.max_generations);
        p.tournament_size = kv.get_size("optim.tournament_size", p.tournament_size);
        p.crossover_rate = kv.get_double("optim.crossover_rate", p.crossover_rate);
        p.mutation_rate = kv.get_double("optim.mutation_rate", p.mutation_rate);
        p.mutation_window = kv.get_double("optim.mutation_window_m", p.mutation_window);
        p.elitism = kv.get_size("optim.elitism", p.elitism);
        if (kv.has("optim.ga_grid_step_m"))
        {
            const auto v = parse_number_list(kv.get("optim.ga_grid_step_m"), "optim.ga_grid_step_m");
            if (v.size() != 2)
                throw ConfigError("optim.ga_grid_step_m: expected x_step, y_step");
            p.ga_x_step = v[0];
            p.ga_y_step = v[1];
        }
        p.hybrid_area = kv.get_double("optim.hybrid_area_m2", p.hybrid_area);
        p.hybrid_swarm_size = kv.get_size("optim.hybrid_swarm_size", p.hybrid_swarm_size);
        p.apriori_threshold = kv.get_double("optim.apriori_threshold", p.apriori_threshold);
        p.gradient_starts = kv.get_size("optim.gradient_starts", p.gradient_starts);
        p.gradient_step = kv.get_double("optim.gradient_step_m", p.gradient_step);
        p.line_search_step = kv.get_double("optim.line_search_step_m", p.line_search_step);
        p.line_search_min_step = kv.get_double("optim.line_search_min_step_m", p.line_search_min_step);
        p.eval_budget = kv.get_u64("optim.eval_budget", p.eval_budget);
        p.keep_trace = kv.get_bool("optim.keep_trace", p.keep_trace);
        return p;
    }

    KeyValueFile OptimizerParams::to_config() const
    {
        KeyValueFile kv;
        kv.set("optim.swarm_size", std::to_string(swarm_size));
        kv.set("optim.inertia", format_double(inertia));
        kv.set("optim.cognitive", format_double(cognitive));
        kv.set("optim.social", format_double(social));
        kv.set("optim.max_iterations", std::to_string(max_iterations));
        kv.set("optim.fitness_stall_tolerance", format_double(fitness_stall_tolerance));
        kv.set("optim.stall_iterations", std::to_string(stall_iterations));
        kv.set("optim.population_size", std::to_string(population_size));
        kv.set("optim.max_generations", std::to_string(max_generations));
        kv.set("optim.tournament_size", std::to_string(tournament_size));
        kv.set("optim.crossover_rate", format_double(crossover_rate));
        kv.set("optim.mutation_rate", format_double(mutation_rate));
        kv.set("optim.mutation_window_m", format_double(mutation_window));
        kv.set("optim.elitism", std::to_string(elitism));
        kv.set("optim.ga_grid_step_m", format_double(ga_x_step) + ", " + format_double(ga_y_step));
        kv.set("optim.hybrid_area_m2", format_double(hybrid_area));
        kv.set("optim.hybrid_swarm_size", std::to_string(hybrid_swarm_size));
        kv.set("optim.apriori_threshold", format_double(apriori_threshold));
        kv.set("optim.gradient_starts", std::to_string(gradient_starts));
        kv.set("optim.gradient_step_m", format_double(gradient_step));
        kv.set("optim.line_search_step_m", format_double(line_search_step));
        kv.set("optim.line_search_min_step_m", format_double(line_search_min_step));
        kv.set("optim.eval_budget", std::to_string(eval_budget));
        return kv;
    }

    std::string OptimizerParams::digest() const { return digest_hex(to_config().canonical()); }

    std::vector<std::string> OptimizerParams::violations() const
    {
        std::vector<std::string> v;
        const std::array<std::pair<const char *, std::size_t>, 8> counts{{{"swarm_size", swarm_size},
                                                                          {"max_iterations", max_iterations},
                                                                          {"stall_iterations", stall_iterations},
                                                                          {"population_size", population_size},
                                                                          {"max_generations", max_generations},
                                                                          {"tournament_size", tournament_size},
                                                                          {"hybrid_swarm_size", hybrid_swarm_size},
                                                                          {"gradient_starts", gradient_starts}}};
        for (const auto &[name, value] : counts)
            if (value < 1)
                v.push_back(std::string(name) + " must be at least 1");
        if (!(fitness_stall_tolerance > 0.0))
            v.push_back("fitness_stall_tolerance must be positive");
        if (!(ga_x_step > 0.0) || !(ga_y_step > 0.0))
            v.push_back("ga_grid_step must be positive");
        if (!(mutation_window > 0.0))
            v.push_back("mutation_window must be positive");
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
            v.push_back("crossover_rate must lie in [0, 1]");
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
            v.push_back("mutation_rate must lie in [0, 1]");
        if (!(hybrid_area > 0.0))
            v.push_back("hybrid_area must be positive");
        if (!(apriori_threshold >= 0.0))
            v.push_back("apriori_threshold must be non-negative");
        if (!(gradient_step >= 1e-12))
            v.push_back("gradient_step must be at least 1e-12 m");
        if (!(line_search_step > 0.0) || !(line_search_min_step > 0.0))
            v.push_back("line search steps must be positive");
        return v;
    }

    std::string_view optimizer_name(OptimizerKind kind)
    {
        switch (kind)
        {
        case OptimizerKind::pso:
            return "pso";
        case OptimizerKind::ga:
            return "ga";
        case OptimizerKind::apso:
            return "apso";
        case OptimizerKind::hybrid:
            return "hybrid";
        case OptimizerKind::gradient:
            return "gradient";
        }
        return "unknown";
    }

    const std::vector<OptimizerKind> &all_optimizers()
    {
        static const std::vector<OptimizerKind> kinds{OptimizerKind::pso, OptimizerKind::ga, OptimizerKind::apso,
                                                      OptimizerKind::hybrid, OptimizerKind::gradient};
        return kinds;
    }

    std::optional<OptimizerKind> parse_optimizer(std::string_view name)
    {
        for (auto kind : all_optimizers())
            if (optimizer_name(kind) == name)
                return kind;
        return std::nullopt;
    }

    std::string optimizer_names()
    {
        std::string out;
        for (auto kind : all_optimizers())
            out += (out.empty() ? "" : ", ") + std::string(optimizer_name(kind));
        return out;
    }

    Estimate run_optimizer(OptimizerKind kind, const Objective &objective, const SearchRegion &region,
                           const OptimizerParams &params, std::uint64_t seed, const RegionMask *mask)
    {
        switch (kind)
        {
        case OptimizerKind::pso:
            return pso(objective, region, params, seed);
        case OptimizerKind::ga:
            return discrete_ga(objective, region, params, seed);
        case OptimizerKind::apso:
            if (mask == nullptr)
                throw std::invalid_argument("apso requires a region mask");
            return a_priori_guided_pso(objective, region, *mask, params, seed);
        case OptimizerKind::hybrid:
            return ga_pso_hybrid(objective, region, params, seed);
        case OptimizerKind::gradient:
            return gradient_baseline(objective, region, params, seed);
        }
        throw std::invalid_argument("unknown optimizer");
    }
}
