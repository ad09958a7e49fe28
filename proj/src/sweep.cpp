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
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "risloc/harness.hpp"

namespace risloc
{
    std::string_view seed_family(OptimizerKind kind)
    {
        return kind == OptimizerKind::apso ? optimizer_name(OptimizerKind::pso) : optimizer_name(kind);
    }

    PointSeeds point_seeds(std::uint64_t master_seed, std::string_view pass, std::size_t index, OptimizerKind kind,
                           bool pin_schedule)
    {
        const std::uint64_t point = hash_combine(derive_seed(master_seed, pass), index);
        PointSeeds s;
        s.schedule = pin_schedule ? derive_seed(master_seed, "pinned-schedule") : derive_seed(point, "schedule");
        s.noise = derive_seed(point, "noise");
        s.offsets = derive_seed(point, "offsets");
        s.optimizer = derive_seed(point, seed_family(kind));
        return s;
    }

    OffsetParams draw_offsets(std::uint64_t seed)
    {
        CounterStream rng(seed);
        OffsetParams o;
        o.clock_offset = rng.uniform(0.0, 100e-9);
        o.phase_offset = rng.uniform(-M_PI, M_PI);
        return o;
    }

    double planar_error_cm(const Vec3 &estimate, const Vec3 &truth)
    {
        return 100.0 * std::hypot(estimate.x - truth.x, estimate.y - truth.y);
    }

    EstimateRecord run_estimate(const ScenarioConfig &config, const std::vector<RisTile> &tiles, OptimizerKind kind,
                                const OptimizerParams &params, const Vec3 &ue_true, const PointSeeds &seeds,
                                const RegionMask *mask)
    {
        if (!config.search_region.contains(ue_true))
            throw std::invalid_argument("run_estimate: ue_true (" + format_double(ue_true.x) + ", " +
                                        format_double(ue_true.y) + ") outside the search region");
        const Vec3 ue = config.search_region.lift({ue_true.x, ue_true.y});
        const auto schedule = generate_phase_schedule(tiles.size(), config.n_symbols, seeds.schedule);
        auto obs = synthesize_observations(config, tiles, ue, schedule, draw_offsets(seeds.offsets), seeds.noise);
        obs.schedule_seed = seeds.schedule;
        const CostEvaluator evaluator(config, tiles, std::move(obs));

        EstimateRecord r;
        r.truth = ue;
        r.estimate = run_optimizer(kind, evaluator, config.search_region, params, seeds.optimizer, mask);
        r.error_cm = planar_error_cm(r.estimate.position, ue);
        return r;
    }

    GridDims validation_resolution(GridDims primary)
    {
        return {std::max<std::size_t>(1, (primary.nx + 1) / 2), std::max<std::size_t>(1, (primary.ny + 1) / 2)};
    }

    namespace
    {
        ErrorMap empty_map(const SweepSpec &spec)
        {
            ErrorMap m;
            m.scenario_digest = scenario_digest(spec.scenario);
            m.optimizer = std::string(optimizer_name(spec.optimizer));
            m.params = spec.params.to_config();
            m.params_digest = spec.params.digest();
            m.master_seed = spec.scenario.master_seed;
            m.pass = spec.pass;
            m.resolution = spec.resolution;
            m.region = spec.scenario.search_region;
            m.pin_schedule = spec.pin_schedule;
            if (spec.mask != nullptr)
                m.mask_source = spec.mask->source.empty() ? "unnamed" : spec.mask->source;
            m.complete = false;
            return m;
        }

        // Names the first header field in which two maps differ
        std::optional<std::string> header_mismatch(const ErrorMap &a, const ErrorMap &b)
        {
            if (a.scenario_digest != b.scenario_digest)
                return "scenario digest " + a.scenario_digest + " vs " + b.scenario_digest;
            if (a.optimizer != b.optimizer)
                return "optimizer " + a.optimizer + " vs " + b.optimizer;
            if (a.params_digest != b.params_digest)
                return "params digest " + a.params_digest + " vs " + b.params_digest;
            if (a.master_seed != b.master_seed)
                return "master seed " + std::to_string(a.master_seed) + " vs " + std::to_string(b.master_seed);
            if (a.pass != b.pass)
                return "pass " + a.pass + " vs " + b.pass;
            if (a.resolution.nx != b.resolution.nx || a.resolution.ny != b.resolution.ny)
                return std::string("resolution");
            if (a.pin_schedule != b.pin_schedule)
                return std::string("pin_schedule");
            if (a.mask_source != b.mask_source)
                return "mask source " + a.mask_source + " vs " + b.mask_source;
            return std::nullopt;
        }

        ErrorRecord to_record(const EstimateRecord &e)
        {
            ErrorRecord r;
            r.truth = {e.truth.x, e.truth.y};
            r.estimate = {e.estimate.position.x, e.estimate.position.y};
            r.error_cm = e.error_cm;
            r.final_cost = e.estimate.final_cost;
            r.evaluations = e.estimate.evaluations_used;
            r.wall_time = e.estimate.wall_time;
            r.seed = e.estimate.seed;
            return r;
        }
    }

    ErrorMap run_fingerprint(const SweepSpec &spec, const SweepOptions &options)
    {
        if (const auto v = validate_scenario(spec.scenario); !v.empty())
            throw ConfigError("scenario: " + v.front().field + ": " + v.front().message);
        if (const auto v = spec.params.violations(); !v.empty())
            throw ConfigError("optimizer params: " + v.front());
        if (spec.optimizer == OptimizerKind::apso && spec.mask == nullptr)
            throw std::invalid_argument("run_fingerprint: apso requires a region mask");

        const auto tiles = build_ris_layout(spec.scenario);
        const auto grid = sample_grid(spec.scenario.search_region, spec.resolution);
        ErrorMap map = empty_map(spec);
        std::vector<std::optional<ErrorRecord>> slots(grid.size());

        // Resume from a partial file of the same sweep
        const bool to_file = !options.out_path.empty();
        if (to_file && std::filesystem::exists(options.out_path))
        {
            const ErrorMap old = ErrorMap::load(options.out_path);
            if (const auto why = header_mismatch(old, map))
                throw HarnessError("'" + options.out_path + "' holds a different sweep (" + *why + ")");
            std::map<std::pair<double, double>, std::size_t> where;
            for (std::size_t i = 0; i < grid.size(); ++i)
                where[{grid[i].x, grid[i].y}] = i;
            for (const auto &r : old.records)
            {
                const auto it = where.find({r.truth.x, r.truth.y});
                if (it == where.end())
                    throw HarnessError("'" + options.out_path + "' has a record off the sweep grid");
                slots[it->second] = r;
            }
        }

        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (!slots[i])
                todo.push_back(i);
        if (options.max_new_records != 0 && todo.size() > options.max_new_records)
            todo.resize(options.max_new_records);

        // Rewrite the partial file from the parsed records, then append
        std::ofstream journal;
        if (to_file && !todo.empty())
        {
            ErrorMap head = map;
            for (const auto &s : slots)
                if (s)
                    head.records.push_back(*s);
            {
                std::ofstream out(options.out_path + ".tmp", std::ios::trunc);
                if (!out)
                    throw HarnessError("cannot write '" + options.out_path + ".tmp'");
                head.write(out);
            }
            std::filesystem::rename(options.out_path + ".tmp", options.out_path);
            journal.open(options.out_path, std::ios::app);
            if (!journal)
                throw HarnessError("cannot append to '" + options.out_path + "'");
        }

        std::size_t workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
        workers = std::max<std::size_t>(1, std::min(workers, todo.size()));

        std::atomic<std::size_t> cursor{0};
        std::atomic<bool> stop{false};
        std::mutex lock;
        std::exception_ptr failure;
        std::size_t failed_index = 0;
        std::string failed_what;
        std::size_t done = static_cast<std::size_t>(
            std::count_if(slots.begin(), slots.end(), [](const auto &s) { return s.has_value(); }));

        auto work = [&]
        {
            while (!stop.load())
            {
                const std::size_t k = cursor.fetch_add(1);
                if (k >= todo.size())
                    return;
                const std::size_t i = todo[k];
                try
                {
                    const auto seeds = point_seeds(spec.scenario.master_seed, spec.pass, i, spec.optimizer,
                                                   spec.pin_schedule);
                    const auto rec = to_record(
                        run_estimate(spec.scenario, tiles, spec.optimizer, spec.params, grid[i], seeds, spec.mask));
                    std::lock_guard<std::mutex> g(lock);
                    slots[i] = rec;
                    if (journal.is_open())
                    {
                        ErrorMap::write_record(journal, rec);
                        journal.flush();
                    }
                    ++done;
                    if (options.progress)
                        options.progress(done, grid.size());
                }
                catch (const std::exception &e)
                {
                    std::lock_guard<std::mutex> g(lock);
                    if (!failure || i < failed_index)
                    {
                        failure = std::current_exception();
                        failed_index = i;
                        failed_what = e.what();
                    }
                    stop = true;
                    return;
                }
            }
        };

        if (workers == 1)
            work();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back(work);
            for (auto &t : pool)
                t.join();
        }
        if (journal.is_open())
            journal.close();

        if (failure)
            throw HarnessError("grid point " + std::to_string(failed_index) + " at (" +
                               format_double(grid[failed_index].x) + ", " + format_double(grid[failed_index].y) +
                               "): " + failed_what);

        for (const auto &s : slots)
            if (s)
                map.records.push_back(*s);
        map.complete = map.records.size() == grid.size();
        if (to_file && (map.complete || todo.empty()))
            map.save(options.out_path);
        return map;
    }
}
