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

// risloc command line: estimate, sweep, regions, report

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "risloc/harness.hpp"

namespace fs = std::filesystem;
using namespace risloc;

namespace
{
    // Raised for invalid input; maps to exit status 2
    struct UsageError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct Manifest
    {
        std::string config_path;
        std::string out_dir = ".";
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> workers;
        std::string optimizers;
    };

    struct Loaded
    {
        KeyValueFile file;
        ScenarioConfig scenario;
        OptimizerParams params;
    };

    Loaded load_config(const Manifest &m)
    {
        Loaded l;
        if (!m.config_path.empty())
        {
            if (!fs::exists(m.config_path))
                throw UsageError("config file '" + m.config_path + "' not found");
            l.file = KeyValueFile::load(m.config_path);
        }
        l.scenario = scenario_from_config(l.file);
        if (m.seed)
            l.scenario.master_seed = *m.seed;
        l.params = OptimizerParams::from_config(l.file);

        std::ostringstream problems;
        for (const auto &v : validate_scenario(l.scenario))
            problems << "\n  " << v.field << ": " << v.message;
        for (const auto &v : l.params.violations())
            problems << "\n  optim: " << v;
        if (!problems.str().empty())
            throw UsageError("invalid configuration" + problems.str());
        return l;
    }

    std::vector<OptimizerKind> parse_list(const std::string &list)
    {
        std::vector<OptimizerKind> kinds;
        for (const auto &name : split(list, ','))
        {
            const auto k = parse_optimizer(trim(name));
            if (!k)
                throw UsageError("unknown optimizer '" + trim(name) + "'; valid names: " + optimizer_names());
            kinds.push_back(*k);
        }
        if (kinds.empty())
            throw UsageError("no optimizer given; valid names: " + optimizer_names());
        return kinds;
    }

    GridDims parse_resolution(const std::string &text)
    {
        const auto x = text.find('x');
        if (x == std::string::npos)
            throw UsageError("resolution must read NXxNY, got '" + text + "'");
        GridDims d{parse_u64(text.substr(0, x), "resolution"), parse_u64(text.substr(x + 1), "resolution")};
        if (d.nx == 0 || d.ny == 0)
            throw UsageError("resolution must be at least 1x1");
        return d;
    }

    void prepare_out_dir(const std::string &dir)
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        const fs::path probe = fs::path(dir) / ".risloc-write-test";
        std::ofstream out(probe);
        if (!out)
            throw UsageError("output directory '" + dir + "' is not writable");
        out.close();
        fs::remove(probe, ec);
    }

    std::size_t worker_count(const Manifest &m, const KeyValueFile &file)
    {
        if (m.workers)
            return std::max<std::size_t>(1, *m.workers);
        const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
        return std::max<std::size_t>(1, file.get_size("harness.workers", hw));
    }

    void banner(const std::string &cmd, const Manifest &m, const Loaded &l, std::size_t workers)
    {
        std::cerr << "risloc " << cmd << " | config " << (m.config_path.empty() ? "<built-in>" : m.config_path)
                  << " | scenario " << scenario_digest(l.scenario) << " | params " << l.params.digest()
                  << " | master seed " << l.scenario.master_seed << " | workers " << workers << "\n";
    }

    RegionMask load_mask(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw UsageError("cannot open mask file '" + path + "'");
        return RegionMask::read(in);
    }

    void write_file(const fs::path &path, const std::function<void(std::ostream &)> &body)
    {
        const fs::path tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out)
                throw HarnessError("cannot write '" + tmp.string() + "'");
            body(out);
            out.flush();
            if (!out)
                throw HarnessError("write to '" + tmp.string() + "' failed");
        }
        fs::rename(tmp, path);
    }

    int cmd_estimate(const Manifest &m, const std::string &ue_text, const std::string &mask_path)
    {
        const Loaded l = load_config(m);
        const auto kinds = parse_list(m.optimizers.empty() ? "hybrid" : m.optimizers);
        const auto v = parse_number_list(ue_text, "--ue");
        if (v.size() != 2 && v.size() != 3)
            throw UsageError("--ue expects x,y or x,y,z");
        const Vec3 ue{v[0], v[1], v.size() == 3 ? v[2] : l.scenario.search_region.z_fixed};
        if (!l.scenario.search_region.contains(ue))
            throw UsageError("--ue (" + format_double(ue.x) + ", " + format_double(ue.y) +
                             ") lies outside the search region");
        std::optional<RegionMask> mask;
        if (!mask_path.empty())
            mask = load_mask(mask_path);

        banner("estimate", m, l, 1);
        const auto tiles = build_ris_layout(l.scenario);
        if (m.out_dir != ".")
            prepare_out_dir(m.out_dir);
        for (auto kind : kinds)
        {
            if (kind == OptimizerKind::apso && !mask)
                throw UsageError("apso needs --mask FILE (see the regions subcommand)");
            const auto seeds = point_seeds(l.scenario.master_seed, "estimate", 0, kind);
            const auto r = run_estimate(l.scenario, tiles, kind, l.params, ue, seeds, mask ? &*mask : nullptr);
            std::ostringstream rec;
            rec << "optimizer = " << r.estimate.optimizer << "\n"
                << "seed = " << r.estimate.seed << "\n"
                << "ue_true = " << format_double(ue.x) << ", " << format_double(ue.y) << ", "
                << format_double(ue.z) << "\n"
                << "estimate = " << format_double(r.estimate.position.x) << ", "
                << format_double(r.estimate.position.y) << ", " << format_double(r.estimate.position.z) << "\n"
                << "error_cm = " << format_double(r.error_cm) << "\n"
                << "final_cost = " << format_double(r.estimate.final_cost) << "\n"
                << "evaluations = " << r.estimate.evaluations_used << "\n"
                << "wall_time_s = " << format_double(r.estimate.wall_time) << "\n";
            if (!r.estimate.note.empty())
                rec << "note = " << r.estimate.note << "\n";
            std::cout << rec.str() << std::flush;
            if (m.out_dir != ".")
                write_file(fs::path(m.out_dir) / ("estimate_" + r.estimate.optimizer + ".txt"),
                           [&](std::ostream &o) { o << rec.str(); });
        }
        return 0;
    }

    struct SweepFlags
    {
        std::string resolution;
        bool validate = false;
        std::string mask_path;
        bool pin_schedule = false;
        std::size_t limit = 0;
    };

    int cmd_sweep(const Manifest &m, const SweepFlags &f)
    {
        const Loaded l = load_config(m);
        const auto kinds = parse_list(m.optimizers.empty() ? "pso" : m.optimizers);
        const GridDims res =
            parse_resolution(f.resolution.empty() ? l.file.get_string("harness.resolution", "15x15") : f.resolution);
        const GridDims vres = l.file.has("harness.validation_resolution")
                                  ? parse_resolution(l.file.get("harness.validation_resolution"))
                                  : validation_resolution(res);
        std::optional<RegionMask> mask;
        if (!f.mask_path.empty())
        {
            mask = load_mask(f.mask_path);
            if (!mask->covers(l.scenario.search_region))
                throw UsageError("mask '" + f.mask_path + "' does not cover the search region");
        }
        for (auto k : kinds)
            if (k == OptimizerKind::apso && !mask)
                throw UsageError("apso needs --mask FILE (see the regions subcommand)");

        const std::size_t workers = worker_count(m, l.file);
        banner("sweep", m, l, workers);
        prepare_out_dir(m.out_dir);

        bool complete = true;
        for (auto kind : kinds)
            for (int pass = 0; pass < (f.validate ? 2 : 1); ++pass)
            {
                SweepSpec spec;
                spec.scenario = l.scenario;
                spec.optimizer = kind;
                spec.params = l.params;
                spec.resolution = pass == 0 ? res : vres;
                spec.pass = pass == 0 ? "primary" : "validation";
                spec.pin_schedule = f.pin_schedule || l.file.get_bool("harness.pin_schedule", false);
                spec.mask = mask ? &*mask : nullptr;

                const std::string name = std::string(optimizer_name(kind));
                const fs::path path =
                    fs::path(m.out_dir) / ("errormap_" + name + (pass == 0 ? "" : "_validation") + ".csv");
                SweepOptions opt;
                opt.workers = workers;
                opt.out_path = path.string();
                opt.max_new_records = f.limit;
                opt.progress = [&](std::size_t done, std::size_t total)
                { std::cerr << "\r" << name << " " << spec.pass << " " << done << "/" << total << std::flush; };
                const ErrorMap map = run_fingerprint(spec, opt);
                std::cerr << "\n";
                complete = complete && map.complete;
                std::cout << path.string() << ": " << map.records.size() << "/" << spec.resolution.count()
                          << " records" << (map.complete ? "" : " (in progress)") << "\n";
            }
        return complete ? 0 : 3;
    }

    int cmd_regions(const Manifest &m, const std::string &map_path, double threshold, double cell,
                    const std::string &output)
    {
        if (!(threshold > 0.0))
            throw UsageError("--threshold must be positive, got " + format_double(threshold));
        const ErrorMap map = ErrorMap::load(map_path);
        if (!map.complete)
            throw UsageError("'" + map_path + "' is still in progress; finish the sweep first");
        if (const auto v = map.violations(); !v.empty())
            throw UsageError("'" + map_path + "' is inconsistent: " + v.front());
        const RegionMask mask = derive_regions(map, threshold, cell);
        if (mask.empty())
            std::cerr << "warning: no cell exceeds " << format_double(threshold) << " cm; the mask is empty\n";
        const fs::path path = output.empty() ? fs::path(m.out_dir) / "regions.mask" : fs::path(output);
        if (path.has_parent_path())
            prepare_out_dir(path.parent_path().string());
        write_file(path, [&](std::ostream &o) { mask.write(o); });
        std::cout << path.string() << ": " << mask.count() << " of " << mask.nx() * mask.ny()
                  << " cells flagged\n";
        return 0;
    }

    int cmd_report(const Manifest &m, const std::vector<std::string> &files)
    {
        std::vector<ErrorMap> maps;
        for (const auto &p : files)
        {
            maps.push_back(ErrorMap::load(p));
            if (!maps.back().complete)
                throw UsageError("'" + p + "' is still in progress");
        }
        const auto pct = percentile_report(maps);
        const auto timing = timing_report(maps);
        prepare_out_dir(m.out_dir);
        write_file(fs::path(m.out_dir) / "percentiles.csv", [&](std::ostream &o) { pct.write_table(o); });
        write_file(fs::path(m.out_dir) / "percentile_curve.csv", [&](std::ostream &o) { pct.write_curve(o); });
        write_file(fs::path(m.out_dir) / "timing.csv", [&](std::ostream &o) { timing.write_table(o); });
        pct.write_table(std::cout);
        timing.write_table(std::cout);
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"RIS-aided NLoS indoor localization: estimators, fingerprint sweeps and reports"};
    app.require_subcommand(1);

    Manifest m;
    auto common = [&](CLI::App *sub)
    {
        sub->add_option("--config", m.config_path, "Scenario and optimizer config file");
        sub->add_option("--out", m.out_dir, "Output directory");
        sub->add_option("--seed", m.seed, "Master seed (overrides seed.master)");
        sub->add_option("--workers", m.workers, "Worker threads (default: available parallelism)");
        sub->add_option("--optimizer", m.optimizers, "Comma-separated list: " + optimizer_names());
    };

    auto *estimate = app.add_subcommand("estimate", "Estimate one position");
    common(estimate);
    std::string ue_text, est_mask;
    estimate->add_option("--ue", ue_text, "True position x,y[,z] in m")->required();
    estimate->add_option("--mask", est_mask, "Region mask for apso");

    auto *sweep = app.add_subcommand("sweep", "Fingerprint sweep over a grid of true positions");
    common(sweep);
    SweepFlags sf;
    sweep->add_option("--resolution", sf.resolution, "Grid NXxNY (default 15x15 or harness.resolution)");
    sweep->add_flag("--validate", sf.validate, "Add a lower-resolution validation pass");
    sweep->add_option("--mask", sf.mask_path, "Region mask for apso");
    sweep->add_flag("--pin-schedule", sf.pin_schedule, "Use one phase schedule for every grid point");
    sweep->add_option("--limit", sf.limit, "Stop after this many new points; rerun to resume");

    auto *regions = app.add_subcommand("regions", "Derive a problematic-region mask from an error map");
    common(regions);
    std::string map_path, mask_out;
    double threshold = 100.0, cell = 0.5;
    regions->add_option("map", map_path, "Error map file")->required();
    regions->add_option("--threshold", threshold, "Median error threshold [cm]");
    regions->add_option("--cell", cell, "Mask cell size [m]");
    regions->add_option("--output", mask_out, "Mask file (default <out>/regions.mask)");

    auto *report = app.add_subcommand("report", "Percentile and timing tables from error maps");
    common(report);
    std::vector<std::string> map_files;
    report->add_option("maps", map_files, "Error map files")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*estimate)
            return cmd_estimate(m, ue_text, est_mask);
        if (*sweep)
            return cmd_sweep(m, sf);
        if (*regions)
            return cmd_regions(m, map_path, threshold, cell, mask_out);
        if (*report)
            return cmd_report(m, map_files);
    }
    catch (const UsageError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
