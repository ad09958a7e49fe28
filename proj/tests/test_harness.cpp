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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "risloc/harness.hpp"

using namespace risloc;
namespace fs = std::filesystem;

namespace
{
    ScenarioConfig noiseless()
    {
        ScenarioConfig c;
        c.noise.mode = NoiseMode::absolute;
        c.noise.power = 0.0;
        return c;
    }

    SweepSpec small_sweep(std::uint64_t master = 3)
    {
        SweepSpec s;
        s.scenario = noiseless();
        s.scenario.master_seed = master;
        s.params.swarm_size = 40;
        s.params.max_iterations = 15;
        s.params.keep_trace = false;
        s.resolution = {3, 3};
        return s;
    }

    fs::path scratch(const std::string &name)
    {
        const auto dir = fs::temp_directory_path() / "risloc-tests";
        fs::create_directories(dir);
        const auto p = dir / name;
        fs::remove(p);
        return p;
    }

    // Synthetic map over the default region, one record per 0.5 m cell
    ErrorMap planted(const std::function<double(const Vec3 &)> &error_cm, const std::string &optimizer = "pso")
    {
        ErrorMap m;
        m.scenario_digest = "feedface";
        m.optimizer = optimizer;
        m.params_digest = "0";
        m.region = ScenarioConfig{}.search_region;
        m.resolution = {16, 18};
        for (const auto &p : sample_grid(m.region, m.resolution))
        {
            ErrorRecord r;
            r.truth = {p.x, p.y};
            r.estimate = r.truth;
            r.error_cm = error_cm(p);
            m.records.push_back(r);
        }
        return m;
    }
}

TEST_SUITE("harness")
{
    TEST_CASE("hybrid localizes a noiseless point to well under a millimetre")
    {
        const auto c = noiseless();
        const auto tiles = build_ris_layout(c);
        const auto seeds = point_seeds(1, "estimate", 0, OptimizerKind::hybrid);
        OptimizerParams p;
        p.keep_trace = false;
        const auto r = run_estimate(c, tiles, OptimizerKind::hybrid, p, {0.0, 6.0, 1.0}, seeds);
        CHECK(r.error_cm < 0.1);
        CHECK(r.truth.z == c.search_region.z_fixed);
    }

    TEST_CASE("run_estimate rejects points outside the region and is reproducible")
    {
        const auto c = noiseless();
        const auto tiles = build_ris_layout(c);
        OptimizerParams p;
        p.swarm_size = 30;
        p.max_iterations = 10;
        const auto seeds = point_seeds(2, "estimate", 0, OptimizerKind::pso);
        CHECK_THROWS_AS(run_estimate(c, tiles, OptimizerKind::pso, p, {4.5, 5.0, 1.0}, seeds), std::invalid_argument);
        const auto a = run_estimate(c, tiles, OptimizerKind::pso, p, {1.0, 5.0, 1.0}, seeds);
        const auto b = run_estimate(c, tiles, OptimizerKind::pso, p, {1.0, 5.0, 1.0}, seeds);
        CHECK(a.estimate.position == b.estimate.position);
        CHECK(a.error_cm == b.error_cm);
    }

    TEST_CASE("seed derivation separates points, passes and optimizer families")
    {
        const auto a = point_seeds(7, "primary", 0, OptimizerKind::pso);
        const auto b = point_seeds(7, "primary", 1, OptimizerKind::pso);
        const auto g = point_seeds(7, "primary", 0, OptimizerKind::ga);
        const auto v = point_seeds(7, "validation", 0, OptimizerKind::pso);
        const auto q = point_seeds(7, "primary", 0, OptimizerKind::apso);
        CHECK(a.schedule != b.schedule);
        CHECK(a.noise == g.noise);
        CHECK(a.schedule == g.schedule);
        CHECK(a.optimizer != g.optimizer);
        CHECK(a.optimizer == q.optimizer);
        CHECK(a.noise != v.noise);
        CHECK(point_seeds(7, "primary", 0, OptimizerKind::pso, true).schedule ==
              point_seeds(7, "primary", 5, OptimizerKind::pso, true).schedule);
        const auto off = draw_offsets(a.offsets);
        CHECK(off.clock_offset >= 0.0);
        CHECK(off.clock_offset < 100e-9);
        CHECK(std::abs(off.phase_offset) <= M_PI);
    }

    TEST_CASE("sweep: complete map is consistent and independent of worker count")
    {
        const auto spec = small_sweep();
        SweepOptions one;
        one.workers = 1;
        SweepOptions four;
        four.workers = 4;
        const auto a = run_fingerprint(spec, one);
        const auto b = run_fingerprint(spec, four);
        CHECK(a.complete);
        CHECK(a.records.size() == 9);
        CHECK(a.violations().empty());
        CHECK(a.content_digest() == b.content_digest());
        CHECK(a.optimizer == "pso");
        CHECK(a.scenario_digest == scenario_digest(spec.scenario));

        const auto other = run_fingerprint(small_sweep(4), one);
        CHECK(other.content_digest() != a.content_digest());
    }

    TEST_CASE("sweep: interrupted run resumes to the same map")
    {
        const auto spec = small_sweep();
        const auto path = scratch("resume.csv");
        SweepOptions o;
        o.workers = 2;
        o.out_path = path.string();
        o.max_new_records = 5;
        const auto partial = run_fingerprint(spec, o);
        CHECK_FALSE(partial.complete);
        CHECK(partial.records.size() == 5);
        const auto on_disk = ErrorMap::load(path.string());
        CHECK_FALSE(on_disk.complete);
        CHECK(on_disk.records.size() == 5);

        o.max_new_records = 0;
        const auto resumed = run_fingerprint(spec, o);
        CHECK(resumed.complete);
        CHECK(resumed.content_digest() == run_fingerprint(spec, SweepOptions{}).content_digest());
        CHECK(ErrorMap::load(path.string()).content_digest() == resumed.content_digest());

        // A different sweep must not reuse the file
        auto other = spec;
        other.scenario.master_seed = 99;
        CHECK_THROWS_AS(run_fingerprint(other, o), HarnessError);
        auto coarser = spec;
        coarser.params.swarm_size = 41;
        CHECK_THROWS_AS(run_fingerprint(coarser, o), HarnessError);
    }

    TEST_CASE("sweep: a truncated journal row is dropped on resume")
    {
        const auto spec = small_sweep();
        const auto path = scratch("truncated.csv");
        SweepOptions o;
        o.workers = 1;
        o.out_path = path.string();
        o.max_new_records = 4;
        run_fingerprint(spec, o);
        {
            std::ofstream f(path, std::ios::app);
            f << "0.1,0.2,0.3";
        }
        o.max_new_records = 0;
        const auto done = run_fingerprint(spec, o);
        CHECK(done.complete);
        CHECK(done.violations().empty());
        CHECK(done.content_digest() == run_fingerprint(spec, SweepOptions{}).content_digest());
    }

    TEST_CASE("sweep refuses an apso run without a mask and invalid params")
    {
        auto spec = small_sweep();
        spec.optimizer = OptimizerKind::apso;
        CHECK_THROWS(run_fingerprint(spec));
        spec = small_sweep();
        spec.params.swarm_size = 0;
        CHECK_THROWS(run_fingerprint(spec));
    }

    TEST_CASE("error map file round trip")
    {
        const auto spec = small_sweep();
        const auto m = run_fingerprint(spec);
        std::stringstream s;
        m.write(s);
        const auto back = ErrorMap::read(s);
        CHECK(back.content_digest() == m.content_digest());
        CHECK(back.records.size() == m.records.size());
        CHECK(back.records[4].wall_time == m.records[4].wall_time);
        CHECK(back.resolution.nx == 3);
        CHECK(back.params.get("optim.swarm_size") == "40");

        auto broken = m;
        broken.records[2].error_cm += 5.0;
        CHECK_FALSE(broken.violations().empty());
        CHECK(validation_resolution({15, 15}).nx == 8);
        CHECK(validation_resolution({7, 4}).ny == 2);
    }

    TEST_CASE("nearest-rank percentiles")
    {
        std::vector<double> v(100);
        std::iota(v.begin(), v.end(), 1.0);
        std::reverse(v.begin(), v.end());
        CHECK(nearest_rank(v, 50) == 50);
        CHECK(nearest_rank(v, 75) == 75);
        CHECK(nearest_rank(v, 85) == 85);
        CHECK(nearest_rank(v, 90) == 90);
        CHECK(nearest_rank(v, 0) == 1);
        CHECK(nearest_rank(v, 100) == 100);
        CHECK(nearest_rank({4.2}, 50) == 4.2);
        CHECK(nearest_rank({4.2}, 90) == 4.2);
    }

    TEST_CASE("percentile report pools by optimizer and checks its inputs")
    {
        const auto a = planted([](const Vec3 &p) { return p.x + 5.0; });
        const auto b = planted([](const Vec3 &p) { return p.y; }, "ga");
        const auto rep = percentile_report({a, b, a});
        REQUIRE(rep.rows.size() == 2);
        CHECK(rep.rows[0].method == "pso");
        CHECK(rep.rows[0].samples == 2 * a.records.size());
        CHECK(rep.rows[1].method == "ga");
        CHECK(rep.rows[0].curve.size() == 101);
        CHECK(std::is_sorted(rep.rows[0].curve.begin(), rep.rows[0].curve.end()));
        CHECK(rep.rows[0].p50 <= rep.rows[0].p75);
        CHECK(rep.rows[0].p85 <= rep.rows[0].p90);
        std::stringstream s;
        rep.write_table(s);
        CHECK(s.str().find("\nmethod,samples,p50_cm,p75_cm,p85_cm,p90_cm\npso,") != std::string::npos);

        CHECK_THROWS_AS(percentile_report({}), HarnessError);
        auto empty = a;
        empty.records.clear();
        CHECK_THROWS_AS(percentile_report({empty}), HarnessError);
        auto foreign = b;
        foreign.scenario_digest = "cafebabe";
        CHECK_THROWS_AS(percentile_report({a, foreign}), HarnessError);
    }

    TEST_CASE("timing report relates each method to PSO")
    {
        auto a = planted([](const Vec3 &) { return 1.0; });
        auto b = planted([](const Vec3 &) { return 1.0; }, "ga");
        for (auto &r : a.records)
        {
            r.wall_time = 2.0;
            r.evaluations = 100;
        }
        for (auto &r : b.records)
        {
            r.wall_time = 3.0;
            r.evaluations = 400;
        }
        const auto t = timing_report({a, b});
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[0].wall_ratio == doctest::Approx(1.0));
        CHECK(t.rows[1].median_wall == doctest::Approx(3.0));
        CHECK(t.rows[1].wall_ratio == doctest::Approx(1.5));
        CHECK(t.rows[1].evaluation_ratio == doctest::Approx(4.0));
    }

    TEST_CASE("problematic regions: planted band, empty map, idempotence")
    {
        const auto band = planted([](const Vec3 &p) { return p.x > 0.0 && p.x < 1.0 ? 400.0 : 0.01; });
        const auto mask = derive_regions(band, 100.0, 0.5);
        CHECK(mask.covers(band.region));
        CHECK(mask.count() == 2 * 18);
        for (std::size_t j = 0; j < mask.ny(); ++j)
            for (std::size_t i = 0; i < mask.nx(); ++i)
                CHECK(mask.at(i, j) == (i == 8 || i == 9));
        CHECK(mask.source == band.content_digest());
        CHECK(mask.threshold == 100.0);
        CHECK(derive_regions(band, 100.0, 0.5) == mask);

        const auto clean = planted([](const Vec3 &) { return 0.0; });
        CHECK(derive_regions(clean, 100.0, 0.5).empty());
        CHECK_THROWS_AS(derive_regions(clean, 0.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(derive_regions(clean, -3.0, 0.5), std::invalid_argument);

        // An isolated hole inside a flagged block is filled by the closing
        const auto holed = planted([](const Vec3 &p)
                                   { return (p.x > -2 && p.x < -0.5 && p.y > 3 && p.y < 4.5 &&
                                             !(p.x > -1.5 && p.x < -1.0 && p.y > 3.5 && p.y < 4.0))
                                                ? 400.0
                                                : 0.0; });
        CHECK(raw_regions(holed, 100.0, 0.5).count() == 8);
        CHECK(derive_regions(holed, 100.0, 0.5).count() == 9);
    }
}
