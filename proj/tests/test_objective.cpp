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

#include <cmath>

#include "oracles.hpp"
#include "risloc/objective.hpp"
#include "risloc/random.hpp"

using namespace risloc;

namespace
{
    struct Instance
    {
        ScenarioConfig config;
        std::vector<RisTile> tiles;
        PilotObservations obs;
        Vec3 truth;
    };

    Instance make_instance(const Vec3 &ue, std::uint64_t seed, double noise_power = 0.0)
    {
        Instance in;
        in.config.noise.mode = NoiseMode::absolute;
        in.config.noise.power = noise_power;
        in.tiles = build_ris_layout(in.config);
        in.truth = ue;
        CounterStream r(derive_seed(seed, "offsets"));
        const OffsetParams off{r.uniform(0.0, 1e-7), r.uniform(-M_PI, M_PI)};
        const auto sched = generate_phase_schedule(in.tiles.size(), in.config.n_symbols, derive_seed(seed, "schedule"));
        in.obs = synthesize_observations(in.config, in.tiles, ue, sched, off, derive_seed(seed, "noise"));
        return in;
    }

    CostEvaluator evaluator(const Instance &in) { return CostEvaluator(in.config, in.tiles, in.obs); }
}

TEST_SUITE("objective")
{
    TEST_CASE("closed-form phase offset matches a dense grid")
    {
        CounterStream r(17);
        for (int trial = 0; trial < 20; ++trial)
        {
            std::vector<double> d(32), w(32);
            for (std::size_t t = 0; t < 32; ++t)
            {
                d[t] = r.uniform(-M_PI, M_PI);
                w[t] = r.uniform(0.0, 3.0);
            }
            const double phi = optimal_phase_offset(d, w);
            CHECK(phi > -M_PI / 2 - 1e-12);
            CHECK(phi <= M_PI / 2 + 1e-12);
            const double best = oracle::grid_min_cost(d, w, 1000000);
            const double got = oracle::offset_cost(d, w, phi);
            CHECK(got <= best + 1e-9);
            CHECK(got >= best - 1e-9);
        }
    }

    TEST_CASE("phase offset with a single symbol, equal residuals and zero weights")
    {
        const std::vector<double> one{1.2}, wone{2.0};
        CHECK(oracle::offset_cost(one, wone, optimal_phase_offset(one, wone)) < 1e-28);

        const std::vector<double> same(10, -0.4), w(10, 1.0);
        CHECK(optimal_phase_offset(same, w) == doctest::Approx(-0.4).epsilon(1e-12));

        // pi-shifted residuals are indistinguishable under sin^2
        const std::vector<double> flip{0.3, 0.3 + M_PI, 0.3 - M_PI};
        CHECK(oracle::offset_cost(flip, {1, 1, 1}, optimal_phase_offset(flip, std::vector<double>{1, 1, 1})) < 1e-28);

        const std::vector<double> zero(10, 0.0);
        CHECK_THROWS_AS(optimal_phase_offset(same, zero), DomainError);
    }

    TEST_CASE("noiseless cost vanishes at the true position")
    {
        for (std::uint64_t s = 0; s < 10; ++s)
        {
            CounterStream r(derive_seed(s, "ue"));
            const Vec3 ue{r.uniform(-4.0, 4.0), r.uniform(1.0, 10.0), 1.0};
            const auto in = make_instance(ue, s);
            const auto f = evaluator(in);
            CHECK(f.cost(ue) <= 1e-12 * f.total_weight());
        }
    }

    TEST_CASE("cost matches a direct computation away from the truth")
    {
        const auto in = make_instance({2, 6, 1}, 4);
        const auto f = evaluator(in);
        for (const Vec3 p : {Vec3{-3, 2, 1}, Vec3{0.5, 9.7, 1}, Vec3{2.1, 6.0, 1}})
        {
            const double ref = oracle::localization_cost(in.config, in.tiles, in.obs, p, 200000);
            const double got = f.cost(p);
            CHECK(got <= ref + 1e-9 * f.total_weight());
            // Grid resolution pi / 2e5 limits how far below ref the exact minimum can be
            CHECK(got >= ref - 1e-8 * f.total_weight());
        }
    }

    TEST_CASE("coarse lattice minimum sits next to the truth")
    {
        const Vec3 ue{2, 6, 1};
        const auto in = make_instance(ue, 8);
        const auto f = evaluator(in);
        double best = INFINITY;
        Vec3 arg{};
        for (int i = 0; i <= 16; ++i)
            for (int j = 0; j <= 18; ++j)
            {
                const Vec3 p{-4.0 + 0.5 * i, 1.0 + 0.5 * j, 1.0};
                const double v = f.cost(p);
                if (v < best)
                {
                    best = v;
                    arg = p;
                }
            }
        CHECK(distance(arg, ue) < 1e-9);
    }

    TEST_CASE("one symbol gives zero cost everywhere")
    {
        Instance in;
        in.config.noise.mode = NoiseMode::absolute;
        in.config.noise.power = 0.0;
        in.config.n_symbols = 1;
        in.tiles = build_ris_layout(in.config);
        const auto sched = generate_phase_schedule(100, 1, 3);
        in.obs = synthesize_observations(in.config, in.tiles, {1, 1, 1}, sched, {}, 0);
        const auto f = evaluator(in);
        CHECK(f.cost({-3, 7, 1}) < 1e-20 * f.total_weight());
        CHECK(f.cost({3, 2, 1}) < 1e-20 * f.total_weight());
    }

    TEST_CASE("explicit-offset cost: optimum, pi periodicity, and bound")
    {
        const auto in = make_instance({-1, 4, 1}, 12);
        const auto f = evaluator(in);
        const Vec3 p{0.7, 3.1, 1};
        const auto d = f.residuals(p);
        const double phi = optimal_phase_offset(d, f.weights());
        CHECK(f.cost(p) == doctest::Approx(f.cost_with_offset(p, phi)).epsilon(1e-12));
        CHECK(f.cost_with_offset(p, 0.4) == doctest::Approx(f.cost_with_offset(p, 0.4 + M_PI)).epsilon(1e-12));
        CHECK(f.cost_with_offset(p, 0.4) >= f.cost(p));
        CHECK(f.cost(p) <= f.total_weight());
        CHECK(f.cost_with_offset(in.truth, in.obs.phase_offset_eff) < 1e-12 * f.total_weight());
    }

    TEST_CASE("weights and scaling")
    {
        const auto a = make_instance({1, 5, 1}, 20, 1e-12);
        const auto f = evaluator(a);
        for (std::size_t t = 0; t < a.obs.n_symbols(); ++t)
            CHECK(f.weights()[t] == doctest::Approx(a.obs.amplitude[t] * a.obs.amplitude[t] / 1e-12));

        // Scaling every amplitude and sigma^2 consistently leaves the cost unchanged
        Instance b = a;
        for (auto &v : b.obs.amplitude)
            v *= 10.0;
        b.obs.noise_power *= 100.0;
        const auto g = evaluator(b);
        for (const Vec3 p : {Vec3{-2, 2, 1}, Vec3{3, 8, 1}})
            CHECK(g.cost(p) == doctest::Approx(f.cost(p)).epsilon(1e-12));
    }

    TEST_CASE("evaluation tally counts cost and operator() calls only")
    {
        const auto in = make_instance({0, 5, 1}, 1);
        const auto f = evaluator(in);
        CHECK(f.evaluations() == 0);
        f.cost({1, 1, 1});
        f({2.0, 2.0});
        CHECK(f.evaluations() == 2);
        f.cost_with_offset({1, 1, 1}, 0.1);
        f.residuals({1, 1, 1});
        CHECK(f.evaluations() == 2);
        numeric_gradient(f, {1.0, 1.0}, 1e-4);
        CHECK(f.evaluations() == 6);
    }

    TEST_CASE("planar evaluation lifts to z_fixed")
    {
        auto in = make_instance({0, 5, 1}, 2);
        const auto f = evaluator(in);
        CHECK(f({0.3, 4.2}) == f.cost({0.3, 4.2, 1.0}));
    }

    TEST_CASE("numeric gradient: exact on quadratics, Richardson on smooth functions")
    {
        const FunctionObjective q([](const Vec2 &p) { return 3 * p.x * p.x - 2 * p.x * p.y + p.y * p.y + p.x; });
        const auto g = numeric_gradient(q, {0.5, -1.0}, 1e-3);
        CHECK(g[0] == doctest::Approx(6 * 0.5 + 2 + 1).epsilon(1e-9));
        CHECK(g[1] == doctest::Approx(-1.0 - 2.0).epsilon(1e-9));

        const FunctionObjective s([](const Vec2 &p) { return std::sin(p.x) * std::exp(0.3 * p.y); });
        const Vec2 p{0.7, 0.2};
        const double exact = std::cos(p.x) * std::exp(0.3 * p.y);
        const double e1 = std::abs(numeric_gradient(s, p, 1e-2)[0] - exact);
        const double e2 = std::abs(numeric_gradient(s, p, 5e-3)[0] - exact);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

        CHECK_THROWS_AS(numeric_gradient(s, p, 1e-13), std::invalid_argument);
        CHECK_THROWS_AS(numeric_gradient(s, p, 0.0), std::invalid_argument);
    }
}
