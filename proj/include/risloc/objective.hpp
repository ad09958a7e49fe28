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

#ifndef RISLOC_OBJECTIVE_HPP
#define RISLOC_OBJECTIVE_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "channel.hpp"
#include "scene.hpp"

namespace risloc
{
    // Cost over the 2-D search plane with an evaluation tally.
    // Every optimizer budget is expressed in calls to operator().
    class Objective
    {
    public:
        virtual ~Objective() = default;

        double operator()(const Vec2 &p) const
        {
            tally();
            return evaluate(p);
        }

        std::uint64_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }

        // Natural cost scale; thresholds given as fractions are multiplied by this
        virtual double cost_scale() const { return 1.0; }

    protected:
        virtual double evaluate(const Vec2 &p) const = 0;
        void tally() const { evaluations_.fetch_add(1, std::memory_order_relaxed); }

    private:
        mutable std::atomic<std::uint64_t> evaluations_{0};
    };

    // Wraps an arbitrary function; used for synthetic test landscapes
    class FunctionObjective final : public Objective
    {
    public:
        explicit FunctionObjective(std::function<double(const Vec2 &)> f, double scale = 1.0)
            : f_(std::move(f)), scale_(scale) {}
        double cost_scale() const override { return scale_; }

    protected:
        double evaluate(const Vec2 &p) const override { return f_(p); }

    private:
        std::function<double(const Vec2 &)> f_;
        double scale_;
    };

    // phi0* = arg min over phi0 of sum_t w_t sin^2(residual_t - phi0), in (-pi/2, pi/2].
    // Throws DomainError("degenerate observation") when no weight is positive.
    double optimal_phase_offset(std::span<const double> residuals, std::span<const double> weights);

    // Direct-positioning cost for one set of pilot observations.
    // Candidates in the search plane are lifted to z = z_fixed.
    class CostEvaluator final : public Objective
    {
    public:
        CostEvaluator(const ScenarioConfig &config, std::vector<RisTile> tiles, PilotObservations observations);

        const ScenarioConfig &config() const { return config_; }
        const std::vector<RisTile> &tiles() const { return tiles_; }
        const PilotObservations &observations() const { return obs_; }
        std::span<const double> weights() const { return weights_; }
        double total_weight() const { return total_weight_; }
        double cost_scale() const override { return total_weight_; }

        // phi_t(p): phase of the schedule-weighted tile sum at zero offsets
        std::vector<double> model_phases(const Vec3 &p) const;
        // phi~_t - phi_t(p), wrapped
        std::vector<double> residuals(const Vec3 &p) const;

        // Cost with phi0 eliminated in closed form; counts as an evaluation
        double cost(const Vec3 &p) const;
        // Literal sum with an explicit phase offset; not counted
        double cost_with_offset(const Vec3 &p, double phase_offset) const;

    protected:
        double evaluate(const Vec2 &p) const override;

    private:
        // exp(j(phi~_t - phi_t(p))) per symbol
        void residual_phasors(const Vec3 &p, std::span<ChannelCoeff> out) const;
        double cost_unchecked(const Vec3 &p) const;

        ScenarioConfig config_;
        std::vector<RisTile> tiles_;
        PilotObservations obs_;
        std::vector<double> weights_;
        double total_weight_ = 0.0;
        double wavenumber_ = 0.0;
        double ue_leg_gain_ = 0.0;           // sqrt(G_R) * lambda / (4 pi)
        std::vector<ChannelCoeff> tx_leg_;   // per tile, zero offsets
        std::vector<double> signs_;          // K x T, row per tile
        std::vector<ChannelCoeff> observed_; // exp(j phi~_t)
    };

    // Central differences per axis. Throws std::invalid_argument when step < 1e-12 m.
    std::array<double, 2> numeric_gradient(const Objective &objective, const Vec2 &p, double step);
}

#endif
