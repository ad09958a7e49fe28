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

#include "risloc/objective.hpp"

#include <cmath>

namespace risloc
{
    namespace
    {
        // Half-angle of z folded into (-pi/2, pi/2]
        double half_angle(const ChannelCoeff &z)
        {
            if (z == ChannelCoeff(0.0, 0.0))
                return 0.0;
            double phi = 0.5 * std::atan2(z.imag(), z.real());
            if (phi <= -0.5 * M_PI)
                phi += M_PI;
            return phi;
        }
    }

    double optimal_phase_offset(std::span<const double> residuals, std::span<const double> weights)
    {
        if (residuals.size() != weights.size())
            throw std::invalid_argument("optimal_phase_offset: residuals and weights differ in length");
        ChannelCoeff z = 0.0;
        bool any_positive = false;
        for (std::size_t t = 0; t < residuals.size(); ++t)
        {
            if (weights[t] > 0.0)
                any_positive = true;
            z += weights[t] * std::polar(1.0, 2.0 * residuals[t]);
        }
        if (!any_positive)
            throw DomainError("degenerate observation");
        return half_angle(z);
    }

    CostEvaluator::CostEvaluator(const ScenarioConfig &config, std::vector<RisTile> tiles,
                                 PilotObservations observations)
        : config_(config), tiles_(std::move(tiles)), obs_(std::move(observations))
    {
        const std::size_t n_sym = obs_.n_symbols();
        const std::size_t n_tiles = tiles_.size();
        if (n_sym == 0 || obs_.phase.size() != n_sym)
            throw std::invalid_argument("CostEvaluator: malformed observations");
        if (obs_.schedule.n_symbols() != n_sym || obs_.schedule.n_tiles() != n_tiles)
            throw std::invalid_argument("CostEvaluator: schedule does not match observations and layout");

        weights_.resize(n_sym);
        for (std::size_t t = 0; t < n_sym; ++t)
        {
            const double a2 = obs_.amplitude[t] * obs_.amplitude[t];
            weights_[t] = obs_.noise_power > 0.0 ? a2 / obs_.noise_power : a2;
            if (!std::isfinite(weights_[t]) || weights_[t] < 0.0)
                throw DomainError("CostEvaluator: non-finite weight at symbol " + std::to_string(t + 1));
            total_weight_ += weights_[t];
        }
        if (!(total_weight_ > 0.0))
            throw DomainError("degenerate observation");

        wavenumber_ = config_.wavenumber();
        ue_leg_gain_ = std::sqrt(config_.rx_gain) * config_.wavelength() / (4.0 * M_PI);
        tx_leg_.reserve(n_tiles);
        for (const auto &tile : tiles_)
            tx_leg_.push_back(tx_tile_coeff(config_, tile, {}));

        signs_.resize(n_sym * n_tiles);
        for (std::size_t k = 0; k < n_tiles; ++k)
            for (std::size_t t = 0; t < n_sym; ++t)
                signs_[k * n_sym + t] = obs_.schedule.sign(k, t);

        observed_.reserve(n_sym);
        for (double phi : obs_.phase)
            observed_.push_back(std::polar(1.0, phi));
    }

    void CostEvaluator::residual_phasors(const Vec3 &p, std::span<ChannelCoeff> out) const
    {
        const std::size_t n_tiles = tiles_.size();
        const std::size_t n_sym = out.size();
        thread_local std::vector<double> dist, cos_arg, sin_arg, s_re, s_im;
        dist.resize(n_tiles);
        cos_arg.resize(n_tiles);
        sin_arg.resize(n_tiles);
        for (std::size_t k = 0; k < n_tiles; ++k)
        {
            dist[k] = distance(p, tiles_[k].center);
            if (!(dist[k] > 0.0))
                throw DomainError("candidate position coincides with tile " + std::to_string(tiles_[k].index));
        }
        {
            const double *__restrict d = dist.data();
            double *__restrict c = cos_arg.data();
            double *__restrict s = sin_arg.data();
            const double wn = wavenumber_;
            for (std::size_t k = 0; k < n_tiles; ++k)
            {
                c[k] = std::cos(wn * d[k]);
                s[k] = -std::sin(wn * d[k]);
            }
        }

        // Per-symbol accumulators; the inner loop runs over symbols so it vectorizes
        s_re.assign(n_sym, 0.0);
        s_im.assign(n_sym, 0.0);
        for (std::size_t k = 0; k < n_tiles; ++k)
        {
            const double amp = ue_leg_gain_ / dist[k];
            const double c = amp * cos_arg[k], s = amp * sin_arg[k];
            const double g_re = tx_leg_[k].real(), g_im = tx_leg_[k].imag();
            const double h_re = g_re * c - g_im * s, h_im = g_re * s + g_im * c;
            const double *__restrict sign = &signs_[k * n_sym];
            double *__restrict re = s_re.data();
            double *__restrict im = s_im.data();
            for (std::size_t t = 0; t < n_sym; ++t)
            {
                re[t] += sign[t] * h_re;
                im[t] += sign[t] * h_im;
            }
        }
        for (std::size_t t = 0; t < n_sym; ++t)
        {
            const double mag = std::sqrt(s_re[t] * s_re[t] + s_im[t] * s_im[t]);
            out[t] = mag > 0.0 ? observed_[t] * ChannelCoeff(s_re[t] / mag, -s_im[t] / mag) : observed_[t];
        }
    }

    std::vector<double> CostEvaluator::model_phases(const Vec3 &p) const
    {
        const auto s = noiseless_symbols(config_, tiles_, p, obs_.schedule);
        std::vector<double> phases(s.size());
        for (std::size_t t = 0; t < s.size(); ++t)
            phases[t] = phase_of(s[t]);
        return phases;
    }

    std::vector<double> CostEvaluator::residuals(const Vec3 &p) const
    {
        auto phases = model_phases(p);
        for (std::size_t t = 0; t < phases.size(); ++t)
            phases[t] = wrap_phase(obs_.phase[t] - phases[t]);
        return phases;
    }

    double CostEvaluator::cost_unchecked(const Vec3 &p) const
    {
        const std::size_t n_sym = observed_.size();
        thread_local std::vector<ChannelCoeff> u;
        u.resize(n_sym);
        residual_phasors(p, u);

        ChannelCoeff z = 0.0;
        for (std::size_t t = 0; t < n_sym; ++t)
            z += weights_[t] * (u[t] * u[t]);
        const ChannelCoeff derotate = std::polar(1.0, -half_angle(z));

        // sin(residual - phi0*) is the imaginary part of the derotated phasor
        double total = 0.0;
        for (std::size_t t = 0; t < n_sym; ++t)
        {
            const double s = (u[t] * derotate).imag();
            total += weights_[t] * s * s;
        }
        return total;
    }

    double CostEvaluator::cost(const Vec3 &p) const
    {
        tally();
        return cost_unchecked(p);
    }

    double CostEvaluator::evaluate(const Vec2 &p) const
    {
        return cost_unchecked(config_.search_region.lift(p));
    }

    double CostEvaluator::cost_with_offset(const Vec3 &p, double phase_offset) const
    {
        const auto phases = model_phases(p);
        double total = 0.0;
        for (std::size_t t = 0; t < phases.size(); ++t)
        {
            const double s = std::sin(obs_.phase[t] - phases[t] - phase_offset);
            total += weights_[t] * s * s;
        }
        return total;
    }

    std::array<double, 2> numeric_gradient(const Objective &objective, const Vec2 &p, double step)
    {
        if (!(step >= 1e-12))
            throw std::invalid_argument("numeric_gradient: step underflow (h < 1e-12 m)");
        const double fxp = objective({p.x + step, p.y});
        const double fxm = objective({p.x - step, p.y});
        const double fyp = objective({p.x, p.y + step});
        const double fym = objective({p.x, p.y - step});
        return {(fxp - fxm) / (2.0 * step), (fyp - fym) / (2.0 * step)};
    }
}
