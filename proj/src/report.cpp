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
#include <cmath>
#include <cstdio>
#include <ostream>

#include "risloc/harness.hpp"

namespace risloc
{
    double nearest_rank(std::vector<double> values, double q)
    {
        if (values.empty())
            throw std::invalid_argument("nearest_rank: no values");
        if (!(q >= 0.0 && q <= 100.0))
            throw std::invalid_argument("nearest_rank: percentile outside [0, 100]");
        std::sort(values.begin(), values.end());
        // q * n is exact for integral q, so the division lands on whole ranks exactly
        const double r = std::ceil(q * static_cast<double>(values.size()) / 100.0);
        const std::size_t rank = std::clamp<std::size_t>(static_cast<std::size_t>(r), 1, values.size());
        return values[rank - 1];
    }

    namespace
    {
        // Optimizer labels in first-seen order
        std::vector<std::string> methods_of(const std::vector<ErrorMap> &maps)
        {
            std::vector<std::string> names;
            for (const auto &m : maps)
                if (std::find(names.begin(), names.end(), m.optimizer) == names.end())
                    names.push_back(m.optimizer);
            return names;
        }

        void check_maps(const std::vector<ErrorMap> &maps)
        {
            if (maps.empty())
                throw HarnessError("no error maps given");
            for (const auto &m : maps)
            {
                if (m.records.empty())
                    throw HarnessError("error map for " + m.optimizer + " has no records");
                if (m.scenario_digest != maps.front().scenario_digest)
                    throw HarnessError("error maps come from different scenarios: " + maps.front().scenario_digest +
                                       " and " + m.scenario_digest);
            }
        }

        double median(std::vector<double> v)
        {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }

        double mean(const std::vector<double> &v)
        {
            double s = 0.0;
            for (double x : v)
                s += x;
            return s / static_cast<double>(v.size());
        }

        std::string fixed(double v, int digits)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", digits, v);
            return buf;
        }
    }

    PercentileReport percentile_report(const std::vector<ErrorMap> &maps)
    {
        check_maps(maps);
        PercentileReport report;
        report.scenario_digest = maps.front().scenario_digest;
        for (const auto &name : methods_of(maps))
        {
            std::vector<double> errors;
            for (const auto &m : maps)
                if (m.optimizer == name)
                    for (const auto &r : m.records)
                        errors.push_back(r.error_cm);
            PercentileRow row;
            row.method = name;
            row.samples = errors.size();
            std::sort(errors.begin(), errors.end());
            for (int q = 0; q <= 100; ++q)
                row.curve.push_back(nearest_rank(errors, q));
            row.p50 = row.curve[50];
            row.p75 = row.curve[75];
            row.p85 = row.curve[85];
            row.p90 = row.curve[90];
            report.rows.push_back(std::move(row));
        }
        return report;
    }

    void PercentileReport::write_table(std::ostream &out) const
    {
        out << "# percentiles of the localization error [cm]\n";
        out << "# scenario_digest = " << scenario_digest << "\n";
        out << "method,samples,p50_cm,p75_cm,p85_cm,p90_cm\n";
        for (const auto &r : rows)
            out << r.method << ',' << r.samples << ',' << format_double(r.p50) << ',' << format_double(r.p75) << ','
                << format_double(r.p85) << ',' << format_double(r.p90) << '\n';
    }

    void PercentileReport::write_curve(std::ostream &out) const
    {
        out << "# error [cm] as a function of the percentile\n";
        out << "# scenario_digest = " << scenario_digest << "\n";
        out << "percentile";
        for (const auto &r : rows)
            out << ',' << r.method;
        out << '\n';
        for (int q = 0; q <= 100; ++q)
        {
            out << q;
            for (const auto &r : rows)
                out << ',' << format_double(r.curve[static_cast<std::size_t>(q)]);
            out << '\n';
        }
    }

    TimingReport timing_report(const std::vector<ErrorMap> &maps)
    {
        check_maps(maps);
        TimingReport report;
        for (const auto &name : methods_of(maps))
        {
            std::vector<double> wall, evals;
            for (const auto &m : maps)
                if (m.optimizer == name)
                    for (const auto &r : m.records)
                    {
                        wall.push_back(r.wall_time);
                        evals.push_back(static_cast<double>(r.evaluations));
                    }
            TimingRow row;
            row.method = name;
            row.samples = wall.size();
            row.mean_wall = mean(wall);
            row.median_wall = median(wall);
            row.mean_evaluations = mean(evals);
            row.median_evaluations = median(evals);
            report.rows.push_back(row);
        }
        const auto pso = std::find_if(report.rows.begin(), report.rows.end(),
                                      [](const TimingRow &r) { return r.method == "pso"; });
        if (pso != report.rows.end())
        {
            const TimingRow ref = *pso;
            for (auto &r : report.rows)
            {
                r.wall_ratio = ref.mean_wall > 0.0 ? r.mean_wall / ref.mean_wall : 0.0;
                r.evaluation_ratio = ref.mean_evaluations > 0.0 ? r.mean_evaluations / ref.mean_evaluations : 0.0;
            }
        }
        return report;
    }

    void TimingReport::write_table(std::ostream &out) const
    {
        out << "# position estimation cost per method; ratios relative to pso (0 when absent)\n";
        out << "method,samples,mean_wall_s,median_wall_s,mean_evaluations,median_evaluations,wall_ratio,"
               "evaluation_ratio\n";
        for (const auto &r : rows)
            out << r.method << ',' << r.samples << ',' << fixed(r.mean_wall, 6) << ',' << fixed(r.median_wall, 6)
                << ',' << fixed(r.mean_evaluations, 1) << ',' << fixed(r.median_evaluations, 1) << ','
                << fixed(r.wall_ratio, 3) << ',' << fixed(r.evaluation_ratio, 3) << '\n';
    }

    RegionMask raw_regions(const ErrorMap &map, double threshold_cm, double cell_size)
    {
        if (!(threshold_cm > 0.0))
            throw std::invalid_argument("derive_regions: threshold must be positive, got " +
                                        format_double(threshold_cm) + " cm");
        RegionMask mask(map.region, cell_size);
        std::vector<std::vector<double>> bins(mask.nx() * mask.ny());
        for (const auto &r : map.records)
        {
            const auto [i, j] = mask.cell_of(r.truth);
            bins[j * mask.nx() + i].push_back(r.error_cm);
        }
        for (std::size_t j = 0; j < mask.ny(); ++j)
            for (std::size_t i = 0; i < mask.nx(); ++i)
            {
                const auto &b = bins[j * mask.nx() + i];
                mask.set(i, j, !b.empty() && median(b) > threshold_cm);
            }
        mask.source = map.content_digest();
        mask.threshold = threshold_cm;
        return mask;
    }

    RegionMask derive_regions(const ErrorMap &map, double threshold_cm, double cell_size)
    {
        const RegionMask raw = raw_regions(map, threshold_cm, cell_size);
        const auto nx = static_cast<long>(raw.nx()), ny = static_cast<long>(raw.ny());

        // 3x3 closing: dilation, then erosion with the outside counted as set
        auto sweep = [&](const RegionMask &in, bool dilate)
        {
            RegionMask out = in;
            for (long j = 0; j < ny; ++j)
                for (long i = 0; i < nx; ++i)
                {
                    bool v = !dilate;
                    for (long dj = -1; dj <= 1; ++dj)
                        for (long di = -1; di <= 1; ++di)
                        {
                            const long a = i + di, b = j + dj;
                            const bool inside = a >= 0 && a < nx && b >= 0 && b < ny;
                            const bool c = inside ? in.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b))
                                                  : !dilate;
                            v = dilate ? (v || c) : (v && c);
                        }
                    out.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
                }
            return out;
        };
        return sweep(sweep(raw, true), false);
    }

    double calibrate_apriori_threshold(const ScenarioConfig &config, const OptimizerParams &params,
                                       std::size_t n_points, std::uint64_t seed, double success_cm)
    {
        ScenarioConfig quiet = config;
        quiet.noise.mode = NoiseMode::absolute;
        quiet.noise.power = 0.0;
        const auto tiles = build_ris_layout(quiet);
        CounterStream rng(derive_seed(seed, "calibration"));
        const SearchRegion &region = quiet.search_region;

        std::vector<double> costs;
        for (std::size_t i = 0; i < n_points; ++i)
        {
            const double x = rng.uniform(region.x_min, region.x_max);
            const double y = rng.uniform(region.y_min, region.y_max);
            const auto seeds = point_seeds(seed, "calibration", i, OptimizerKind::pso);
            const auto schedule = generate_phase_schedule(tiles.size(), quiet.n_symbols, seeds.schedule);
            const Vec3 ue = region.lift({x, y});
            const CostEvaluator f(quiet, tiles,
                                  synthesize_observations(quiet, tiles, ue, schedule, draw_offsets(seeds.offsets),
                                                          seeds.noise));
            const Estimate e = pso(f, region, params, seeds.optimizer);
            if (planar_error_cm(e.position, ue) < success_cm)
                costs.push_back(e.final_cost / f.cost_scale());
        }
        if (costs.empty())
            throw HarnessError("threshold calibration: no successful run among " + std::to_string(n_points));
        return nearest_rank(costs, 95.0);
    }
}
