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

#ifndef RISLOC_HARNESS_HPP
#define RISLOC_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "optim.hpp"
#include "scene.hpp"

namespace risloc
{
    // Raised when a sweep stops on a failing grid point or a file does not match
    class HarnessError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Random streams for one estimate. Scenario streams (schedule, noise,
    // offsets) depend on the grid point only, so every optimizer sees the same
    // observations at the same point; the optimizer stream also depends on the
    // optimizer family.
    struct PointSeeds
    {
        std::uint64_t schedule = 0;
        std::uint64_t noise = 0;
        std::uint64_t offsets = 0;
        std::uint64_t optimizer = 0;
    };

    // apso shares the "pso" family so its first run equals plain PSO at the same point
    std::string_view seed_family(OptimizerKind kind);
    PointSeeds point_seeds(std::uint64_t master_seed, std::string_view pass, std::size_t index, OptimizerKind kind,
                           bool pin_schedule = false);

    // Clock offset uniform in [0, 100 ns), phase offset uniform in [-pi, pi)
    OffsetParams draw_offsets(std::uint64_t seed);

    double planar_error_cm(const Vec3 &estimate, const Vec3 &truth);

    struct EstimateRecord
    {
        Vec3 truth;
        Estimate estimate;
        double error_cm = 0.0;
    };

    // Fresh schedule, offsets and noise from the seeds, then one optimizer run.
    // Throws std::invalid_argument when ue_true lies outside the search region.
    EstimateRecord run_estimate(const ScenarioConfig &config, const std::vector<RisTile> &tiles, OptimizerKind kind,
                                const OptimizerParams &params, const Vec3 &ue_true, const PointSeeds &seeds,
                                const RegionMask *mask = nullptr);

    struct ErrorRecord
    {
        Vec2 truth;
        Vec2 estimate;
        double error_cm = 0.0;
        double final_cost = 0.0;
        std::uint64_t evaluations = 0;
        double wall_time = 0.0; // s
        std::uint64_t seed = 0;  // optimizer seed
    };

    // Sweep result over a grid of true positions, records in grid order (x fastest)
    struct ErrorMap
    {
        std::string scenario_digest;
        std::string optimizer;
        std::string params_digest;
        KeyValueFile params; // optim.* keys as run
        std::uint64_t master_seed = 0;
        std::string pass = "primary";
        GridDims resolution;
        SearchRegion region;
        bool pin_schedule = false;
        std::string mask_source; // apso only
        bool complete = true;
        std::vector<ErrorRecord> records;

        void write(std::ostream &out) const;
        static void write_record(std::ostream &out, const ErrorRecord &r); // one data row
        static ErrorMap read(std::istream &in);
        static ErrorMap load(const std::string &path);
        void save(const std::string &path) const; // temp file + rename

        // Digest of header and records without wall times; equal for reruns of the same sweep
        std::string content_digest() const;

        // Recomputed errors, grid coverage and region containment; empty when consistent
        std::vector<std::string> violations(double tolerance_cm = 1e-9) const;
    };

    struct SweepSpec
    {
        ScenarioConfig scenario;
        OptimizerKind optimizer = OptimizerKind::pso;
        OptimizerParams params;
        GridDims resolution{15, 15};
        std::string pass = "primary";
        bool pin_schedule = false;
        const RegionMask *mask = nullptr;
    };

    struct SweepOptions
    {
        std::size_t workers = 0; // 0 selects the hardware concurrency
        std::string out_path;    // empty: keep in memory only
        // Stop after this many newly computed points (0 = run to the end); the
        // file then stays in progress and a later call resumes it
        std::size_t max_new_records = 0;
        std::function<void(std::size_t done, std::size_t total)> progress;
    };

    // Resumes from out_path when it holds a partial run of the same sweep and
    // refuses (HarnessError) when it holds a different one.
    ErrorMap run_fingerprint(const SweepSpec &spec, const SweepOptions &options = {});

    // Lower-resolution grid for the validation pass: half the points per axis, rounded up
    GridDims validation_resolution(GridDims primary);

    // Nearest-rank percentile of unsorted values, q in [0, 100]
    double nearest_rank(std::vector<double> values, double q);

    struct PercentileRow
    {
        std::string method;
        std::size_t samples = 0;
        double p50 = 0.0, p75 = 0.0, p85 = 0.0, p90 = 0.0; // cm
        std::vector<double> curve;                        // 0..100 % in 1 % steps
    };

    struct PercentileReport
    {
        std::string scenario_digest;
        std::vector<PercentileRow> rows;

        void write_table(std::ostream &out) const;
        void write_curve(std::ostream &out) const;
    };

    // One row per optimizer, records of maps with the same optimizer pooled.
    // Throws HarnessError on an empty input, an empty map or mixed scenario digests.
    PercentileReport percentile_report(const std::vector<ErrorMap> &maps);

    struct TimingRow
    {
        std::string method;
        std::size_t samples = 0;
        double mean_wall = 0.0, median_wall = 0.0; // s
        double mean_evaluations = 0.0, median_evaluations = 0.0;
        double wall_ratio = 0.0, evaluation_ratio = 0.0; // vs pso; 0 when no pso map is given
    };

    struct TimingReport
    {
        std::vector<TimingRow> rows;
        void write_table(std::ostream &out) const;
    };

    TimingReport timing_report(const std::vector<ErrorMap> &maps);

    // Cells whose median record error exceeds threshold_cm, followed by a 3x3 closing.
    // Throws std::invalid_argument when threshold_cm <= 0.
    RegionMask derive_regions(const ErrorMap &map, double threshold_cm, double cell_size);

    // Same as derive_regions before the closing step
    RegionMask raw_regions(const ErrorMap &map, double threshold_cm, double cell_size);

    // 95th percentile of final_cost / cost_scale over noiseless PSO runs whose
    // error is below success_cm, at n_points random positions
    double calibrate_apriori_threshold(const ScenarioConfig &config, const OptimizerParams &params,
                                       std::size_t n_points, std::uint64_t seed, double success_cm = 1.0);
}

#endif
