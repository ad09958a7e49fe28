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

#ifndef RISLOC_CHANNEL_HPP
#define RISLOC_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scene.hpp"

namespace risloc
{
    class DomainError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    using ChannelCoeff = std::complex<double>;

    // Argument of a complex number in (-pi, pi]
    double phase_of(const ChannelCoeff &c);

    // Per-tile, per-symbol reflection phase, restricted to {0, pi}
    class PhaseSchedule
    {
    public:
        PhaseSchedule() = default;
        PhaseSchedule(std::size_t n_tiles, std::size_t n_symbols);

        std::size_t n_tiles() const { return n_tiles_; }
        std::size_t n_symbols() const { return n_symbols_; }

        // k and t are 0-based
        bool flipped(std::size_t k, std::size_t t) const { return bits_[k * n_symbols_ + t] != 0; }
        void set_flipped(std::size_t k, std::size_t t, bool v) { bits_[k * n_symbols_ + t] = v ? 1 : 0; }
        double phase(std::size_t k, std::size_t t) const { return flipped(k, t) ? M_PI : 0.0; }
        // exp(j * phase), i.e. +1 or -1
        double sign(std::size_t k, std::size_t t) const { return flipped(k, t) ? -1.0 : 1.0; }

        bool operator==(const PhaseSchedule &) const = default;

        // K rows of T space-separated 0/1 entries (1 means phase pi)
        void write(std::ostream &out) const;
        static PhaseSchedule read(std::istream &in);

    private:
        std::size_t n_tiles_ = 0;
        std::size_t n_symbols_ = 0;
        std::vector<std::uint8_t> bits_;
    };

    struct OffsetParams
    {
        double clock_offset = 0.0; // t0, s
        double phase_offset = 0.0; // phi0, rad

        // Narrowband collapse of (t0, phi0) into one phase, wrapped to (-pi, pi]
        double effective_phase(double carrier_frequency) const;
    };

    struct PilotObservations
    {
        std::vector<double> amplitude; // a~_t
        std::vector<double> phase;     // phi~_t in (-pi, pi]
        PhaseSchedule schedule;
        double phase_offset_eff = 0.0; // ground truth, for test oracles only
        double noise_power = 0.0;      // sigma^2, W
        std::uint64_t schedule_seed = 0;
        std::uint64_t noise_seed = 0;

        std::size_t n_symbols() const { return amplitude.size(); }

        // Header of "# key = value" lines, then "t,amplitude,phase" rows
        void write(std::ostream &out) const;
        // Reads the record file; the schedule must be supplied separately
        static PilotObservations read(std::istream &in, PhaseSchedule schedule);
    };

    // TX -> tile leg. Throws DomainError when the TX sits on the tile.
    ChannelCoeff tx_tile_coeff(const ScenarioConfig &config, const RisTile &tile, const OffsetParams &offsets);

    // Tile -> UE leg. Throws DomainError when the UE sits on the tile.
    ChannelCoeff tile_ue_coeff(const ScenarioConfig &config, const RisTile &tile, const Vec3 &ue);

    // Cascaded TX -> tile -> UE coefficient
    ChannelCoeff cascaded_coeff(const ScenarioConfig &config, const RisTile &tile, const Vec3 &ue,
                                const OffsetParams &offsets);

    // Fair-coin {0, pi} entries; entry (k, t) depends only on (seed, k, t)
    PhaseSchedule generate_phase_schedule(std::size_t n_tiles, std::size_t n_symbols, std::uint64_t seed);

    // sigma^2 implied by config.noise. In SNR mode the reference power is the
    // schedule-averaged noiseless |s_t|^2 at the room centroid, sum_k |h_k|^2.
    double resolve_noise_power(const ScenarioConfig &config, std::span<const RisTile> tiles);

    // Noiseless per-symbol sums s_t = sum_k exp(j theta_kt) h_k(ue, zero offsets)
    std::vector<ChannelCoeff> noiseless_symbols(const ScenarioConfig &config, std::span<const RisTile> tiles,
                                                const Vec3 &ue, const PhaseSchedule &schedule);

    PilotObservations synthesize_observations(const ScenarioConfig &config, std::span<const RisTile> tiles,
                                              const Vec3 &ue_true, const PhaseSchedule &schedule,
                                              const OffsetParams &offsets, std::uint64_t noise_seed);
}

#endif
