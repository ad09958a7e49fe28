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

#include "risloc/channel.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "risloc/random.hpp"

namespace risloc
{
    double phase_of(const ChannelCoeff &c)
    {
        double a = std::arg(c);
        if (a <= -M_PI)
            a = M_PI;
        return a;
    }

    PhaseSchedule::PhaseSchedule(std::size_t n_tiles, std::size_t n_symbols)
        : n_tiles_(n_tiles), n_symbols_(n_symbols), bits_(n_tiles * n_symbols, 0)
    {
    }

    void PhaseSchedule::write(std::ostream &out) const
    {
        for (std::size_t k = 0; k < n_tiles_; ++k)
        {
            for (std::size_t t = 0; t < n_symbols_; ++t)
                out << (t ? " " : "") << (flipped(k, t) ? '1' : '0');
            out << '\n';
        }
    }

    PhaseSchedule PhaseSchedule::read(std::istream &in)
    {
        std::vector<std::vector<std::uint8_t>> rows;
        std::string line;
        while (std::getline(in, line))
        {
            if (line.empty() || line[0] == '#')
                continue;
            std::istringstream ls(line);
            std::vector<std::uint8_t> row;
            int v;
            while (ls >> v)
            {
                if (v != 0 && v != 1)
                    throw ConfigError("phase schedule entries must be 0 or 1");
                row.push_back(static_cast<std::uint8_t>(v));
            }
            if (!row.empty())
                rows.push_back(std::move(row));
        }
        if (rows.empty())
            throw ConfigError("phase schedule is empty");
        PhaseSchedule s(rows.size(), rows.front().size());
        for (std::size_t k = 0; k < rows.size(); ++k)
        {
            if (rows[k].size() != s.n_symbols())
                throw ConfigError("phase schedule rows have unequal lengths");
            for (std::size_t t = 0; t < s.n_symbols(); ++t)
                s.set_flipped(k, t, rows[k][t] != 0);
        }
        return s;
    }

    double OffsetParams::effective_phase(double carrier_frequency) const
    {
        return wrap_phase(2.0 * M_PI * carrier_frequency * clock_offset + phase_offset);
    }

    ChannelCoeff tx_tile_coeff(const ScenarioConfig &config, const RisTile &tile, const OffsetParams &offsets)
    {
        const double d = distance(config.tx_position, tile.center);
        if (!(d > 0.0))
            throw DomainError("tx_tile_coeff: TX coincides with tile " + std::to_string(tile.index));
        // The xi_k * eta_k product is carried entirely on this leg
        const double amp = tile.amplitude_factor *
                           std::sqrt(config.tx_gain * config.tx_power / static_cast<double>(config.n_tx_antennas)) *
                           config.wavelength() / (4.0 * M_PI * d);
        const double phase = -config.wavenumber() * d + 2.0 * M_PI * config.carrier_frequency * offsets.clock_offset +
                             offsets.phase_offset;
        return std::polar(amp, wrap_phase(phase));
    }

    ChannelCoeff tile_ue_coeff(const ScenarioConfig &config, const RisTile &tile, const Vec3 &ue)
    {
        const double d = distance(ue, tile.center);
        if (!(d > 0.0))
            throw DomainError("tile_ue_coeff: UE coincides with tile " + std::to_string(tile.index));
        const double amp = std::sqrt(config.rx_gain) * config.wavelength() / (4.0 * M_PI * d);
        return std::polar(amp, wrap_phase(-config.wavenumber() * d));
    }

    ChannelCoeff cascaded_coeff(const ScenarioConfig &config, const RisTile &tile, const Vec3 &ue,
                                const OffsetParams &offsets)
    {
        return tx_tile_coeff(config, tile, offsets) * tile_ue_coeff(config, tile, ue);
    }

    PhaseSchedule generate_phase_schedule(std::size_t n_tiles, std::size_t n_symbols, std::uint64_t seed)
    {
        if (n_tiles < 1 || n_symbols < 1)
            throw std::invalid_argument("generate_phase_schedule: K and T must be at least 1");
        PhaseSchedule s(n_tiles, n_symbols);
        const std::uint64_t key = derive_seed(seed, "phase-schedule");
        for (std::size_t k = 0; k < n_tiles; ++k)
            for (std::size_t t = 0; t < n_symbols; ++t)
                s.set_flipped(k, t, (hash_combine(hash_combine(key, k), t) >> 63) != 0);
        return s;
    }

    double resolve_noise_power(const ScenarioConfig &config, std::span<const RisTile> tiles)
    {
        if (config.noise.mode == NoiseMode::absolute)
            return config.noise.power;
        if (std::isinf(config.noise.snr_db) && config.noise.snr_db > 0.0)
            return 0.0;
        const Vec3 centroid = config.room_centroid();
        const Vec3 ref{centroid.x, centroid.y, config.search_region.z_fixed};
        double power = 0.0;
        for (const auto &tile : tiles)
            power += std::norm(cascaded_coeff(config, tile, ref, {}));
        return power / std::pow(10.0, config.noise.snr_db / 10.0);
    }

    std::vector<ChannelCoeff> noiseless_symbols(const ScenarioConfig &config, std::span<const RisTile> tiles,
                                                const Vec3 &ue, const PhaseSchedule &schedule)
    {
        if (schedule.n_tiles() != tiles.size())
            throw std::invalid_argument("phase schedule has " + std::to_string(schedule.n_tiles()) +
                                        " rows but the layout has " + std::to_string(tiles.size()) + " tiles");
        std::vector<ChannelCoeff> h;
        h.reserve(tiles.size());
        for (const auto &tile : tiles)
            h.push_back(cascaded_coeff(config, tile, ue, {}));

        std::vector<ChannelCoeff> s(schedule.n_symbols());
        for (std::size_t t = 0; t < s.size(); ++t)
        {
            ChannelCoeff acc = 0.0;
            for (std::size_t k = 0; k < h.size(); ++k)
                acc += schedule.sign(k, t) * h[k];
            s[t] = acc;
        }
        return s;
    }

    PilotObservations synthesize_observations(const ScenarioConfig &config, std::span<const RisTile> tiles,
                                              const Vec3 &ue_true, const PhaseSchedule &schedule,
                                              const OffsetParams &offsets, std::uint64_t noise_seed)
    {
        if (schedule.n_symbols() < 1)
            throw std::invalid_argument("synthesize_observations: schedule has no symbols");
        PilotObservations obs;
        obs.schedule = schedule;
        obs.noise_seed = noise_seed;
        obs.noise_power = resolve_noise_power(config, tiles);
        obs.phase_offset_eff = offsets.effective_phase(config.carrier_frequency);

        const auto s = noiseless_symbols(config, tiles, ue_true, schedule);
        const ChannelCoeff rotation = std::polar(1.0, obs.phase_offset_eff);
        CounterStream noise(derive_seed(noise_seed, "noise"));
        obs.amplitude.reserve(s.size());
        obs.phase.reserve(s.size());
        for (const auto &st : s)
        {
            ChannelCoeff r = st * rotation;
            if (obs.noise_power > 0.0)
            {
                // Box-Muller: each quadrature carries sigma^2 / 2
                const double radius = std::sqrt(-obs.noise_power * std::log(noise.uniform_open_low()));
                const double angle = 2.0 * M_PI * noise.uniform();
                r += std::polar(radius, angle);
            }
            obs.amplitude.push_back(std::abs(r));
            obs.phase.push_back(phase_of(r));
        }
        return obs;
    }

    void PilotObservations::write(std::ostream &out) const
    {
        out << "# risloc-observations v1\n";
        out << "# n_symbols = " << n_symbols() << "\n";
        out << "# noise_power = " << format_double(noise_power) << "\n";
        out << "# schedule_seed = " << schedule_seed << "\n";
        out << "# noise_seed = " << noise_seed << "\n";
        out << "# phase_offset_eff = " << format_double(phase_offset_eff) << "\n";
        out << "t,amplitude,phase\n";
        for (std::size_t t = 0; t < n_symbols(); ++t)
            out << (t + 1) << ',' << format_double(amplitude[t]) << ',' << format_double(phase[t]) << '\n';
    }

    PilotObservations PilotObservations::read(std::istream &in, PhaseSchedule schedule)
    {
        PilotObservations obs;
        obs.schedule = std::move(schedule);
        std::string line;
        bool saw_columns = false;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            if (line[0] == '#')
            {
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                    continue;
                const std::string key = trim(line.substr(1, eq - 1));
                const std::string val = trim(line.substr(eq + 1));
                if (key == "noise_power")
                    obs.noise_power = parse_double(val, key);
                else if (key == "schedule_seed")
                    obs.schedule_seed = parse_u64(val, key);
                else if (key == "noise_seed")
                    obs.noise_seed = parse_u64(val, key);
                else if (key == "phase_offset_eff")
                    obs.phase_offset_eff = parse_double(val, key);
                continue;
            }
            if (!saw_columns)
            {
                if (trim(line) != "t,amplitude,phase")
                    throw ConfigError("observation file: unexpected column header '" + line + "'");
                saw_columns = true;
                continue;
            }
            const auto cols = split(line, ',');
            if (cols.size() != 3)
                throw ConfigError("observation file: expected 3 columns in '" + line + "'");
            if (parse_u64(cols[0], "t") != obs.amplitude.size() + 1)
                throw ConfigError("observation file: symbol index out of order");
            obs.amplitude.push_back(parse_double(cols[1], "amplitude"));
            obs.phase.push_back(parse_double(cols[2], "phase"));
        }
        if (obs.amplitude.empty())
            throw ConfigError("observation file has no records");
        if (obs.schedule.n_symbols() != obs.amplitude.size())
            throw ConfigError("observation file and schedule disagree on the symbol count");
        return obs;
    }
}
