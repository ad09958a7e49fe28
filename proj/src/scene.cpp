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

#include "risloc/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risloc
{
    Vec2 SearchRegion::clamp(const Vec2 &p) const
    {
        return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
    }

    double ScenarioConfig::wavenumber() const
    {
        return 2.0 * M_PI * carrier_frequency / speed_of_light;
    }

    namespace
    {
        std::string vec3_text(const Vec3 &v)
        {
            return format_double(v.x) + ", " + format_double(v.y) + ", " + format_double(v.z);
        }

        // Number of whole pitches in the segment, or -1 when it does not divide
        long whole_pitches(const RisSegment &seg)
        {
            const double len = distance(seg.start, seg.end);
            if (!(seg.tile_pitch > 0.0) || !(len > 0.0))
                return -1;
            const double ratio = len / seg.tile_pitch;
            const double n = std::round(ratio);
            if (n < 1.0 || std::abs(ratio - n) > 1e-6 * std::max(1.0, n))
                return -1;
            return static_cast<long>(n);
        }

        bool inside_room(const ScenarioConfig &c, const Vec3 &p)
        {
            return p.x >= c.room_min.x && p.x <= c.room_max.x && p.y >= c.room_min.y && p.y <= c.room_max.y &&
                   p.z >= c.room_min.z && p.z <= c.room_max.z;
        }

        // Segment in the z_fixed plane intersects the closed rectangle
        bool segment_hits_region(const RisSegment &seg, const SearchRegion &r)
        {
            // Liang-Barsky clip of the xy projection
            double t0 = 0.0, t1 = 1.0;
            const double dx = seg.end.x - seg.start.x, dy = seg.end.y - seg.start.y;
            const double p[4] = {-dx, dx, -dy, dy};
            const double q[4] = {seg.start.x - r.x_min, r.x_max - seg.start.x, seg.start.y - r.y_min, r.y_max - seg.start.y};
            for (int i = 0; i < 4; ++i)
            {
                if (p[i] == 0.0)
                {
                    if (q[i] < 0.0)
                        return false;
                    continue;
                }
                const double t = q[i] / p[i];
                if (p[i] < 0.0)
                    t0 = std::max(t0, t);
                else
                    t1 = std::min(t1, t);
                if (t0 > t1)
                    return false;
            }
            return true;
        }
    }

    ScenarioConfig scenario_from_config(const KeyValueFile &kv)
    {
        ScenarioConfig c;
        c.carrier_frequency = kv.get_double("scene.carrier_frequency_hz", c.carrier_frequency);
        c.speed_of_light = kv.get_double("scene.speed_of_light_mps", c.speed_of_light);
        c.room_min = kv.get_vec3("scene.room_min", c.room_min);
        c.room_max = kv.get_vec3("scene.room_max", c.room_max);
        c.tx_position = kv.get_vec3("scene.tx_position", c.tx_position);
        c.n_tiles = kv.get_size("scene.n_tiles", c.n_tiles);
        if (kv.has("scene.search_region"))
        {
            const auto v = parse_number_list(kv.get("scene.search_region"), "scene.search_region");
            if (v.size() != 5)
                throw ConfigError("scene.search_region: expected x_min, x_max, y_min, y_max, z");
            c.search_region = {v[0], v[1], v[2], v[3], v[4]};
        }
        if (kv.has("scene.ris_segment"))
        {
            c.ris_segments.clear();
            for (const auto &text : kv.get_all("scene.ris_segment"))
            {
                const auto v = parse_number_list(text, "scene.ris_segment");
                if (v.size() != 7)
                    throw ConfigError("scene.ris_segment: expected start xyz, end xyz, pitch");
                c.ris_segments.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6]});
            }
        }
        if (kv.has("scene.tile_cells"))
        {
            const auto v = parse_number_list(kv.get("scene.tile_cells"), "scene.tile_cells");
            if (v.size() != 2 || v[0] < 0 || v[1] < 0)
                throw ConfigError("scene.tile_cells: expected N_x, N_y");
            c.tile_cells_x = static_cast<std::size_t>(v[0]);
            c.tile_cells_y = static_cast<std::size_t>(v[1]);
        }
        c.cell_pitch = kv.get_double("scene.cell_pitch_m", c.cell_pitch);
        const std::string amp = kv.get_string("scene.tile_amplitude", "unit");
        if (amp == "unit")
            c.tile_amplitude = TileAmplitude::unit;
        else if (amp == "cell_count")
            c.tile_amplitude = TileAmplitude::cell_count;
        else
            throw ConfigError("scene.tile_amplitude: expected 'unit' or 'cell_count', got '" + amp + "'");

        c.tx_gain = kv.get_double("channel.tx_gain", c.tx_gain);
        c.rx_gain = kv.get_double("channel.rx_gain", c.rx_gain);
        c.tx_power = kv.get_double("channel.tx_power_w", c.tx_power);
        c.n_tx_antennas = kv.get_size("channel.n_tx_antennas", c.n_tx_antennas);
        c.n_symbols = kv.get_size("channel.n_symbols", c.n_symbols);
        const std::string mode = kv.get_string("channel.noise_mode", "snr_db");
        if (mode == "snr_db")
            c.noise.mode = NoiseMode::snr_db;
        else if (mode == "absolute")
            c.noise.mode = NoiseMode::absolute;
        else
            throw ConfigError("channel.noise_mode: expected 'snr_db' or 'absolute', got '" + mode + "'");
        c.noise.snr_db = kv.get_double("channel.snr_db", c.noise.snr_db);
        c.noise.power = kv.get_double("channel.noise_power_w", c.noise.power);
        c.master_seed = kv.get_u64("seed.master", c.master_seed);
        return c;
    }

    KeyValueFile scenario_to_config(const ScenarioConfig &c)
    {
        KeyValueFile kv;
        kv.set("scene.carrier_frequency_hz", format_double(c.carrier_frequency));
        kv.set("scene.speed_of_light_mps", format_double(c.speed_of_light));
        kv.set("scene.room_min", vec3_text(c.room_min));
        kv.set("scene.room_max", vec3_text(c.room_max));
        kv.set("scene.tx_position", vec3_text(c.tx_position));
        kv.set("scene.n_tiles", std::to_string(c.n_tiles));
        const auto &r = c.search_region;
        kv.set("scene.search_region", format_double(r.x_min) + ", " + format_double(r.x_max) + ", " +
                                          format_double(r.y_min) + ", " + format_double(r.y_max) + ", " +
                                          format_double(r.z_fixed));
        std::string segs;
        for (std::size_t i = 0; i < c.ris_segments.size(); ++i)
        {
            const auto &s = c.ris_segments[i];
            segs += (i ? " | " : "") + vec3_text(s.start) + ", " + vec3_text(s.end) + ", " + format_double(s.tile_pitch);
        }
        kv.set("scene.ris_segments", segs);
        kv.set("scene.tile_cells", std::to_string(c.tile_cells_x) + ", " + std::to_string(c.tile_cells_y));
        kv.set("scene.cell_pitch_m", format_double(c.cell_pitch));
        kv.set("scene.tile_amplitude", c.tile_amplitude == TileAmplitude::unit ? "unit" : "cell_count");
        kv.set("channel.tx_gain", format_double(c.tx_gain));
        kv.set("channel.rx_gain", format_double(c.rx_gain));
        kv.set("channel.tx_power_w", format_double(c.tx_power));
        kv.set("channel.n_tx_antennas", std::to_string(c.n_tx_antennas));
        kv.set("channel.n_symbols", std::to_string(c.n_symbols));
        kv.set("channel.noise_mode", c.noise.mode == NoiseMode::snr_db ? "snr_db" : "absolute");
        kv.set("channel.snr_db", format_double(c.noise.snr_db));
        kv.set("channel.noise_power_w", format_double(c.noise.power));
        kv.set("seed.master", std::to_string(c.master_seed));
        return kv;
    }

    std::string scenario_digest(const ScenarioConfig &config)
    {
        // The master seed drives the sweep streams, not the physics; it stays out of the digest
        auto kv = scenario_to_config(config);
        kv.set("seed.master", "-");
        return digest_hex(kv.canonical());
    }

    std::vector<RisTile> build_ris_layout(const ScenarioConfig &config)
    {
        std::vector<RisTile> tiles;
        const double pitch = config.effective_cell_pitch();
        const double amp = config.tile_amplitude == TileAmplitude::unit
                               ? 1.0
                               : static_cast<double>(config.tile_cells_x * config.tile_cells_y);
        const Vec3 centroid = config.room_centroid();

        for (std::size_t s = 0; s < config.ris_segments.size(); ++s)
        {
            const auto &seg = config.ris_segments[s];
            const long n = whole_pitches(seg);
            if (n < 0)
                throw ConfigError("RIS segment " + std::to_string(s + 1) + " (" + vec3_text(seg.start) + " -> " +
                                  vec3_text(seg.end) + "): length is not a positive multiple of the tile pitch " +
                                  format_double(seg.tile_pitch));

            const Vec3 span = seg.end - seg.start;
            const double len = span.norm();
            const Vec3 dir = span * (1.0 / len);
            // In-plane normal, flipped to face the room
            Vec3 normal{-dir.y, dir.x, 0.0};
            const double nn = normal.norm();
            if (nn == 0.0)
                throw ConfigError("RIS segment " + std::to_string(s + 1) + " is vertical; walls must run horizontally");
            normal = normal * (1.0 / nn);

            for (long i = 0; i < n; ++i)
            {
                RisTile t;
                t.index = tiles.size() + 1;
                t.center = seg.start + span * ((static_cast<double>(i) + 0.5) / static_cast<double>(n));
                const Vec3 to_room{centroid.x - t.center.x, centroid.y - t.center.y, 0.0};
                t.normal = normal.dot(to_room) < 0.0 ? normal * -1.0 : normal;
                t.cells_x = config.tile_cells_x;
                t.cells_y = config.tile_cells_y;
                t.cell_pitch = pitch;
                t.amplitude_factor = amp;
                tiles.push_back(t);
            }
        }
        return tiles;
    }

    std::vector<Violation> validate_scenario(const ScenarioConfig &c)
    {
        std::vector<Violation> v;
        auto add = [&](std::string field, std::string msg)
        { v.push_back({std::move(field), std::move(msg)}); };

        if (!(c.carrier_frequency > 0.0) || !std::isfinite(c.carrier_frequency))
            add("carrier_frequency", "carrier_frequency must be positive");
        if (!(c.speed_of_light > 0.0) || !std::isfinite(c.speed_of_light))
            add("speed_of_light", "speed_of_light must be positive");
        if (!c.room_min.finite() || !c.room_max.finite() || !(c.room_min.x < c.room_max.x) ||
            !(c.room_min.y < c.room_max.y) || !(c.room_min.z < c.room_max.z))
            add("room", "room bounds must be finite with min < max on every axis");
        if (!c.tx_position.finite() || !inside_room(c, c.tx_position))
            add("tx_position", "tx_position must lie inside the room");
        if (!(c.tx_gain > 0.0))
            add("tx_gain", "tx_gain must be positive");
        if (!(c.rx_gain > 0.0))
            add("rx_gain", "rx_gain must be positive");
        if (!(c.tx_power > 0.0))
            add("tx_power", "tx_power must be positive");
        if (c.n_tx_antennas < 1)
            add("n_tx_antennas", "n_tx_antennas must be at least 1");
        if (c.n_symbols < 1)
            add("n_symbols", "n_symbols must be at least 1");
        if (c.n_tiles < 1)
            add("n_tiles", "n_tiles must be at least 1");
        if (c.tile_cells_x < 1 || c.tile_cells_y < 1)
            add("tile_cells", "tile cell counts must be at least 1");
        if (c.cell_pitch < 0.0 || !std::isfinite(c.cell_pitch))
            add("cell_pitch", "cell_pitch must be positive (or 0 for lambda/2)");

        if (c.noise.mode == NoiseMode::absolute)
        {
            if (c.noise.power < 0.0)
                add("noise_power", "noise_power negative");
            else if (!std::isfinite(c.noise.power))
                add("noise_power", "noise_power must be finite");
        }
        else if (std::isnan(c.noise.snr_db))
            add("snr_db", "snr_db must be a number");

        const auto &r = c.search_region;
        if (!(r.x_min < r.x_max))
            add("search_region.x", "search region needs x_min < x_max");
        if (!(r.y_min < r.y_max))
            add("search_region.y", "search region needs y_min < y_max");
        if (r.x_min < c.room_min.x)
            add("search_region.x_min", "search region x_min " + format_double(r.x_min) + " outside room");
        if (r.x_max > c.room_max.x)
            add("search_region.x_max", "search region x_max " + format_double(r.x_max) + " outside room");
        if (r.y_min < c.room_min.y)
            add("search_region.y_min", "search region y_min " + format_double(r.y_min) + " outside room");
        if (r.y_max > c.room_max.y)
            add("search_region.y_max", "search region y_max " + format_double(r.y_max) + " outside room");
        if (r.z_fixed < c.room_min.z || r.z_fixed > c.room_max.z)
            add("search_region.z_fixed", "search region height " + format_double(r.z_fixed) + " outside room");

        if (c.ris_segments.empty())
            add("ris_segments", "at least one RIS segment is required");
        std::size_t tiles = 0;
        bool layout_ok = true;
        for (std::size_t s = 0; s < c.ris_segments.size(); ++s)
        {
            const auto &seg = c.ris_segments[s];
            const std::string name = "ris_segment[" + std::to_string(s + 1) + "]";
            const long n = whole_pitches(seg);
            if (n < 0)
            {
                add(name, "segment length is not a positive multiple of the tile pitch");
                layout_ok = false;
            }
            else
                tiles += static_cast<std::size_t>(n);
            if (!inside_room(c, seg.start) || !inside_room(c, seg.end))
                add(name, "segment endpoints must lie inside the room");
            if (std::abs(seg.start.z - r.z_fixed) < 1e-12 && std::abs(seg.end.z - r.z_fixed) < 1e-12 &&
                segment_hits_region(seg, r))
                add(name, "segment intersects the search region");
        }
        if (layout_ok && !c.ris_segments.empty() && tiles != c.n_tiles)
            add("n_tiles", "n_tiles " + std::to_string(c.n_tiles) + " does not match the " + std::to_string(tiles) +
                               " tiles produced by the segments");
        return v;
    }

    GridDims grid_dims_for(const SearchRegion &region, std::size_t n_target)
    {
        if (n_target < 1)
            throw std::invalid_argument("sample_grid: n_target must be at least 1");
        const double n = static_cast<double>(n_target);
        const double ideal_nx = std::sqrt(n * region.width() / region.height());
        GridDims best{0, 0};
        std::size_t best_count = std::numeric_limits<std::size_t>::max();
        double best_skew = std::numeric_limits<double>::infinity();
        const auto lo = static_cast<std::size_t>(std::max(1.0, std::floor(ideal_nx)));
        for (std::size_t nx = lo; nx <= lo + 1; ++nx)
        {
            const std::size_t ny = (n_target + nx - 1) / nx;
            const std::size_t count = nx * ny;
            // Relative mismatch between x and y pitches
            const double skew = std::abs(std::log((region.width() / static_cast<double>(nx)) /
                                                  (region.height() / static_cast<double>(ny))));
            if (count < best_count || (count == best_count && skew < best_skew))
            {
                best = {nx, ny};
                best_count = count;
                best_skew = skew;
            }
        }
        return best;
    }

    std::vector<Vec3> sample_grid(const SearchRegion &region, GridDims dims)
    {
        if (dims.nx < 1 || dims.ny < 1)
            throw std::invalid_argument("sample_grid: grid dimensions must be at least 1x1");
        std::vector<Vec3> pts;
        pts.reserve(dims.count());
        const double dx = region.width() / static_cast<double>(dims.nx);
        const double dy = region.height() / static_cast<double>(dims.ny);
        for (std::size_t j = 0; j < dims.ny; ++j)
            for (std::size_t i = 0; i < dims.nx; ++i)
                pts.push_back({region.x_min + (static_cast<double>(i) + 0.5) * dx,
                               region.y_min + (static_cast<double>(j) + 0.5) * dy, region.z_fixed});
        return pts;
    }

    std::vector<Vec3> sample_grid(const SearchRegion &region, std::size_t n_target)
    {
        return sample_grid(region, grid_dims_for(region, n_target));
    }
}
