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

#ifndef RISLOC_SCENE_HPP
#define RISLOC_SCENE_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"

namespace risloc
{
    // One RIS tile, treated as a point scatterer at its center
    struct RisTile
    {
        std::size_t index = 1;        // 1-based, segment-major order
        Vec3 center;                  // m
        Vec3 normal;                  // unit, pointing into the room
        std::size_t cells_x = 1;      // unit cells per tile along the wall
        std::size_t cells_y = 1;      // unit cells per tile vertically
        double cell_pitch = 0.0;      // m
        double amplitude_factor = 1.0; // product of the TX-leg and UE-leg tile factors
    };

    // Axis-aligned search rectangle at a fixed height
    struct SearchRegion
    {
        double x_min = 0.0, x_max = 1.0;
        double y_min = 0.0, y_max = 1.0;
        double z_fixed = 0.0;

        double width() const { return x_max - x_min; }
        double height() const { return y_max - y_min; }
        double area() const { return width() * height(); }
        Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
        bool contains(const Vec2 &p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
        bool contains(const Vec3 &p) const { return contains(Vec2{p.x, p.y}); }
        Vec2 clamp(const Vec2 &p) const;
        Vec3 lift(const Vec2 &p) const { return {p.x, p.y, z_fixed}; }
    };

    // Straight wall run of tiles at a uniform pitch
    struct RisSegment
    {
        Vec3 start;
        Vec3 end;
        double tile_pitch = 0.2; // m
    };

    enum class NoiseMode
    {
        absolute, // noise_power is sigma^2 in watts
        snr_db    // sigma^2 derived from snr_db against the incoherent tile power at the room center
    };

    struct NoiseSpec
    {
        NoiseMode mode = NoiseMode::snr_db;
        double power = 0.0;  // W, used in absolute mode
        double snr_db = 20.0; // dB, used in snr_db mode
    };

    enum class TileAmplitude
    {
        unit,      // xi_k * eta_k = 1
        cell_count // xi_k * eta_k = N_x * N_y (coherent aggregation of the unit cells)
    };

    struct ScenarioConfig
    {
        double carrier_frequency = 3.5e9;    // Hz
        double speed_of_light = 299792458.0; // m/s
        Vec3 room_min{-5.0, 0.0, 0.0};
        Vec3 room_max{5.0, 10.0, 3.0};
        Vec3 tx_position{0.0, 5.0, 1.0};
        double tx_gain = 1.0;
        double rx_gain = 1.0;
        double tx_power = 1.0; // W
        std::size_t n_tx_antennas = 1;
        std::size_t n_symbols = 32;
        std::size_t n_tiles = 100;
        NoiseSpec noise;
        SearchRegion search_region{-4.0, 4.0, 1.0, 10.0, 1.0};
        std::vector<RisSegment> ris_segments{
            {{-5.0, 0.0, 1.0}, {5.0, 0.0, 1.0}, 0.2},
            {{5.0, 0.0, 1.0}, {5.0, 10.0, 1.0}, 0.2}};
        std::size_t tile_cells_x = 4;
        std::size_t tile_cells_y = 25;
        double cell_pitch = 0.0; // m; 0 selects lambda/2
        TileAmplitude tile_amplitude = TileAmplitude::unit;
        std::uint64_t master_seed = 1;

        double wavelength() const { return speed_of_light / carrier_frequency; }
        double wavenumber() const; // 2*pi*f_c/c
        double effective_cell_pitch() const { return cell_pitch > 0.0 ? cell_pitch : 0.5 * wavelength(); }
        Vec3 room_centroid() const { return (room_min + room_max) * 0.5; }
    };

    struct Violation
    {
        std::string field;
        std::string message;
    };

    // Default values plus any overrides found under the "scene." and "channel." namespaces
    ScenarioConfig scenario_from_config(const KeyValueFile &kv);
    // Inverse of scenario_from_config; every field written explicitly
    KeyValueFile scenario_to_config(const ScenarioConfig &config);
    std::string scenario_digest(const ScenarioConfig &config);

    // Throws ConfigError naming the offending segment when a length is not a multiple of its pitch
    std::vector<RisTile> build_ris_layout(const ScenarioConfig &config);

    // Empty result means the configuration is valid
    std::vector<Violation> validate_scenario(const ScenarioConfig &config);

    struct GridDims
    {
        std::size_t nx = 1, ny = 1;
        std::size_t count() const { return nx * ny; }
    };

    // Smallest aspect-preserving nx*ny >= n_target
    GridDims grid_dims_for(const SearchRegion &region, std::size_t n_target);

    // Cell centers of an nx-by-ny partition, x fastest
    std::vector<Vec3> sample_grid(const SearchRegion &region, GridDims dims);
    std::vector<Vec3> sample_grid(const SearchRegion &region, std::size_t n_target);
}

#endif
