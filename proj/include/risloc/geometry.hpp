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

#ifndef RISLOC_GEOMETRY_HPP
#define RISLOC_GEOMETRY_HPP

#include <cmath>

namespace risloc
{
    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;

        constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
        constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
        constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
        constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
        double norm() const { return std::sqrt(dot(*this)); }
        bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
        constexpr bool operator==(const Vec3 &) const = default;
    };

    inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

    // Horizontal (x, y) distance; z ignored
    inline double planar_distance(const Vec3 &a, const Vec3 &b) { return std::hypot(a.x - b.x, a.y - b.y); }

    // Candidate position in the estimator's 2-D search plane
    struct Vec2
    {
        double x = 0.0, y = 0.0;
        constexpr bool operator==(const Vec2 &) const = default;
    };

    // Wraps an angle to (-pi, pi]
    inline double wrap_phase(double phi)
    {
        constexpr double two_pi = 2.0 * M_PI;
        double w = std::remainder(phi, two_pi); // [-pi, pi]
        if (w <= -M_PI)
            w += two_pi;
        return w;
    }
}

#endif
