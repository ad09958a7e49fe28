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
#include <istream>
#include <ostream>
#include <sstream>

#include "risloc/optim.hpp"

namespace risloc
{
    namespace
    {
        std::size_t cells_along(double extent, double cell)
        {
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(extent / cell - 1e-9)));
        }
    }

    RegionMask::RegionMask(const SearchRegion &region, double cell_size)
        : origin_x_(region.x_min), origin_y_(region.y_min), cell_size_(cell_size)
    {
        if (!(cell_size > 0.0))
            throw std::invalid_argument("RegionMask: cell size must be positive");
        nx_ = cells_along(region.width(), cell_size);
        ny_ = cells_along(region.height(), cell_size);
        cells_.assign(nx_ * ny_, 0);
    }

    std::size_t RegionMask::count() const
    {
        return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
    }

    std::pair<std::size_t, std::size_t> RegionMask::cell_of(const Vec2 &p) const
    {
        auto index = [&](double v, double origin, std::size_t n)
        {
            const double f = std::floor((v - origin) / cell_size_);
            if (f < 0.0)
                return std::size_t{0};
            return std::min(n - 1, static_cast<std::size_t>(f));
        };
        return {index(p.x, origin_x_, nx_), index(p.y, origin_y_, ny_)};
    }

    bool RegionMask::contains(const Vec2 &p) const
    {
        if (nx_ == 0 || ny_ == 0)
            return false;
        const auto [i, j] = cell_of(p);
        return at(i, j);
    }

    bool RegionMask::covers(const SearchRegion &region) const
    {
        constexpr double eps = 1e-9;
        return nx_ > 0 && ny_ > 0 && std::abs(origin_x_ - region.x_min) < eps &&
               std::abs(origin_y_ - region.y_min) < eps &&
               origin_x_ + static_cast<double>(nx_) * cell_size_ >= region.x_max - eps &&
               origin_y_ + static_cast<double>(ny_) * cell_size_ >= region.y_max - eps &&
               origin_x_ + static_cast<double>(nx_ - 1) * cell_size_ < region.x_max - eps &&
               origin_y_ + static_cast<double>(ny_ - 1) * cell_size_ < region.y_max - eps;
    }

    Vec2 RegionMask::sample(const SearchRegion &region, CounterStream &rng) const
    {
        // Flagged cells clipped to the region, weighted by clipped area
        struct Rect
        {
            double x0, x1, y0, y1;
        };
        std::vector<Rect> rects;
        std::vector<double> cumulative;
        double total = 0.0;
        for (std::size_t j = 0; j < ny_; ++j)
            for (std::size_t i = 0; i < nx_; ++i)
            {
                if (!at(i, j))
                    continue;
                Rect r{std::max(region.x_min, origin_x_ + static_cast<double>(i) * cell_size_),
                       std::min(region.x_max, origin_x_ + static_cast<double>(i + 1) * cell_size_),
                       std::max(region.y_min, origin_y_ + static_cast<double>(j) * cell_size_),
                       std::min(region.y_max, origin_y_ + static_cast<double>(j + 1) * cell_size_)};
                const double area = std::max(0.0, r.x1 - r.x0) * std::max(0.0, r.y1 - r.y0);
                if (area <= 0.0)
                    continue;
                rects.push_back(r);
                total += area;
                cumulative.push_back(total);
            }
        if (rects.empty())
            throw std::invalid_argument("RegionMask::sample: no flagged cell intersects the region");
        const double u = rng.uniform() * total;
        const auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                cumulative.begin());
        const Rect &r = rects[std::min(k, rects.size() - 1)];
        const double x = rng.uniform(r.x0, r.x1);
        const double y = rng.uniform(r.y0, r.y1);
        return {x, y};
    }

    void RegionMask::write(std::ostream &out) const
    {
        out << "# risloc-regionmask v1\n";
        out << "# source = " << (source.empty() ? "-" : source) << "\n";
        out << "# threshold_cm = " << format_double(threshold) << "\n";
        out << "# origin = " << format_double(origin_x_) << ", " << format_double(origin_y_) << "\n";
        out << "# cell_size = " << format_double(cell_size_) << "\n";
        out << "# dims = " << nx_ << "x" << ny_ << "\n";
        out << "# rows run from y = origin upwards; columns from x = origin rightwards\n";
        for (std::size_t j = 0; j < ny_; ++j)
        {
            for (std::size_t i = 0; i < nx_; ++i)
                out << (i ? " " : "") << (at(i, j) ? '1' : '0');
            out << '\n';
        }
    }

    RegionMask RegionMask::read(std::istream &in)
    {
        RegionMask m;
        bool have_origin = false, have_cell = false, have_dims = false;
        std::vector<std::vector<std::uint8_t>> rows;
        std::string line;
        while (std::getline(in, line))
        {
            if (trim(line).empty())
                continue;
            if (line[0] == '#')
            {
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                    continue;
                const std::string key = trim(line.substr(1, eq - 1));
                const std::string val = trim(line.substr(eq + 1));
                if (key == "source")
                    m.source = val == "-" ? "" : val;
                else if (key == "threshold_cm")
                    m.threshold = parse_double(val, key);
                else if (key == "origin")
                {
                    const auto v = parse_number_list(val, key);
                    if (v.size() != 2)
                        throw ConfigError("region mask: origin needs two numbers");
                    m.origin_x_ = v[0];
                    m.origin_y_ = v[1];
                    have_origin = true;
                }
                else if (key == "cell_size")
                {
                    m.cell_size_ = parse_double(val, key);
                    have_cell = m.cell_size_ > 0.0;
                }
                else if (key == "dims")
                {
                    const auto x = val.find('x');
                    if (x == std::string::npos)
                        throw ConfigError("region mask: dims must read NXxNY");
                    m.nx_ = parse_u64(val.substr(0, x), key);
                    m.ny_ = parse_u64(val.substr(x + 1), key);
                    have_dims = true;
                }
                continue;
            }
            std::istringstream ls(line);
            std::vector<std::uint8_t> row;
            int v;
            while (ls >> v)
            {
                if (v != 0 && v != 1)
                    throw ConfigError("region mask: cells must be 0 or 1");
                row.push_back(static_cast<std::uint8_t>(v));
            }
            rows.push_back(std::move(row));
        }
        if (!have_origin || !have_cell || !have_dims)
            throw ConfigError("region mask: missing origin, cell_size or dims header");
        if (rows.size() != m.ny_)
            throw ConfigError("region mask: expected " + std::to_string(m.ny_) + " rows, found " +
                              std::to_string(rows.size()));
        m.cells_.assign(m.nx_ * m.ny_, 0);
        for (std::size_t j = 0; j < m.ny_; ++j)
        {
            if (rows[j].size() != m.nx_)
                throw ConfigError("region mask: row " + std::to_string(j) + " has the wrong width");
            for (std::size_t i = 0; i < m.nx_; ++i)
                m.set(i, j, rows[j][i] != 0);
        }
        return m;
    }
}
