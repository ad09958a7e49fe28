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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "risloc/harness.hpp"

namespace risloc
{
    namespace
    {
        constexpr const char *magic = "risloc-errormap v1";
        constexpr const char *columns = "x_m,y_m,est_x_m,est_y_m,error_cm,final_cost,evaluations,wall_time_s,seed";

        std::string region_text(const SearchRegion &r)
        {
            return format_double(r.x_min) + ", " + format_double(r.x_max) + ", " + format_double(r.y_min) + ", " +
                   format_double(r.y_max) + ", " + format_double(r.z_fixed);
        }

        void write_header(std::ostream &out, const ErrorMap &m, bool with_wall_times)
        {
            out << "# " << magic << "\n";
            if (with_wall_times)
                out << "# status = " << (m.complete ? "complete" : "in-progress") << "\n";
            out << "# scenario_digest = " << m.scenario_digest << "\n";
            out << "# optimizer = " << m.optimizer << "\n";
            out << "# params_digest = " << m.params_digest << "\n";
            out << "# master_seed = " << m.master_seed << "\n";
            out << "# pass = " << m.pass << "\n";
            out << "# resolution = " << m.resolution.nx << "x" << m.resolution.ny << "\n";
            out << "# region = " << region_text(m.region) << "\n";
            out << "# pin_schedule = " << (m.pin_schedule ? "true" : "false") << "\n";
            out << "# mask_source = " << (m.mask_source.empty() ? "-" : m.mask_source) << "\n";
            std::istringstream params(m.params.canonical());
            std::string line;
            while (std::getline(params, line))
                out << "# " << line << "\n";
        }

        void write_row(std::ostream &out, const ErrorRecord &r, bool with_wall_time)
        {
            out << format_double(r.truth.x) << ',' << format_double(r.truth.y) << ',' << format_double(r.estimate.x)
                << ',' << format_double(r.estimate.y) << ',' << format_double(r.error_cm) << ','
                << format_double(r.final_cost) << ',' << r.evaluations << ','
                << (with_wall_time ? format_double(r.wall_time) : std::string("-")) << ',' << r.seed << '\n';
        }

        ErrorRecord parse_record(const std::string &line)
        {
            const auto f = split(line, ',');
            if (f.size() != 9)
                throw ConfigError("error map: expected 9 columns, found " + std::to_string(f.size()));
            ErrorRecord r;
            r.truth = {parse_double(f[0], "x_m"), parse_double(f[1], "y_m")};
            r.estimate = {parse_double(f[2], "est_x_m"), parse_double(f[3], "est_y_m")};
            r.error_cm = parse_double(f[4], "error_cm");
            r.final_cost = parse_double(f[5], "final_cost");
            r.evaluations = parse_u64(f[6], "evaluations");
            r.wall_time = parse_double(f[7], "wall_time_s");
            r.seed = parse_u64(f[8], "seed");
            return r;
        }
    }

    void ErrorMap::write(std::ostream &out) const
    {
        write_header(out, *this, true);
        out << columns << '\n';
        for (const auto &r : records)
            write_row(out, r, true);
    }

    void ErrorMap::write_record(std::ostream &out, const ErrorRecord &r) { write_row(out, r, true); }

    ErrorMap ErrorMap::read(std::istream &in)
    {
        ErrorMap m;
        m.complete = false;
        std::string line;
        bool have_magic = false, have_columns = false, have_status = false;
        std::vector<std::string> rows;
        while (std::getline(in, line))
        {
            if (trim(line).empty())
                continue;
            if (line[0] == '#')
            {
                if (trim(line.substr(1)) == magic)
                {
                    have_magic = true;
                    continue;
                }
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                    continue;
                const std::string key = trim(line.substr(1, eq - 1));
                const std::string val = trim(line.substr(eq + 1));
                if (key == "status")
                {
                    have_status = true;
                    m.complete = val == "complete";
                }
                else if (key == "scenario_digest")
                    m.scenario_digest = val;
                else if (key == "optimizer")
                    m.optimizer = val;
                else if (key == "params_digest")
                    m.params_digest = val;
                else if (key == "master_seed")
                    m.master_seed = parse_u64(val, key);
                else if (key == "pass")
                    m.pass = val;
                else if (key == "resolution")
                {
                    const auto x = val.find('x');
                    if (x == std::string::npos)
                        throw ConfigError("error map: resolution must read NXxNY");
                    m.resolution = {parse_u64(val.substr(0, x), key), parse_u64(val.substr(x + 1), key)};
                }
                else if (key == "region")
                {
                    const auto v = parse_number_list(val, key);
                    if (v.size() != 5)
                        throw ConfigError("error map: region needs x_min, x_max, y_min, y_max, z");
                    m.region = {v[0], v[1], v[2], v[3], v[4]};
                }
                else if (key == "pin_schedule")
                    m.pin_schedule = val == "true";
                else if (key == "mask_source")
                    m.mask_source = val == "-" ? "" : val;
                else if (key.rfind("optim.", 0) == 0)
                    m.params.set(key, val);
                continue;
            }
            if (!have_columns)
            {
                if (trim(line) != columns)
                    throw ConfigError("error map: unexpected column header '" + line + "'");
                have_columns = true;
                continue;
            }
            rows.push_back(line);
        }
        if (!have_magic || !have_columns || !have_status)
            throw ConfigError("error map: missing header block");

        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            try
            {
                m.records.push_back(parse_record(rows[i]));
            }
            catch (const ConfigError &)
            {
                // A run killed mid-write can leave a truncated last line
                if (m.complete || i + 1 != rows.size())
                    throw;
            }
        }
        return m;
    }

    ErrorMap ErrorMap::load(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open error map '" + path + "'");
        try
        {
            return read(in);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path + ": " + e.what());
        }
    }

    void ErrorMap::save(const std::string &path) const
    {
        const std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out)
                throw HarnessError("cannot write '" + tmp + "'");
            write(out);
            out.flush();
            if (!out)
                throw HarnessError("write to '" + tmp + "' failed");
        }
        std::filesystem::rename(tmp, path);
    }

    std::string ErrorMap::content_digest() const
    {
        std::ostringstream s;
        write_header(s, *this, false);
        for (const auto &r : records)
            write_row(s, r, false);
        return digest_hex(s.str());
    }

    std::vector<std::string> ErrorMap::violations(double tolerance_cm) const
    {
        std::vector<std::string> v;
        const auto grid = sample_grid(region, resolution);
        if (records.size() != grid.size())
            v.push_back("record count " + std::to_string(records.size()) + " differs from grid size " +
                        std::to_string(grid.size()));
        const std::size_t n = std::min(records.size(), grid.size());
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto &r = records[i];
            if (r.truth.x != grid[i].x || r.truth.y != grid[i].y)
                v.push_back("record " + std::to_string(i) + " is not at its grid point");
            if (!region.contains(r.estimate))
                v.push_back("record " + std::to_string(i) + " estimate outside the search region");
            const double e = planar_error_cm(region.lift(r.estimate), region.lift(r.truth));
            if (!(std::abs(e - r.error_cm) <= tolerance_cm))
                v.push_back("record " + std::to_string(i) + " error " + format_double(r.error_cm) +
                            " cm does not match its positions (" + format_double(e) + " cm)");
        }
        return v;
    }
}
