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

#include "risloc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace risloc
{
    std::string trim(const std::string &s)
    {
        auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c)
                                      { return std::isspace(c); });
        auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c)
                                     { return std::isspace(c); })
                        .base();
        return first < last ? std::string(first, last) : std::string();
    }

    std::vector<std::string> split(const std::string &s, char sep)
    {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s)
        {
            if (c == sep)
            {
                out.push_back(trim(cur));
                cur.clear();
            }
            else
                cur.push_back(c);
        }
        out.push_back(trim(cur));
        return out;
    }

    double parse_double(const std::string &text, const std::string &what)
    {
        const std::string t = trim(text);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
            throw ConfigError(what + ": not a number: '" + text + "'");
        return v;
    }

    std::uint64_t parse_u64(const std::string &text, const std::string &what)
    {
        const std::string t = trim(text);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
            throw ConfigError(what + ": not an unsigned integer: '" + text + "'");
        return v;
    }

    std::vector<double> parse_number_list(const std::string &text, const std::string &what)
    {
        std::vector<double> out;
        for (const auto &item : split(text, ','))
            out.push_back(parse_double(item, what));
        return out;
    }

    std::string format_double(double v)
    {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, ptr);
    }

    std::string digest_hex(const std::string &text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    KeyValueFile KeyValueFile::parse(const std::string &text, const std::string &origin)
    {
        KeyValueFile kv;
        kv.origin_ = origin;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            kv.values_[key].push_back(trim(line.substr(eq + 1)));
        }
        return kv;
    }

    KeyValueFile KeyValueFile::load(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    bool KeyValueFile::has(const std::string &key) const { return values_.count(key) != 0; }

    void KeyValueFile::set(const std::string &key, const std::string &value) { values_[key] = {value}; }

    const std::string &KeyValueFile::get(const std::string &key) const
    {
        return get_all(key).back();
    }

    const std::vector<std::string> &KeyValueFile::get_all(const std::string &key) const
    {
        auto it = values_.find(key);
        if (it == values_.end() || it->second.empty())
            throw ConfigError("missing config key: " + key);
        return it->second;
    }

    double KeyValueFile::get_double(const std::string &key, double fallback) const
    {
        return has(key) ? parse_double(get(key), key) : fallback;
    }

    std::uint64_t KeyValueFile::get_u64(const std::string &key, std::uint64_t fallback) const
    {
        return has(key) ? parse_u64(get(key), key) : fallback;
    }

    std::size_t KeyValueFile::get_size(const std::string &key, std::size_t fallback) const
    {
        return has(key) ? static_cast<std::size_t>(parse_u64(get(key), key)) : fallback;
    }

    std::string KeyValueFile::get_string(const std::string &key, const std::string &fallback) const
    {
        return has(key) ? get(key) : fallback;
    }

    bool KeyValueFile::get_bool(const std::string &key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string v = get(key);
        if (v == "true" || v == "1" || v == "yes" || v == "on")
            return true;
        if (v == "false" || v == "0" || v == "no" || v == "off")
            return false;
        throw ConfigError(key + ": not a boolean: '" + v + "'");
    }

    Vec3 KeyValueFile::get_vec3(const std::string &key, const Vec3 &fallback) const
    {
        if (!has(key))
            return fallback;
        const auto v = parse_number_list(get(key), key);
        if (v.size() != 3)
            throw ConfigError(key + ": expected three comma-separated numbers");
        return {v[0], v[1], v[2]};
    }

    std::string KeyValueFile::canonical() const
    {
        std::string out;
        for (const auto &[key, vals] : values_)
            for (const auto &v : vals)
                out += key + " = " + v + "\n";
        return out;
    }
}
