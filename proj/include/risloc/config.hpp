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

#ifndef RISLOC_CONFIG_HPP
#define RISLOC_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace risloc
{
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Flat "module.key = value" file. Lines starting with '#' are comments.
    // A key may repeat; all values are kept in file order.
    class KeyValueFile
    {
    public:
        KeyValueFile() = default;

        static KeyValueFile parse(const std::string &text, const std::string &origin = "<string>");
        static KeyValueFile load(const std::string &path);

        bool has(const std::string &key) const;
        void set(const std::string &key, const std::string &value); // replaces all values of key

        // Last value of key; throws ConfigError if missing
        const std::string &get(const std::string &key) const;
        const std::vector<std::string> &get_all(const std::string &key) const;

        double get_double(const std::string &key, double fallback) const;
        std::uint64_t get_u64(const std::string &key, std::uint64_t fallback) const;
        std::size_t get_size(const std::string &key, std::size_t fallback) const;
        std::string get_string(const std::string &key, const std::string &fallback) const;
        bool get_bool(const std::string &key, bool fallback) const;
        Vec3 get_vec3(const std::string &key, const Vec3 &fallback) const;

        // Canonical "key = value" text, keys sorted; used for digests
        std::string canonical() const;

        const std::string &origin() const { return origin_; }

    private:
        std::map<std::string, std::vector<std::string>> values_;
        std::string origin_;
    };

    // Helpers shared by the loaders and the file formats
    std::vector<double> parse_number_list(const std::string &text, const std::string &what);
    double parse_double(const std::string &text, const std::string &what);
    std::uint64_t parse_u64(const std::string &text, const std::string &what);
    std::string trim(const std::string &s);
    std::vector<std::string> split(const std::string &s, char sep);

    // Shortest round-trip decimal representation of a double
    std::string format_double(double v);

    // 64-bit FNV-1a digest rendered as 16 hex digits
    std::string digest_hex(const std::string &text);
}

#endif
