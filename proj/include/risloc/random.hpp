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

#ifndef RISLOC_RANDOM_HPP
#define RISLOC_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace risloc
{
    // SplitMix64 finalizer
    constexpr std::uint64_t mix64(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

    constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b)
    {
        return mix64(a ^ mix64(b + golden_gamma));
    }

    constexpr std::uint64_t hash_string(std::string_view s)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s)
        {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return mix64(h);
    }

    // Derives an independent key for a named consumer of a seed
    constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose)
    {
        return hash_combine(seed, hash_string(purpose));
    }

    // Counter-based stream: the i-th draw is a pure function of (key, i).
    // Satisfies UniformRandomBitGenerator.
    class CounterStream
    {
    public:
        using result_type = std::uint64_t;

        explicit constexpr CounterStream(std::uint64_t key) : key_(mix64(key)) {}

        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

        constexpr result_type operator()() { return mix64(key_ + (++counter_) * golden_gamma); }

        // [0, 1)
        double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
        // (0, 1]
        double uniform_open_low() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // [0, n), n >= 1
        std::uint64_t below(std::uint64_t n)
        {
            return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
        }

        std::uint64_t draws() const { return counter_; }

    private:
        std::uint64_t key_;
        std::uint64_t counter_ = 0;
    };
}

#endif
