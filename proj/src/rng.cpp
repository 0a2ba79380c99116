// fddmimo - FDD massive MIMO link-level simulation library
// Copyright (C) 2026 fddmimo contributors
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

#include "fddmimo/rng.hpp"

#include <cmath>

namespace fddmimo
{

namespace
{

// SplitMix64 finalizer (Vigna / Steele et al.), also used as the key mixer.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t key) : key_(key), state_(key) {}

StreamRng StreamRng::stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t trial, std::uint64_t user)
{
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ mix64(tag ^ 0xa0761d6478bd642fULL));
    k = mix64(k ^ mix64(trial ^ 0xe7037ed1a0b428dbULL));
    k = mix64(k ^ mix64(user ^ 0x8ebc6af09c88c6e3ULL));
    return StreamRng(k);
}

StreamRng StreamRng::derive(std::uint64_t tag) const
{
    return StreamRng(mix64(key_ ^ mix64(tag ^ 0x589965cc75374cc3ULL)));
}

std::uint64_t StreamRng::next_u64()
{
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double StreamRng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double StreamRng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double StreamRng::gaussian()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
}

std::complex<double> StreamRng::cgaussian()
{
    const double s = M_SQRT1_2;
    return {s * gaussian(), s * gaussian()};
}

arma::cx_vec StreamRng::cgaussian_vec(arma::uword n)
{
    arma::cx_vec v(n);
    for (arma::uword i = 0; i < n; ++i)
        v(i) = cgaussian();
    return v;
}

arma::cx_mat StreamRng::cgaussian_mat(arma::uword rows, arma::uword cols)
{
    arma::cx_mat m(rows, cols);
    for (arma::uword c = 0; c < cols; ++c)
        for (arma::uword r = 0; r < rows; ++r)
            m(r, c) = cgaussian();
    return m;
}

arma::cx_vec StreamRng::unit_vector(arma::uword n)
{
    arma::cx_vec v = cgaussian_vec(n);
    double nrm = arma::norm(v);
    while (nrm == 0.0)
    {
        v = cgaussian_vec(n);
        nrm = arma::norm(v);
    }
    return v / nrm;
}

}  // namespace fddmimo
