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

#ifndef FDDMIMO_RNG_HPP
#define FDDMIMO_RNG_HPP

#include <armadillo>
#include <complex>
#include <cstdint>

namespace fddmimo
{

// Deterministic counter-style random stream. Streams are derived by hashing
// (seed, tag, trial, user) so that serial and parallel execution orders
// produce bit-identical draws. std::normal_distribution is deliberately not
// used; its output is not reproducible across standard library versions.
class StreamRng
{
  public:
    explicit StreamRng(std::uint64_t key);

    // Independent stream for a (seed, tag, trial, user) coordinate.
    static StreamRng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t trial = 0, std::uint64_t user = 0);

    // Fresh stream keyed off this one's identity (not its position).
    StreamRng derive(std::uint64_t tag) const;

    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double uniform(double lo, double hi);
    double gaussian();  // real N(0, 1)

    // CN(0, 1): variance 1/2 per real component.
    std::complex<double> cgaussian();
    arma::cx_vec cgaussian_vec(arma::uword n);
    arma::cx_mat cgaussian_mat(arma::uword rows, arma::uword cols);

    // Isotropically distributed unit-norm complex vector.
    arma::cx_vec unit_vector(arma::uword n);

  private:
    std::uint64_t key_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fddmimo

#endif
