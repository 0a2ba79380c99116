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

#include "fddmimo/precoding_rate.hpp"

#include <cmath>
#include <stdexcept>

namespace fddmimo
{

namespace
{

arma::cx_mat regularized_inverse(const arma::cx_mat &estimates, double alpha)
{
    const arma::uword m = estimates.n_cols;
    arma::cx_mat gram = estimates.t() * estimates;
    gram.diag() += static_cast<double>(m) * alpha;
    arma::cx_mat k;
    if (!arma::inv_sympd(k, gram))
        k = arma::inv(gram);  // alpha > 0 keeps this well posed; sympd can still balk on round-off
    return k;
}

}  // namespace

Precoder rzf_precode(const arma::cx_mat &estimates, const PrecoderConfig &config)
{
    if (config.regularization <= 0.0)
        throw std::invalid_argument("rzf_precode: regularization must be positive");
    if (estimates.n_rows == 0 || estimates.n_cols == 0)
        throw std::invalid_argument("rzf_precode: empty estimate stack");
    if (arma::norm(estimates, "fro") == 0.0)
        throw std::invalid_argument("rzf_precode: all-zero estimates cannot be power-normalized");

    const arma::cx_mat k = regularized_inverse(estimates, config.regularization);
    const arma::cx_mat kh = k * estimates.t();  // M x N
    const double denom = std::pow(arma::norm(kh, "fro"), 2);  // tr[H K^2 H']
    const double zeta = std::sqrt(static_cast<double>(estimates.n_rows) / denom);

    return Precoder{zeta * kh, zeta};
}

SinrTerms sinr_terms(const arma::cx_mat &estimates, const arma::cx_mat &errors, const PrecoderConfig &config)
{
    if (arma::size(estimates) != arma::size(errors))
        throw std::invalid_argument("sinr_terms: estimate/error shape mismatch");
    const arma::uword n = estimates.n_rows;
    if (n != config.num_users)
        throw std::invalid_argument("sinr_terms: row count must equal num_users");

    const arma::cx_mat k = regularized_inverse(estimates, config.regularization);
    const arma::cx_mat kh = k * estimates.t();                    // columns K h_hat_n
    const double zeta2 = static_cast<double>(n) / std::pow(arma::norm(kh, "fro"), 2);
    const arma::cx_mat truth = estimates + errors;

    const arma::cx_mat sig = estimates * kh;    // (n, j) = h_hat_n' K h_hat_j
    const arma::cx_mat mis = errors * kh;       // (n, j) = eps_n' K h_hat_j
    const arma::cx_mat cross = estimates * (k * truth.t());  // (j, n) = h_hat_j' K h_n

    SinrTerms terms;
    terms.signal.set_size(n);
    terms.denominator.set_size(n);
    for (arma::uword u = 0; u < n; ++u)
    {
        double interference = 0.0;
        for (arma::uword j = 0; j < n; ++j)
            if (j != u)
                interference += std::norm(cross(j, u));
        const double mismatch = std::norm(mis(u, u));
        const double noise = static_cast<double>(n) / (config.total_power * zeta2);
        terms.signal(u) = std::norm(sig(u, u));
        terms.denominator(u) = noise + mismatch + interference;
    }
    return terms;
}

arma::vec sinr_per_user(const arma::cx_mat &estimates, const arma::cx_mat &errors, const PrecoderConfig &config)
{
    const SinrTerms terms = sinr_terms(estimates, errors, config);
    return terms.signal / terms.denominator;
}

double feedback_overhead(double bits_per_user, const OverheadModel &overhead, arma::uword m, arma::uword n)
{
    if (bits_per_user < 0.0)
        throw std::invalid_argument("feedback_overhead: bits must be nonnegative");
    if (overhead.kappa <= 0.0 || overhead.kappa > 1.0)
        throw std::invalid_argument("feedback_overhead: kappa must lie in (0, 1]");
    const double snr_term = static_cast<double>(m) * overhead.uplink_snr;
    if (snr_term <= 1.0)
        throw std::invalid_argument("feedback_overhead: M * SNR_ul must exceed 1");
    const double capacity =
        overhead.kappa * static_cast<double>(std::min(m, n)) * std::log2(snr_term);
    return static_cast<double>(n) * bits_per_user / capacity;
}

double bits_for_overhead(double symbols, const OverheadModel &overhead, arma::uword m, arma::uword n)
{
    if (symbols < 0.0)
        throw std::invalid_argument("bits_for_overhead: symbols must be nonnegative");
    const double snr_term = static_cast<double>(m) * overhead.uplink_snr;
    if (snr_term <= 1.0)
        throw std::invalid_argument("bits_for_overhead: M * SNR_ul must exceed 1");
    const double capacity =
        overhead.kappa * static_cast<double>(std::min(m, n)) * std::log2(snr_term);
    return symbols * capacity / static_cast<double>(n);
}

double sum_rate(const arma::vec &sinr)
{
    double rate = 0.0;
    for (arma::uword i = 0; i < sinr.n_elem; ++i)
        rate += std::log2(1.0 + std::max(0.0, sinr(i)));
    return rate;
}

}  // namespace fddmimo
