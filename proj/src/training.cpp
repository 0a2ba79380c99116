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

#include "fddmimo/training.hpp"

#include <cmath>
#include <stdexcept>

namespace fddmimo
{

namespace
{

void check_dims(const ChannelCovariance &cov, const TrainingDesign &design)
{
    if (design.matrix.n_rows != cov.dim())
        throw std::invalid_argument("training: design rows must match covariance dimension");
}

// sum_n R_n X (I + X' R_n X)^-1, the unnormalized fixed-point map.
arma::cx_mat cmi_gradient_map(const std::vector<ChannelCovariance> &covs, const arma::cx_mat &x)
{
    const arma::uword tau = x.n_cols;
    arma::cx_mat g(x.n_rows, tau, arma::fill::zeros);
    const arma::cx_mat eye = arma::eye<arma::cx_mat>(tau, tau);
    for (const ChannelCovariance &cov : covs)
    {
        const arma::cx_mat rx = cov.matrix() * x;
        const arma::cx_mat a = eye + x.t() * rx;
        g += arma::solve(a, rx.t(), arma::solve_opts::likely_sympd).t();
    }
    return g;
}

}  // namespace

arma::cx_vec training_observation(const TrainingDesign &design, const arma::cx_vec &channel, StreamRng &rng)
{
    if (design.matrix.n_rows != channel.n_elem)
        throw std::invalid_argument("training_observation: channel length must match design rows");
    return design.matrix.t() * channel + rng.cgaussian_vec(design.length());
}

arma::cx_mat training_error_covariance(const ChannelCovariance &cov, const TrainingDesign &design)
{
    check_dims(cov, design);
    const arma::cx_mat &r = cov.matrix();
    const arma::cx_mat rx = r * design.matrix;
    const arma::cx_mat a =
        arma::eye<arma::cx_mat>(design.length(), design.length()) + design.matrix.t() * rx;
    arma::cx_mat c = r - rx * arma::solve(a, rx.t(), arma::solve_opts::likely_sympd);
    return 0.5 * (c + c.t());
}

TrainingEstimate mmse_estimate(const ChannelCovariance &cov, const TrainingDesign &design,
                               const arma::cx_vec &observation)
{
    check_dims(cov, design);
    if (observation.n_elem != design.length())
        throw std::invalid_argument("mmse_estimate: observation length must match design columns");

    const arma::cx_mat rx = cov.matrix() * design.matrix;
    const arma::cx_mat a =
        arma::eye<arma::cx_mat>(design.length(), design.length()) + design.matrix.t() * rx;

    TrainingEstimate est;
    est.estimate = rx * arma::solve(a, observation, arma::solve_opts::likely_sympd);
    est.error_covariance = training_error_covariance(cov, design);
    return est;
}

double total_training_mse(const std::vector<ChannelCovariance> &covs, const TrainingDesign &design)
{
    double mse = 0.0;
    for (const ChannelCovariance &cov : covs)
        mse += arma::trace(training_error_covariance(cov, design)).real();
    return mse;
}

double cmi_objective(const std::vector<ChannelCovariance> &covs, const TrainingDesign &design)
{
    double bits = 0.0;
    const arma::cx_mat eye = arma::eye<arma::cx_mat>(design.length(), design.length());
    for (const ChannelCovariance &cov : covs)
    {
        check_dims(cov, design);
        const arma::cx_mat a = eye + design.matrix.t() * cov.matrix() * design.matrix;
        bits += arma::log_det_sympd(0.5 * (a + a.t()));
    }
    return bits / std::log(2.0);
}

KktCheck kkt_check(const std::vector<ChannelCovariance> &covs, const TrainingDesign &design)
{
    const arma::cx_mat &x = design.matrix;
    const double xnorm2 = std::pow(arma::norm(x, "fro"), 2);
    if (xnorm2 == 0.0)
        throw std::invalid_argument("kkt_check: zero design");
    const arma::cx_mat g = cmi_gradient_map(covs, x);

    KktCheck out;
    out.lambda = arma::accu(arma::real(arma::conj(x) % g)) / xnorm2;
    out.residual = arma::norm(g - out.lambda * x, "fro") / std::sqrt(xnorm2);
    return out;
}

TrainingOptimization optimize_training(const std::vector<ChannelCovariance> &covs, arma::uword tau, double power,
                                       const arma::cx_mat *init, double tol, arma::uword max_iter)
{
    if (covs.empty())
        throw std::invalid_argument("optimize_training: need at least one covariance");
    if (tau < 1)
        throw std::invalid_argument("optimize_training: tau must be at least 1");
    if (power <= 0.0)
        throw std::invalid_argument("optimize_training: power must be positive");
    const arma::uword m = covs.front().dim();
    const double budget = static_cast<double>(tau) * power;

    arma::cx_mat x;
    if (init != nullptr)
    {
        if (init->n_rows != m || init->n_cols != tau)
            throw std::invalid_argument("optimize_training: init has wrong shape");
        if (arma::norm(*init, "fro") == 0.0)
            throw std::invalid_argument("optimize_training: init must be nonzero");
        x = *init;
    }
    else
    {
        x = arma::zeros<arma::cx_mat>(m, tau);
        for (arma::uword t = 0; t < tau; ++t)
            x(t % m, t) += 1.0;
    }
    x *= std::sqrt(budget) / arma::norm(x, "fro");

    TrainingOptimization result;
    double step = arma::datum::inf;
    arma::uword it = 0;
    for (; it < max_iter; ++it)
    {
        arma::cx_mat next = cmi_gradient_map(covs, x);
        const double gnorm = arma::norm(next, "fro");
        if (gnorm == 0.0)
            throw std::runtime_error("optimize_training: iteration collapsed to zero");
        next *= std::sqrt(budget) / gnorm;
        step = arma::norm(next - x, "fro");
        x = std::move(next);
        if (step < tol)
        {
            ++it;
            break;
        }
    }

    result.design = TrainingDesign{x, budget};
    result.converged = step < tol;
    result.iterations = it;
    result.last_step = step;
    const KktCheck kkt = kkt_check(covs, result.design);
    result.kkt_residual = kkt.residual;
    result.lambda = kkt.lambda;
    result.cmi = cmi_objective(covs, result.design);
    return result;
}

TrainingDesign unitary_training(arma::uword m, arma::uword tau, double power)
{
    if (m < 1 || tau < 1)
        throw std::invalid_argument("unitary_training: dimensions must be positive");
    if (power <= 0.0)
        throw std::invalid_argument("unitary_training: power must be positive");

    arma::cx_mat x(m, tau);
    if (tau >= m)
    {
        // Rows are m distinct DFT-tone sequences of length tau: X X' = (tau P / m) I.
        const double amp = std::sqrt(static_cast<double>(tau) * power / static_cast<double>(m)) /
                           std::sqrt(static_cast<double>(tau));
        for (arma::uword r = 0; r < m; ++r)
            for (arma::uword t = 0; t < tau; ++t)
                x(r, t) = amp * std::polar(1.0, -2.0 * M_PI * static_cast<double>(r * t) / static_cast<double>(tau));
    }
    else
    {
        // Columns are tau orthonormal DFT vectors of length m, scaled: X'X = P I.
        const double amp = std::sqrt(power / static_cast<double>(m));
        for (arma::uword r = 0; r < m; ++r)
            for (arma::uword t = 0; t < tau; ++t)
                x(r, t) = amp * std::polar(1.0, -2.0 * M_PI * static_cast<double>(r * t) / static_cast<double>(m));
    }
    return TrainingDesign{std::move(x), static_cast<double>(tau) * power};
}

}  // namespace fddmimo
