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

#include "fddmimo/deterministic_equivalents.hpp"

#include <cmath>

#include "json.hpp"

namespace fddmimo
{

namespace
{

// tr(A B) for square matrices without forming the product.
double product_trace(const arma::cx_mat &a, const arma::cx_mat &b)
{
    return arma::accu(a % b.st()).real();
}

void check_input(const DeInput &input)
{
    const std::size_t n = input.estimate_covariances.size();
    if (n == 0 || input.true_covariances.size() != n)
        throw std::invalid_argument("deterministic equivalents: covariance lists must be non-empty and matched");
    const arma::uword m = input.estimate_covariances.front().n_rows;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (input.estimate_covariances[i].n_rows != m || input.estimate_covariances[i].n_cols != m ||
            input.true_covariances[i].n_rows != m || input.true_covariances[i].n_cols != m)
            throw std::invalid_argument("deterministic equivalents: covariance shape mismatch");
    }
    if (input.regularization <= 0.0)
        throw std::invalid_argument("deterministic equivalents: regularization must be positive");
    if (input.power <= 0.0)
        throw std::invalid_argument("deterministic equivalents: power must be positive");
}

arma::cx_mat resolvent(const DeInput &input, const arma::vec &e_bar)
{
    const arma::uword m = input.estimate_covariances.front().n_rows;
    arma::cx_mat w(m, m, arma::fill::zeros);
    for (std::size_t j = 0; j < input.estimate_covariances.size(); ++j)
        w += input.estimate_covariances[j] / (static_cast<double>(m) * (1.0 + e_bar(j)));
    w.diag() += input.regularization;
    arma::cx_mat t;
    if (!arma::inv_sympd(t, w))
        t = arma::inv(w);
    return t;
}

struct PicardResult
{
    arma::vec e_bar;
    bool converged = false;
    arma::uword iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};

PicardResult picard(const DeInput &input, arma::vec e_bar, double tol, arma::uword max_iter, double damping)
{
    const arma::uword m = input.estimate_covariances.front().n_rows;
    const arma::uword n = input.estimate_covariances.size();

    PicardResult out;
    out.history.reserve(64);
    for (arma::uword it = 1; it <= max_iter; ++it)
    {
        const arma::cx_mat t = resolvent(input, e_bar);
        arma::vec next(n);
        for (arma::uword i = 0; i < n; ++i)
            next(i) = product_trace(input.estimate_covariances[i], t) / static_cast<double>(m);

        const double step = arma::abs(next - e_bar).max();
        out.history.push_back(step);
        if (step < tol)
        {
            out.e_bar = next;
            out.converged = true;
            out.iterations = it;
            out.residual = step;
            return out;
        }
        e_bar = damping * next + (1.0 - damping) * e_bar;
    }
    out.e_bar = e_bar;
    out.iterations = max_iter;
    out.residual = out.history.empty() ? 0.0 : out.history.back();
    return out;
}

}  // namespace

DeState solve_fixed_point(const DeInput &input, double tol, arma::uword max_iter, const arma::vec *warm_start)
{
    check_input(input);
    const arma::uword m = input.estimate_covariances.front().n_rows;
    const arma::uword n = input.estimate_covariances.size();

    arma::vec start(n);
    if (warm_start != nullptr && warm_start->n_elem == n && warm_start->min() >= 0.0)
        start = *warm_start;
    else
        for (arma::uword i = 0; i < n; ++i)
            start(i) = arma::trace(input.estimate_covariances[i]).real() /
                       (static_cast<double>(m) * input.regularization);

    PicardResult fp = picard(input, start, tol, max_iter, 0.5);
    if (!fp.converged)
    {
        PicardResult retry = picard(input, start, tol, max_iter, 1.0);
        if (retry.converged)
            fp = std::move(retry);
        else
        {
            fp.history.insert(fp.history.end(), retry.history.begin(), retry.history.end());
            throw ConvergenceError("deterministic equivalents: fixed point did not converge", fp.history);
        }
    }

    DeState state;
    state.e_bar = fp.e_bar;
    state.converged = true;
    state.iterations = fp.iterations;
    state.residual = fp.residual;
    state.residual_history = std::move(fp.history);
    state.t_matrix = resolvent(input, state.e_bar);

    const arma::cx_mat &t = state.t_matrix;
    std::vector<arma::cx_mat> s(n);
    for (arma::uword i = 0; i < n; ++i)
        s[i] = input.estimate_covariances[i] * t;

    // Pairwise traces feed J (scaled columns) and the c_n right-hand sides.
    arma::mat pair_traces(n, n);
    for (arma::uword i = 0; i < n; ++i)
        for (arma::uword j = i; j < n; ++j)
        {
            const double val = product_trace(s[i], s[j]) / static_cast<double>(m);
            pair_traces(i, j) = val;
            pair_traces(j, i) = val;
        }

    state.v.set_size(n);
    for (arma::uword i = 0; i < n; ++i)
        state.v(i) = product_trace(s[i], t) / static_cast<double>(m);

    const arma::vec load = arma::square(1.0 + state.e_bar);
    state.j_matrix.set_size(n, n);
    for (arma::uword i = 0; i < n; ++i)
        for (arma::uword j = 0; j < n; ++j)
            state.j_matrix(i, j) = pair_traces(i, j) / (static_cast<double>(m) * load(j));

    const arma::mat system = arma::eye(n, n) - state.j_matrix;
    arma::mat b_rhs(n, n);  // column u holds b_u
    for (arma::uword u = 0; u < n; ++u)
    {
        const arma::cx_mat q = (input.true_covariances[u] - input.estimate_covariances[u]) * t;
        for (arma::uword i = 0; i < n; ++i)
            b_rhs(i, u) = product_trace(s[i], q) / static_cast<double>(m);
    }

    arma::mat d_all, f_all;
    arma::vec e_prime;
    const bool ok = arma::solve(e_prime, system, state.v) && arma::solve(d_all, system, b_rhs) &&
                    arma::solve(f_all, system, pair_traces);
    if (!ok)
        throw std::runtime_error("deterministic equivalents: (I - J) system is singular");
    state.e_prime = e_prime;

    state.phi = arma::accu(state.e_prime / load) / static_cast<double>(m);
    state.e_cap.set_size(n);
    state.i_cap.set_size(n);
    state.u.set_size(n);
    for (arma::uword u = 0; u < n; ++u)
    {
        state.e_cap(u) = d_all(u, u) / (static_cast<double>(m) * load(u));
        double usum = 0.0, dsum = 0.0;
        for (arma::uword j = 0; j < n; ++j)
        {
            if (j == u)
                continue;
            usum += f_all(j, u) / load(j);
            dsum += d_all(j, u) / (static_cast<double>(m) * load(j));
        }
        state.u(u) = usum / static_cast<double>(m);
        state.i_cap(u) = state.u(u) / load(u) + dsum;
    }
    return state;
}

arma::vec de_sinr(const DeState &state, const DeInput &input)
{
    if (!state.converged)
        throw std::invalid_argument("de_sinr: state is not converged");
    const arma::uword n = state.e_bar.n_elem;
    arma::vec sinr(n);
    for (arma::uword u = 0; u < n; ++u)
    {
        const double load = std::pow(1.0 + state.e_bar(u), 2);
        const double num = state.e_bar(u) * state.e_bar(u) / load;
        const double den = state.phi / input.power + state.e_cap(u) + state.i_cap(u);
        sinr(u) = (num > 0.0 && den > 0.0) ? num / den : 0.0;
    }
    return sinr;
}

std::string de_state_to_json(const DeState &state)
{
    nlohmann::json j;
    j["e_bar"] = std::vector<double>(state.e_bar.begin(), state.e_bar.end());
    j["e_prime"] = std::vector<double>(state.e_prime.begin(), state.e_prime.end());
    j["phi"] = state.phi;
    j["converged"] = state.converged;
    j["iterations"] = state.iterations;
    j["residual"] = state.residual;
    j["residual_history"] = state.residual_history;
    return j.dump();
}

}  // namespace fddmimo
