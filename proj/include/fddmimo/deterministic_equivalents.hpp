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

#ifndef FDDMIMO_DETERMINISTIC_EQUIVALENTS_HPP
#define FDDMIMO_DETERMINISTIC_EQUIVALENTS_HPP

#include <armadillo>
#include <stdexcept>
#include <string>
#include <vector>

namespace fddmimo
{

// Inputs of the large-system SINR approximation: per-user estimate
// covariances (what the precoder sees) and true covariances.
struct DeInput
{
    std::vector<arma::cx_mat> estimate_covariances;
    std::vector<arma::cx_mat> true_covariances;
    double regularization = 0.01;  // alpha
    double power = 100.0;          // P
};

struct DeState
{
    arma::vec e_bar;        // fixed-point values, one per user
    arma::cx_mat t_matrix;  // M x M resolvent at the fixed point
    arma::vec e_prime;      // (I - J)^-1 v
    arma::mat j_matrix;     // N x N coupling matrix
    arma::vec v;
    double phi = 0.0;
    arma::vec e_cap;   // per-user estimation-error power term
    arma::vec i_cap;   // per-user interference term
    arma::vec u;
    bool converged = false;
    arma::uword iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

class ConvergenceError : public std::runtime_error
{
  public:
    ConvergenceError(const std::string &what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history))
    {
    }
    std::vector<double> residual_history;
};

// Damped Picard iteration for the coupled fixed point, then assembly of the
// linear-system quantities. Retries undamped if the damped pass stalls. An
// optional warm start replaces the default first-order initial point (useful
// when scanning nearby scenarios).
DeState solve_fixed_point(const DeInput &input, double tol = 1e-10, arma::uword max_iter = 1000,
                          const arma::vec *warm_start = nullptr);

// Per-user deterministic SINR from a converged state.
arma::vec de_sinr(const DeState &state, const DeInput &input);

// Convergence diagnostics dump (JSON) for debugging.
std::string de_state_to_json(const DeState &state);

}  // namespace fddmimo

#endif
