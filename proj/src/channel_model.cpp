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

#include "fddmimo/channel_model.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace fddmimo
{

namespace
{

using cxd = std::complex<double>;
using Integrand = std::function<cxd(double)>;

// Gauss-Kronrod 7/15 abscissae and weights (positive half).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GkResult
{
    cxd value;
    double error;
};

GkResult gk15(const Integrand &f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const cxd fc = f(c);
    cxd kronrod = kWgk[7] * fc;
    cxd gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i)
    {
        const double dx = h * kXgk[i];
        const cxd fsum = f(c - dx) + f(c + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1)
            gauss += kWg[i / 2] * fsum;
    }
    kronrod *= h;
    gauss *= h;
    return {kronrod, std::abs(kronrod - gauss)};
}

cxd adapt(const Integrand &f, double a, double b, double tol, int depth)
{
    const GkResult r = gk15(f, a, b);
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
        throw std::runtime_error("channel model: quadrature produced a non-finite value");
    if (r.error < tol || depth >= 48)
        return r.value;
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1) + adapt(f, c, b, 0.5 * tol, depth + 1);
}

cxd integrate(const Integrand &f, double a, double b, double tol = 1e-12)
{
    return adapt(f, a, b, tol, 0);
}

void check_geometry(const UserGeometry &g, arma::uword m)
{
    if (m < 1)
        throw std::invalid_argument("channel model: array size must be at least 1");
    if (g.angular_spread <= 0.0)
        throw std::invalid_argument("channel model: angular spread must be positive");
    if (g.antenna_spacing < 0.0)
        throw std::invalid_argument("channel model: antenna spacing must be nonnegative");
}

// Both geometric models are Toeplitz: entry (i,j) depends only on i-j, so only
// the first column is integrated and the rest is mirrored conjugate.
arma::cx_mat toeplitz_from_lags(const std::function<cxd(int)> &lag_value, arma::uword m)
{
    arma::cx_vec lags(m);
    for (arma::uword k = 0; k < m; ++k)
        lags(k) = lag_value(static_cast<int>(k));
    arma::cx_mat r(m, m);
    for (arma::uword i = 0; i < m; ++i)
        for (arma::uword j = 0; j < m; ++j)
        {
            const int d = static_cast<int>(i) - static_cast<int>(j);
            r(i, j) = d >= 0 ? lags(static_cast<arma::uword>(d)) : std::conj(lags(static_cast<arma::uword>(-d)));
        }
    return r;
}

}  // namespace

ChannelCovariance::ChannelCovariance(arma::cx_mat matrix)
{
    if (matrix.n_rows != matrix.n_cols || matrix.n_rows == 0)
        throw std::invalid_argument("covariance: matrix must be square and non-empty");
    matrix_ = 0.5 * (matrix + matrix.t());

    arma::vec ascending;
    arma::cx_mat vectors;
    if (!arma::eig_sym(ascending, vectors, matrix_, "std"))
        throw std::runtime_error("covariance: eigendecomposition failed");

    const arma::uword m = matrix_.n_rows;
    eigenvalues_.set_size(m);
    eigenvectors_.set_size(m, m);
    for (arma::uword i = 0; i < m; ++i)
    {
        eigenvalues_(i) = ascending(m - 1 - i);
        eigenvectors_.col(i) = vectors.col(m - 1 - i);
    }

    const double floor = -1e-10 * std::max(1.0, eigenvalues_.max());
    if (eigenvalues_.min() < floor)
        throw std::invalid_argument("covariance: matrix is not positive semidefinite");
}

ChannelCovariance ChannelCovariance::identity(arma::uword m)
{
    return ChannelCovariance(arma::cx_mat(arma::eye<arma::mat>(m, m), arma::zeros<arma::mat>(m, m)));
}

ChannelCovariance ChannelCovariance::zero(arma::uword m)
{
    return ChannelCovariance(arma::zeros<arma::cx_mat>(m, m));
}

arma::cx_mat ChannelCovariance::sqrt_factor() const
{
    arma::vec clipped = eigenvalues_;
    clipped.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    return eigenvectors_ * arma::diagmat(clipped);
}

ChannelCovariance one_ring_ccm(const UserGeometry &geometry, arma::uword m)
{
    check_geometry(geometry, m);
    const double theta = geometry.azimuth;
    const double delta = geometry.angular_spread;
    const double spacing = geometry.antenna_spacing;
    const double scale = 1.0 / (2.0 * delta);

    auto lag_value = [&](int d) -> cxd {
        const double w = 2.0 * M_PI * spacing * static_cast<double>(d);
        auto f = [&](double a) { return std::exp(cxd(0.0, -w * std::sin(a))); };
        return scale * integrate(f, theta - delta, theta + delta);
    };
    return ChannelCovariance(toeplitz_from_lags(lag_value, m));
}

ChannelCovariance laplacian_ccm(const UserGeometry &geometry, arma::uword m)
{
    check_geometry(geometry, m);
    const double theta = geometry.azimuth;
    const double delta = geometry.angular_spread;
    const double spacing = geometry.antenna_spacing;
    const double scale = 1.0 / (std::sqrt(2.0) * delta);
    const double decay = std::sqrt(2.0) / delta;

    auto lag_value = [&](int d) -> cxd {
        const double w = 2.0 * M_PI * spacing * static_cast<double>(d);
        auto f = [&](double a) {
            return std::exp(-decay * std::abs(a - theta)) * std::exp(cxd(0.0, -w * std::sin(a)));
        };
        // Split at the density kink so each piece is smooth.
        return scale * (integrate(f, theta - M_PI, theta) + integrate(f, theta, theta + M_PI));
    };
    return ChannelCovariance(toeplitz_from_lags(lag_value, m));
}

arma::uword effective_rank(const ChannelCovariance &cov, double threshold)
{
    if (threshold < 0.0)
        throw std::invalid_argument("effective_rank: threshold must be nonnegative");
    arma::uword count = 0;
    for (arma::uword i = 0; i < cov.dim(); ++i)
        if (cov.eigenvalues()(i) > threshold)
            ++count;
    return count;
}

double default_rank_threshold(const ChannelCovariance &cov)
{
    return 1e-3 * cov.eigenvalues().max();
}

DominantRepresentation dominant_representation(const ChannelCovariance &cov, arma::uword rank)
{
    const arma::uword m = cov.dim();
    if (rank < 1 || rank > m)
        throw std::invalid_argument("dominant_representation: rank out of range");

    DominantRepresentation rep;
    rep.rank = rank;
    rep.basis = cov.eigenvectors().cols(0, rank - 1);
    rep.dominant_eigenvalues = cov.eigenvalues().subvec(0, rank - 1);
    if (rank == m)
    {
        rep.residual_covariance = arma::zeros<arma::cx_mat>(m, m);
    }
    else
    {
        const arma::cx_mat tail = cov.eigenvectors().cols(rank, m - 1);
        const arma::vec tail_values = cov.eigenvalues().subvec(rank, m - 1);
        rep.residual_covariance = tail * arma::diagmat(arma::cx_vec(tail_values, arma::zeros(tail_values.n_elem))) * tail.t();
    }
    return rep;
}

arma::cx_vec sample_channel(const ChannelCovariance &cov, StreamRng &rng)
{
    return cov.sqrt_factor() * rng.cgaussian_vec(cov.dim());
}

std::string covariance_to_json(const ChannelCovariance &cov)
{
    nlohmann::json j;
    j["m"] = cov.dim();
    std::vector<double> data;
    data.reserve(2 * cov.dim() * cov.dim());
    for (arma::uword i = 0; i < cov.dim(); ++i)
        for (arma::uword k = 0; k < cov.dim(); ++k)
        {
            data.push_back(cov.matrix()(i, k).real());
            data.push_back(cov.matrix()(i, k).imag());
        }
    j["data"] = data;
    return j.dump();
}

ChannelCovariance covariance_from_json(const std::string &text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    const arma::uword m = j.at("m").get<arma::uword>();
    const std::vector<double> data = j.at("data").get<std::vector<double>>();
    if (data.size() != 2 * m * m)
        throw std::invalid_argument("covariance_from_json: payload size mismatch");
    arma::cx_mat r(m, m);
    std::size_t p = 0;
    for (arma::uword i = 0; i < m; ++i)
        for (arma::uword k = 0; k < m; ++k)
        {
            r(i, k) = cxd(data[p], data[p + 1]);
            p += 2;
        }
    return ChannelCovariance(std::move(r));
}

}  // namespace fddmimo
