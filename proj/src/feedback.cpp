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

#include "fddmimo/feedback.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fddmimo
{

namespace
{

void check_rwf_input(const arma::vec &eigenvalues)
{
    if (eigenvalues.is_empty())
        throw std::invalid_argument("rwf_allocate: empty eigenvalue vector");
    for (arma::uword i = 0; i < eigenvalues.n_elem; ++i)
    {
        if (eigenvalues(i) < -1e-12)
            throw std::invalid_argument("rwf_allocate: eigenvalues must be nonnegative");
        if (i > 0 && eigenvalues(i) > eigenvalues(i - 1) + 1e-12)
            throw std::invalid_argument("rwf_allocate: eigenvalues must be sorted descending");
    }
}

void check_rank(const ChannelCovariance &cov, arma::uword rank)
{
    if (rank < 2 || rank > cov.dim())
        throw std::invalid_argument("feedback: dominant rank must lie in [2, M]");
    if (cov.eigenvalues()(rank - 1) <= 0.0)
        throw std::domain_error("feedback: dominant eigenvalues must be positive for whitening");
}

void check_training(const ChannelCovariance &cov, const TrainingEstimate &training)
{
    if (training.error_covariance.n_rows != cov.dim() || training.error_covariance.n_cols != cov.dim())
        throw std::invalid_argument("feedback: training error covariance has wrong shape");
}

arma::cx_mat hermitized(arma::cx_mat m)
{
    return 0.5 * (m + m.t());
}

arma::cx_mat real_diagmat(const arma::vec &d)
{
    return arma::cx_mat(arma::diagmat(d), arma::zeros<arma::mat>(d.n_elem, d.n_elem));
}

// Shaping-loss model: a practical entropy-coded scalar quantizer pays
// 2 * SL bits per complex dimension relative to the rate-distortion curve,
// capped at the zero-rate distortion.
arma::vec apply_shaping_loss(const arma::vec &distortions, const arma::vec &bits, const arma::vec &eigenvalues,
                             double shaping_loss)
{
    if (shaping_loss <= 0.0)
        return distortions;
    arma::vec d = distortions;
    const double inflation = std::exp2(2.0 * shaping_loss);
    for (arma::uword i = 0; i < d.n_elem; ++i)
        if (bits(i) > 0.0)
            d(i) = std::min(eigenvalues(i), d(i) * inflation);
    return d;
}

struct DominantSplit
{
    DominantRepresentation rep;
    arma::cx_mat training_proj;  // r x r projection of the training error covariance
    double beta = 0.0;           // tr[I_r - L^-1/2 U' C U L^-1/2]
};

DominantSplit split_for_rvq(const ChannelCovariance &cov, const TrainingEstimate &training, arma::uword rank)
{
    DominantSplit s;
    s.rep = dominant_representation(cov, rank);
    s.training_proj = s.rep.basis.t() * training.error_covariance * s.rep.basis;
    double used = 0.0;
    for (arma::uword i = 0; i < rank; ++i)
        used += s.training_proj(i, i).real() / s.rep.dominant_eigenvalues(i);
    s.beta = std::max(0.0, static_cast<double>(rank) - used);
    return s;
}

EstimateBundle assemble_rvq_bundle(const ChannelCovariance &cov, const DominantSplit &s, double quant_scale)
{
    const arma::cx_mat r_dom =
        s.rep.basis * real_diagmat(s.rep.dominant_eigenvalues) * s.rep.basis.t();

    EstimateBundle b;
    b.term_training = hermitized(s.rep.basis * s.training_proj * s.rep.basis.t());
    b.term_quantization = quant_scale * r_dom;
    b.term_residual = s.rep.residual_covariance;
    b.error_covariance = hermitized(b.term_training + b.term_quantization + b.term_residual);
    b.estimate_covariance = hermitized(cov.matrix() - b.error_covariance);
    return b;
}

}  // namespace

RwfAllocation rwf_allocate(const arma::vec &eigenvalues, double total_bits)
{
    check_rwf_input(eigenvalues);
    if (total_bits < 0.0)
        throw std::invalid_argument("rwf_allocate: total bits must be nonnegative");

    const arma::uword n = eigenvalues.n_elem;
    arma::uword positive = 0;
    while (positive < n && eigenvalues(positive) > 0.0)
        ++positive;

    RwfAllocation out;
    out.bits = arma::zeros(n);
    out.distortions = arma::zeros(n);
    out.total_bits = total_bits;

    if (positive == 0)
    {
        if (total_bits > 0.0)
            throw std::runtime_error("rwf_allocate: all eigenvalues are zero, bits cannot be spent");
        out.water_level = 0.0;
        out.total_distortion = 0.0;
        return out;
    }

    // The active set is a prefix: for size k the level is
    // log2(gamma) = (sum_{i<=k} log2(lambda_i) - B) / k. Pick the k whose level
    // is consistent with exactly those k components being active.
    double cum_log = 0.0;
    double level = eigenvalues(0);
    for (arma::uword k = 1; k <= positive; ++k)
    {
        cum_log += std::log2(eigenvalues(k - 1));
        const double candidate = std::exp2((cum_log - total_bits) / static_cast<double>(k));
        const double next = k < positive ? eigenvalues(k) : 0.0;
        if (candidate <= eigenvalues(k - 1) * (1.0 + 1e-12) && candidate >= next * (1.0 - 1e-12))
        {
            level = candidate;
            break;
        }
        if (k == positive)
            level = candidate;
    }

    out.water_level = level;
    for (arma::uword i = 0; i < n; ++i)
    {
        out.distortions(i) = std::min(level, eigenvalues(i));
        if (i < positive && eigenvalues(i) > level)
            out.bits(i) = std::log2(eigenvalues(i) / level);
    }
    out.total_distortion = arma::accu(out.distortions);
    return out;
}

arma::uvec apportion_bits(const arma::vec &fractional_bits, arma::uword total_bits)
{
    const arma::uword n = fractional_bits.n_elem;
    arma::uvec out(n, arma::fill::zeros);
    arma::vec remainder(n, arma::fill::zeros);
    arma::uword assigned = 0;
    for (arma::uword i = 0; i < n; ++i)
    {
        const double f = std::max(0.0, fractional_bits(i));
        out(i) = static_cast<arma::uword>(std::floor(f));
        remainder(i) = f - std::floor(f);
        assigned += out(i);
    }
    if (assigned >= total_bits)
        return out;
    arma::uword leftover = total_bits - assigned;
    const arma::uvec order = arma::stable_sort_index(remainder, "descend");
    for (arma::uword k = 0; k < order.n_elem && leftover > 0; ++k, --leftover)
        out(order(k)) += 1;
    return out;
}

EstimateBundle klsq_feedback(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                             double shaping_loss, StreamRng *rng)
{
    check_training(cov, training);
    const RwfAllocation alloc = rwf_allocate(cov.eigenvalues(), bits);
    const arma::vec d =
        apply_shaping_loss(alloc.distortions, alloc.bits, cov.eigenvalues(), shaping_loss);

    EstimateBundle b;
    b.term_training = training.error_covariance;
    b.term_quantization = hermitized(cov.eigenvectors() * real_diagmat(d) * cov.eigenvectors().t());
    b.term_residual = arma::zeros<arma::cx_mat>(cov.dim(), cov.dim());
    b.error_covariance = hermitized(b.term_training + b.term_quantization);
    b.estimate_covariance = hermitized(cov.matrix() - b.error_covariance);

    if (rng != nullptr)
    {
        if (training.estimate.n_elem != cov.dim())
            throw std::invalid_argument("klsq_feedback: simulation needs a training estimate");
        // Test-rate simulation: integer bit loading, then independent Gaussian
        // noise with the per-component distortions in KL coordinates.
        const arma::uvec rounded = apportion_bits(alloc.bits, static_cast<arma::uword>(std::llround(bits)));
        arma::vec d_sim(cov.dim(), arma::fill::zeros);
        arma::vec bits_sim(cov.dim(), arma::fill::zeros);
        for (arma::uword i = 0; i < cov.dim(); ++i)
        {
            bits_sim(i) = static_cast<double>(rounded(i));
            d_sim(i) = cov.eigenvalues()(i) * std::exp2(-bits_sim(i));
        }
        d_sim = apply_shaping_loss(d_sim, bits_sim, cov.eigenvalues(), shaping_loss);
        const arma::cx_vec noise = arma::sqrt(d_sim) % rng->cgaussian_vec(cov.dim());
        b.bs_estimate = training.estimate + cov.eigenvectors() * noise;
    }
    return b;
}

EstimateBundle iso_rvq_feedback(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                                arma::uword rank, QuantizerMode mode, StreamRng *rng)
{
    check_training(cov, training);
    check_rank(cov, rank);
    if (bits < 0.0)
        throw std::invalid_argument("iso_rvq_feedback: bits must be nonnegative");

    const DominantSplit s = split_for_rvq(cov, training, rank);
    const double per_vector = std::exp2(-bits / static_cast<double>(rank - 1));
    EstimateBundle b = assemble_rvq_bundle(cov, s, per_vector * s.beta / static_cast<double>(rank));

    if (mode == QuantizerMode::simulated)
    {
        if (rng == nullptr)
            throw std::invalid_argument("iso_rvq_feedback: simulated mode needs an rng");
        if (training.estimate.n_elem != cov.dim())
            throw std::invalid_argument("iso_rvq_feedback: simulation needs a training estimate");
        const arma::cx_vec root(arma::sqrt(s.rep.dominant_eigenvalues),
                                arma::zeros(rank));
        const arma::cx_vec z = (s.rep.basis.t() * training.estimate) / root;
        const arma::cx_mat codebook = draw_isotropic_codebook(rank, bits, *rng);
        const QuantizedVector q = quantize_projection(z, codebook);
        b.bs_estimate = s.rep.basis * (root % q.reconstruction);
    }
    return b;
}

EstimateBundle skewed_rvq_feedback(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                                   arma::uword rank, QuantizerMode mode, StreamRng *rng)
{
    check_training(cov, training);
    check_rank(cov, rank);
    if (bits < 0.0)
        throw std::invalid_argument("skewed_rvq_feedback: bits must be nonnegative");

    const DominantSplit s = split_for_rvq(cov, training, rank);
    const arma::vec &lam = s.rep.dominant_eigenvalues;
    const double bound_quant =
        arma::accu(arma::square(lam)) / lam(0) * std::exp2(-bits / static_cast<double>(rank - 1));
    // Spread the scalar bound over the dominant covariance so the trace matches it.
    EstimateBundle b = assemble_rvq_bundle(cov, s, bound_quant / arma::accu(lam));

    if (mode == QuantizerMode::simulated)
    {
        if (rng == nullptr)
            throw std::invalid_argument("skewed_rvq_feedback: simulated mode needs an rng");
        if (training.estimate.n_elem != cov.dim())
            throw std::invalid_argument("skewed_rvq_feedback: simulation needs a training estimate");
        const arma::cx_vec root(arma::sqrt(lam), arma::zeros(rank));
        const arma::cx_vec z = (s.rep.basis.t() * training.estimate) / root;
        const arma::cx_mat codebook = draw_isotropic_codebook(rank, bits, *rng);
        const QuantizedVector q = quantize_skewed(z, codebook, lam);
        b.bs_estimate = s.rep.basis * q.reconstruction;
    }
    return b;
}

double skewed_mse_bound(const arma::vec &eigenvalues, arma::uword rank, double bits)
{
    check_rwf_input(eigenvalues);
    if (rank < 2 || rank > eigenvalues.n_elem)
        throw std::invalid_argument("skewed_mse_bound: rank must lie in [2, M]");
    if (eigenvalues(0) <= 0.0)
        throw std::domain_error("skewed_mse_bound: leading eigenvalue must be positive");
    if (bits < 0.0)
        throw std::invalid_argument("skewed_mse_bound: bits must be nonnegative");

    double quad = 0.0;
    for (arma::uword i = 0; i < rank; ++i)
        quad += eigenvalues(i) * eigenvalues(i);
    double tail = 0.0;
    for (arma::uword i = rank; i < eigenvalues.n_elem; ++i)
        tail += eigenvalues(i);
    return quad / eigenvalues(0) * std::exp2(-bits / static_cast<double>(rank - 1)) + tail;
}

arma::uword optimal_dominant_rank(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                                  FeedbackKind kind)
{
    check_training(cov, training);
    if (kind == FeedbackKind::klsq)
        throw std::invalid_argument("optimal_dominant_rank: rank search applies to RVQ kinds only");

    const arma::uword m = cov.dim();
    arma::uword positive = 0;
    while (positive < m && cov.eigenvalues()(positive) > 0.0)
        ++positive;
    if (positive < 2)
        throw std::domain_error("optimal_dominant_rank: need at least two positive eigenvalues");

    // Per-rank traces assembled from running sums; no matrix products needed.
    arma::vec proj_diag(m);
    for (arma::uword i = 0; i < m; ++i)
        proj_diag(i) =
            arma::cdot(cov.eigenvectors().col(i), training.error_covariance * cov.eigenvectors().col(i)).real();

    const double total = arma::accu(cov.eigenvalues());
    double best_trace = arma::datum::inf;
    arma::uword best_rank = 2;
    double lam_sum = 0.0, lam_sq_sum = 0.0, proj_sum = 0.0, whitened_sum = 0.0;
    for (arma::uword r = 1; r <= positive; ++r)
    {
        const double lam = cov.eigenvalues()(r - 1);
        lam_sum += lam;
        lam_sq_sum += lam * lam;
        proj_sum += proj_diag(r - 1);
        whitened_sum += proj_diag(r - 1) / lam;
        if (r < 2)
            continue;

        const double per_vector = std::exp2(-bits / static_cast<double>(r - 1));
        const double beta = std::max(0.0, static_cast<double>(r) - whitened_sum);
        const double quant = kind == FeedbackKind::iso_rvq
                                 ? per_vector * beta / static_cast<double>(r) * lam_sum
                                 : lam_sq_sum / cov.eigenvalues()(0) * per_vector;
        const double trace = proj_sum + quant + (total - lam_sum);
        if (trace < best_trace - 1e-15)
        {
            best_trace = trace;
            best_rank = r;
        }
    }
    return best_rank;
}

arma::cx_mat draw_isotropic_codebook(arma::uword dim, double bits, StreamRng &rng)
{
    if (bits < 0.0 || bits > 20.0 || std::abs(bits - std::round(bits)) > 1e-9)
        throw std::invalid_argument("draw_isotropic_codebook: bits must be an integer in [0, 20]");
    const arma::uword count = arma::uword(1) << static_cast<unsigned>(std::llround(bits));
    arma::cx_mat cb(dim, count);
    for (arma::uword k = 0; k < count; ++k)
        cb.col(k) = rng.unit_vector(dim);
    return cb;
}

QuantizedVector quantize_projection(const arma::cx_vec &z, const arma::cx_mat &codebook)
{
    if (codebook.n_rows != z.n_elem || codebook.n_cols == 0)
        throw std::invalid_argument("quantize_projection: codebook shape mismatch");
    const arma::cx_vec inner = codebook.t() * z;
    const arma::vec score = arma::square(arma::abs(inner));
    QuantizedVector q;
    q.index = score.index_max();
    q.reconstruction = codebook.col(q.index) * inner(q.index);
    return q;
}

QuantizedVector quantize_skewed(const arma::cx_vec &z, const arma::cx_mat &codebook, const arma::vec &lambda)
{
    if (codebook.n_rows != z.n_elem || codebook.n_cols == 0)
        throw std::invalid_argument("quantize_skewed: codebook shape mismatch");
    if (lambda.n_elem != z.n_elem)
        throw std::invalid_argument("quantize_skewed: eigenvalue length mismatch");

    const arma::cx_vec lz = arma::cx_vec(lambda, arma::zeros(lambda.n_elem)) % z;
    const arma::vec num = arma::square(arma::abs(codebook.t() * lz));
    const arma::vec den = arma::square(arma::abs(codebook)).t() * lambda;
    QuantizedVector q;
    q.index = (num / den).index_max();

    // Reconstruction in unwhitened coordinates: project w = sqrt(L) z onto the
    // skewed direction sqrt(L) f / ||sqrt(L) f||.
    const arma::cx_vec w = arma::sqrt(arma::cx_vec(lambda, arma::zeros(lambda.n_elem))) % z;
    arma::cx_vec dir = arma::sqrt(arma::cx_vec(lambda, arma::zeros(lambda.n_elem))) % codebook.col(q.index);
    dir /= arma::norm(dir);
    q.reconstruction = dir * arma::cdot(dir, w);
    return q;
}

}  // namespace fddmimo
