#pragma once

// Truncated HOSVD and higher-order orthogonal iteration (HOOI).

#include "misc/errors.hpp"
#include "misc/linalg.hpp"
#include "misc/tensor.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace misc {

using Ranks = std::vector<std::size_t>;

// core x_1 factors[0] x_2 ... x_d factors[d-1]; factor k is I_k x R_k with
// orthonormal columns.
struct TuckerModel {
    DenseTensor core;
    std::vector<Matrix> factors;
};

struct StopRule {
    int max_sweeps = 25;
    // Stop once a sweep lowers the Frobenius residual by less than this.
    double residual_tol = 1e-8;
};

struct HooiResult {
    TuckerModel model;
    // ||t - reconstruct(model)|| after each sweep.
    std::vector<double> residuals;
};

namespace detail {

inline void check_ranks(const DenseTensor& t, const Ranks& ranks, const char* who)
{
    if (ranks.size() != t.order())
        throw ShapeError(std::string(who) + ": " + std::to_string(ranks.size()) + " ranks for a tensor of order " +
                         std::to_string(t.order()));
    for (std::size_t k = 0; k < ranks.size(); ++k)
        if (ranks[k] < 1 || ranks[k] > t.dim(k))
            throw ShapeError(std::string(who) + ": rank " + std::to_string(ranks[k]) + " for mode " +
                             std::to_string(k) + " outside [1, " + std::to_string(t.dim(k)) + "]");
}

} // namespace detail

inline DenseTensor reconstruct(const TuckerModel& model)
{
    if (model.factors.size() != model.core.order())
        throw ShapeError("reconstruct: factor count does not match core order");
    return multilinear_product(model.core, model.factors);
}

inline double tucker_residual(const DenseTensor& t, const TuckerModel& model)
{
    return frobenius_norm(subtract(t, reconstruct(model)));
}

// Factor k holds the R_k leading left singular vectors of the k-mode unfolding
// of t itself, so the factors are independent of each other. A rank beyond the
// numerical rank of the unfolding is filled with further orthonormal columns.
inline TuckerModel hosvd(const DenseTensor& t, const Ranks& ranks)
{
    detail::check_ranks(t, ranks, "hosvd");
    TuckerModel model;
    model.factors.reserve(t.order());
    for (std::size_t k = 0; k < t.order(); ++k) model.factors.push_back(leading_left_basis(matricize(t, k), ranks[k]));
    model.core = project_onto_factors(t, model.factors);
    return model;
}

// HOOI from a truncated-HOSVD start at per-mode initial ranks `init_ranks`.
// During the first sweep the not-yet-updated factors still carry their initial
// widths; from the second sweep on every factor has its target rank.
inline HooiResult hooi(const DenseTensor& t, const Ranks& init_ranks, const Ranks& ranks, const StopRule& stop = {})
{
    detail::check_ranks(t, ranks, "hooi");
    detail::check_ranks(t, init_ranks, "hooi (initial ranks)");
    if (stop.max_sweeps < 1) throw ShapeError("hooi: max_sweeps must be >= 1");

    HooiResult result;
    std::vector<Matrix> factors = hosvd(t, init_ranks).factors;
    for (int sweep = 0; sweep < stop.max_sweeps; ++sweep) {
        for (std::size_t i = 0; i < t.order(); ++i) {
            const DenseTensor partial = project_onto_factors(t, factors, i);
            factors[i] = leading_left_basis(matricize(partial, i), ranks[i]);
        }
        result.model.core = project_onto_factors(t, factors);
        result.model.factors = factors;
        result.residuals.push_back(tucker_residual(t, result.model));

        const std::size_t n = result.residuals.size();
        if (n >= 2 && result.residuals[n - 2] - result.residuals[n - 1] < stop.residual_tol) break;
    }
    return result;
}

// Scalar initial rank r0 used for every mode; r0 may not exceed any dimension.
inline HooiResult hooi(const DenseTensor& t, std::size_t r0, const Ranks& ranks, const StopRule& stop = {})
{
    return hooi(t, Ranks(t.order(), r0), ranks, stop);
}

// Default initial ranks: the largest target rank, capped per mode at I_k.
inline Ranks default_init_ranks(const Shape& shape, const Ranks& ranks)
{
    const std::size_t r0 = ranks.empty() ? 1 : *std::max_element(ranks.begin(), ranks.end());
    Ranks init(shape.size());
    for (std::size_t k = 0; k < shape.size(); ++k) init[k] = std::min(r0, shape[k]);
    return init;
}

// Numerical rank of every mode unfolding (singular values above
// rel_tol * sigma_max).
inline Ranks multilinear_ranks(const DenseTensor& t, double rel_tol = 1e-8)
{
    Ranks out(t.order());
    for (std::size_t k = 0; k < t.order(); ++k) out[k] = numerical_rank(svd(matricize(t, k)).singular_values, rel_tol);
    return out;
}

} // namespace misc
