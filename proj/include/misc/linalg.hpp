#pragma once

// Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//
// Jacobi is slower than bidiagonalisation on large matrices but is simple,
// dependency-free, bit-for-bit deterministic and accurate to working precision,
// which is what the Tucker solvers need for small unfoldings.

#include "misc/errors.hpp"
#include "misc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <numeric>
#include <vector>

namespace misc {

struct SvdResult {
    Matrix left;                         // m x r, orthonormal columns
    std::vector<double> singular_values; // r = min(m, n), non-increasing
    Matrix right;                        // n x r, orthonormal columns
};

inline constexpr int kJacobiMaxSweeps = 80;
inline constexpr double kRankTolerance = 1e-12;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Orthogonalise `v` against the first `ncols` columns of q (two passes of
// classical Gram-Schmidt) and return the remaining norm.
inline double orthogonalize_against(std::vector<double>& v, const Matrix& q, std::size_t ncols)
{
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < ncols; ++j) {
            const double proj = dot(q.column(j), v);
            const auto qj = q.column(j);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * qj[i];
        }
    return std::sqrt(dot(v, v));
}

// Rotate the columns of `a` until they are mutually orthogonal; the rotations
// are accumulated into `v` (n x n, starts as identity).
inline void jacobi_orthogonalize(Matrix& a, Matrix& v)
{
    const std::size_t n = a.cols();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double tol = eps * static_cast<double>(std::max<std::size_t>(a.rows(), 1));
    double total = 0.0;
    for (double x : a.data()) total += x * x;
    // Columns below this squared norm are numerically zero and left alone.
    const double negligible = eps * eps * total;
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                auto ap = a.column(p);
                auto aq = a.column(q);
                const double alpha = dot(ap, ap);
                const double beta = dot(aq, aq);
                const double gamma = dot(ap, aq);
                if (alpha <= negligible || beta <= negligible) continue;
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < ap.size(); ++i) {
                    const double x = ap[i], y = aq[i];
                    ap[i] = c * x - s * y;
                    aq[i] = s * x + c * y;
                }
                auto vp = v.column(p);
                auto vq = v.column(q);
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = vp[i], y = vq[i];
                    vp[i] = c * x - s * y;
                    vq[i] = s * x + c * y;
                }
            }
        if (!rotated) return;
    }
    throw NumericalError("svd: Jacobi iteration did not converge in " + std::to_string(kJacobiMaxSweeps) +
                         " sweeps");
}

// Flip the sign of (left_j, right_j) so the largest-magnitude entry of left_j is
// positive; ties go to the lowest index.
inline void normalize_signs(Matrix& left, Matrix& right)
{
    for (std::size_t j = 0; j < left.cols(); ++j) {
        auto col = left.column(j);
        std::size_t best = 0;
        for (std::size_t i = 1; i < col.size(); ++i)
            if (std::abs(col[i]) > std::abs(col[best])) best = i;
        if (col[best] < 0.0) {
            for (double& x : col) x = -x;
            for (double& x : right.column(j)) x = -x;
        }
    }
}

} // namespace detail

// Extend the orthonormal columns of q to `target` columns by orthogonalising
// canonical basis vectors, choosing at each step the one with the largest
// remaining component (lowest index on ties).
inline Matrix complete_orthonormal(const Matrix& q, std::size_t target)
{
    const std::size_t m = q.rows();
    if (target > m) throw ShapeError("complete_orthonormal: cannot have more than " + std::to_string(m) + " columns");
    if (target <= q.cols()) return leading_columns(q, target);
    Matrix out(m, target);
    std::copy(q.data().begin(), q.data().end(), out.data().begin());
    // Squared component of each canonical vector outside span(out) is
    // 1 - sum_j out(e, j)^2; kept up to date as columns are added.
    std::vector<double> outside(m, 1.0);
    for (std::size_t j = 0; j < q.cols(); ++j)
        for (std::size_t e = 0; e < m; ++e) outside[e] -= out(e, j) * out(e, j);
    std::vector<double> v(m);
    for (std::size_t j = q.cols(); j < target; ++j) {
        std::size_t best = 0;
        for (std::size_t e = 1; e < m; ++e)
            if (outside[e] > outside[best] + 1e-12) best = e;
        std::fill(v.begin(), v.end(), 0.0);
        v[best] = 1.0;
        const double norm = detail::orthogonalize_against(v, out, j);
        auto col = out.column(j);
        for (std::size_t i = 0; i < m; ++i) {
            col[i] = v[i] / norm;
            outside[i] -= col[i] * col[i];
        }
    }
    return out;
}

inline SvdResult svd(const Matrix& m)
{
    for (double x : m.data())
        if (!std::isfinite(x)) throw NumericalError("svd: non-finite input");

    // Jacobi works on the columns, so orthogonalise the shorter side.
    const bool wide = m.rows() < m.cols();
    Matrix a = wide ? transpose(m) : m;
    const std::size_t n = a.cols();
    Matrix v = Matrix::identity(n);
    detail::jacobi_orthogonalize(a, v);

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(detail::dot(a.column(j), a.column(j)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const double smax = n ? sigma[order[0]] : 0.0;
    const double floor = smax * 1e-14;

    // u: normalised columns of a for the numerically nonzero singular values,
    // completed to an orthonormal set for the rest.
    Matrix u(a.rows(), n);
    Matrix vs(n, n);
    std::vector<double> sorted(n);
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        sorted[j] = sigma[src];
        std::copy(v.column(src).begin(), v.column(src).end(), vs.column(j).begin());
        if (sigma[src] > floor && sigma[src] > 0.0) {
            auto from = a.column(src);
            auto to = u.column(j);
            for (std::size_t i = 0; i < to.size(); ++i) to[i] = from[i] / sigma[src];
            nonzero = j + 1;
        }
    }
    if (nonzero < n) u = complete_orthonormal(leading_columns(u, nonzero), n);

    SvdResult out;
    out.singular_values = std::move(sorted);
    if (wide) {
        out.left = std::move(vs);
        out.right = std::move(u);
    } else {
        out.left = std::move(u);
        out.right = std::move(vs);
    }
    detail::normalize_signs(out.left, out.right);
    return out;
}

// Number of singular values above rel_tol * sigma_max (zero for a zero matrix).
inline std::size_t numerical_rank(std::span<const double> singular_values, double rel_tol = kRankTolerance)
{
    if (singular_values.empty() || singular_values[0] <= 0.0) return 0;
    const double cut = rel_tol * singular_values[0];
    return static_cast<std::size_t>(
        std::count_if(singular_values.begin(), singular_values.end(), [&](double s) { return s > cut; }));
}

inline Matrix leading_left_vectors(const Matrix& m, std::size_t r)
{
    const std::size_t limit = std::min(m.rows(), m.cols());
    if (r < 1 || r > limit)
        throw ShapeError("leading_left_vectors: r=" + std::to_string(r) + " outside [1, " + std::to_string(limit) + "]");
    return leading_columns(svd(m).left, r);
}

// R leading left singular vectors for any 1 <= R <= rows; when R exceeds the
// thin SVD width the basis is completed with further orthonormal columns.
inline Matrix leading_left_basis(const Matrix& m, std::size_t r)
{
    if (r < 1 || r > m.rows())
        throw ShapeError("leading_left_basis: r=" + std::to_string(r) + " outside [1, " + std::to_string(m.rows()) +
                         "]");
    Matrix left = svd(m).left;
    return r <= left.cols() ? leading_columns(left, r) : complete_orthonormal(left, r);
}

} // namespace misc
