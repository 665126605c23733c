#pragma once

// Dense d-way tensors and the multilinear primitives built on them.
//
// Storage is fastest-first: for a tensor of shape I_1 x ... x I_d the entry at
// 1-based index (i_1, ..., i_d) lives at linear offset
//
//     1 + sum_k (i_k - 1) * prod_{m<k} I_m
//
// so the k-mode unfolding is a pure reindexing with no permutation. The C++
// accessors take 0-based indices; the 1-based form above is what the layout is
// defined against.

#include "misc/errors.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace misc {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_volume(const Shape& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_string(const Shape& shape)
{
    std::string s = "(";
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (k) s += "x";
        s += std::to_string(shape[k]);
    }
    return s + ")";
}

// Column-major real matrix; entry (r, c) is stored at r + rows * c.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_)
            throw ShapeError("Matrix: data length " + std::to_string(data_.size()) + " != " +
                             std::to_string(rows_) + "*" + std::to_string(cols_));
    }

    // Row-wise literal, convenient in tests: Matrix::from_rows({{1, 2}, {3, 4}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows)
    {
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows.begin()->size() : 0;
        Matrix m(r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c) throw ShapeError("Matrix::from_rows: ragged rows");
            std::size_t j = 0;
            for (double v : row) m(i, j++) = v;
            ++i;
        }
        return m;
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r + rows_ * c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r + rows_ * c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::span<double> column(std::size_t c) noexcept { return {data_.data() + rows_ * c, rows_}; }
    std::span<const double> column(std::size_t c) const noexcept
    {
        return {data_.data() + rows_ * c, rows_};
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix transpose(const Matrix& m)
{
    Matrix t(m.cols(), m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r) t(c, r) = m(r, c);
    return t;
}

inline Matrix matmul(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double bpj = b(p, j);
            if (bpj == 0.0) continue;
            for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, p) * bpj;
        }
    return out;
}

// First `n` columns of m.
inline Matrix leading_columns(const Matrix& m, std::size_t n)
{
    if (n > m.cols()) throw ShapeError("leading_columns: requested more columns than available");
    Matrix out(m.rows(), n);
    std::copy_n(m.data().begin(), m.rows() * n, out.data().begin());
    return out;
}

class DenseTensor {
public:
    DenseTensor() = default;

    explicit DenseTensor(Shape shape, double fill = 0.0) : shape_(std::move(shape))
    {
        validate_shape();
        data_.assign(shape_volume(shape_), fill);
    }

    DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data))
    {
        validate_shape();
        if (data_.size() != shape_volume(shape_))
            throw ShapeError("DenseTensor: data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string(shape_));
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t k) const { return shape_.at(k); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    // 0-based multi-index to linear offset.
    std::size_t offset(std::span<const std::size_t> index) const
    {
        if (index.size() != shape_.size()) throw ShapeError("DenseTensor: index arity mismatch");
        std::size_t off = 0;
        std::size_t stride = 1;
        for (std::size_t k = 0; k < shape_.size(); ++k) {
            if (index[k] >= shape_[k]) throw ShapeError("DenseTensor: index out of range");
            off += index[k] * stride;
            stride *= shape_[k];
        }
        return off;
    }

    double& operator()(std::initializer_list<std::size_t> index)
    {
        return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
    }
    double operator()(std::initializer_list<std::size_t> index) const
    {
        return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
    }
    double& at(std::span<const std::size_t> index) { return data_[offset(index)]; }
    double at(std::span<const std::size_t> index) const { return data_[offset(index)]; }

    // 3-way fast paths used throughout the label pipeline.
    double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept
    {
        return data_[i + shape_[0] * (j + shape_[1] * k)];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept
    {
        return data_[i + shape_[0] * (j + shape_[1] * k)];
    }

    bool operator==(const DenseTensor&) const = default;

private:
    void validate_shape() const
    {
        if (shape_.empty()) throw ShapeError("DenseTensor: order must be >= 1");
        for (std::size_t n : shape_)
            if (n == 0) throw ShapeError("DenseTensor: zero dimension in shape " + shape_string(shape_));
    }

    Shape shape_;
    std::vector<double> data_;
};

namespace detail {

// Split the shape around mode k: (prod of dims before k, I_k, prod of dims after k).
struct ModeSplit {
    std::size_t before;
    std::size_t extent;
    std::size_t after;
};

inline ModeSplit split_at(const Shape& shape, std::size_t k)
{
    ModeSplit s{1, shape[k], 1};
    for (std::size_t m = 0; m < k; ++m) s.before *= shape[m];
    for (std::size_t m = k + 1; m < shape.size(); ++m) s.after *= shape[m];
    return s;
}

inline void check_mode(const Shape& shape, std::size_t k, const char* who)
{
    if (k >= shape.size())
        throw ShapeError(std::string(who) + ": mode " + std::to_string(k) + " out of range for order " +
                         std::to_string(shape.size()));
}

} // namespace detail

// k-mode unfolding (0-based k). Row index is i_k; the column index runs over the
// remaining indices with the lowest mode varying fastest.
inline Matrix matricize(const DenseTensor& t, std::size_t k)
{
    detail::check_mode(t.shape(), k, "matricize");
    const auto [before, extent, after] = detail::split_at(t.shape(), k);
    Matrix m(extent, before * after);
    const auto src = t.data();
    for (std::size_t r = 0; r < after; ++r)
        for (std::size_t i = 0; i < extent; ++i) {
            const double* from = src.data() + before * (i + extent * r);
            for (std::size_t l = 0; l < before; ++l) m(i, l + before * r) = from[l];
        }
    return m;
}

// Inverse of matricize for the given target shape.
inline DenseTensor tensorize(const Matrix& m, const Shape& shape, std::size_t k)
{
    detail::check_mode(shape, k, "tensorize");
    DenseTensor t(shape);
    const auto [before, extent, after] = detail::split_at(shape, k);
    if (m.rows() != extent || m.cols() != before * after)
        throw ShapeError("tensorize: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", shape " + shape_string(shape) + " needs " + std::to_string(extent) + "x" +
                         std::to_string(before * after));
    auto dst = t.data();
    for (std::size_t r = 0; r < after; ++r)
        for (std::size_t i = 0; i < extent; ++i) {
            double* to = dst.data() + before * (i + extent * r);
            for (std::size_t l = 0; l < before; ++l) to[l] = m(i, l + before * r);
        }
    return t;
}

// g x_k u: replaces dimension k of g (which must equal u.cols()) by u.rows().
inline DenseTensor mode_product(const DenseTensor& g, std::size_t k, const Matrix& u)
{
    detail::check_mode(g.shape(), k, "mode_product");
    const auto [before, extent, after] = detail::split_at(g.shape(), k);
    if (u.cols() != extent)
        throw ShapeError("mode_product: matrix has " + std::to_string(u.cols()) + " columns, mode " +
                         std::to_string(k) + " has extent " + std::to_string(extent));
    Shape out_shape = g.shape();
    out_shape[k] = u.rows();
    DenseTensor out(out_shape);
    const std::size_t rows = u.rows();
    const auto src = g.data();
    auto dst = out.data();
    for (std::size_t r = 0; r < after; ++r)
        for (std::size_t i = 0; i < extent; ++i) {
            const double* from = src.data() + before * (i + extent * r);
            for (std::size_t j = 0; j < rows; ++j) {
                const double uji = u(j, i);
                if (uji == 0.0) continue;
                double* to = dst.data() + before * (j + rows * r);
                for (std::size_t l = 0; l < before; ++l) to[l] += uji * from[l];
            }
        }
    return out;
}

// [[g; U1, ..., Ud]] = g x_1 U1 x_2 U2 ... x_d Ud.
inline DenseTensor multilinear_product(const DenseTensor& g, std::span<const Matrix> factors)
{
    if (factors.size() != g.order())
        throw ShapeError("multilinear_product: " + std::to_string(factors.size()) + " factors for a tensor of order " +
                         std::to_string(g.order()));
    DenseTensor out = g;
    for (std::size_t k = 0; k < factors.size(); ++k) out = mode_product(out, k, factors[k]);
    return out;
}

// t x_1 U1^T ... x_d Ud^T, skipping mode `skip` when it is < d.
inline DenseTensor project_onto_factors(const DenseTensor& t, std::span<const Matrix> factors,
                                        std::size_t skip = static_cast<std::size_t>(-1))
{
    if (factors.size() != t.order())
        throw ShapeError("project_onto_factors: factor count does not match tensor order");
    DenseTensor out = t;
    for (std::size_t k = 0; k < factors.size(); ++k)
        if (k != skip) out = mode_product(out, k, transpose(factors[k]));
    return out;
}

// Stack a (Nw x Ni x Nc) on top of s (1 x Ni x Nc) along mode 1.
inline DenseTensor concat_mode1(const DenseTensor& a, const DenseTensor& s)
{
    if (a.order() != 3 || s.order() != 3 || s.dim(0) != 1 || a.dim(1) != s.dim(1) || a.dim(2) != s.dim(2))
        throw ShapeError("concat_mode1: cannot stack " + shape_string(s.shape()) + " under " +
                         shape_string(a.shape()));
    const std::size_t nw = a.dim(0), ni = a.dim(1), nc = a.dim(2);
    DenseTensor out({nw + 1, ni, nc});
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t i = 0; i < ni; ++i) {
            for (std::size_t w = 0; w < nw; ++w) out(w, i, c) = a(w, i, c);
            out(nw, i, c) = s(0, i, c);
        }
    return out;
}

// Mode-1 slice w (0-based) of a 3-way tensor, as a 1 x I2 x I3 tensor.
inline DenseTensor slice_mode1(const DenseTensor& t, std::size_t w)
{
    if (t.order() != 3) throw ShapeError("slice_mode1: tensor must be 3-way");
    if (w >= t.dim(0)) throw ShapeError("slice_mode1: slice index out of range");
    DenseTensor out({1, t.dim(1), t.dim(2)});
    for (std::size_t c = 0; c < t.dim(2); ++c)
        for (std::size_t i = 0; i < t.dim(1); ++i) out(0, i, c) = t(w, i, c);
    return out;
}

inline double frobenius_norm(std::span<const double> values)
{
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

inline double frobenius_norm(const DenseTensor& t) { return frobenius_norm(t.data()); }
inline double frobenius_norm(const Matrix& m) { return frobenius_norm(m.data()); }

inline DenseTensor subtract(const DenseTensor& a, const DenseTensor& b)
{
    if (a.shape() != b.shape())
        throw ShapeError("subtract: shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()) + " differ");
    DenseTensor out = a;
    auto dst = out.data();
    const auto rhs = b.data();
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] -= rhs[n];
    return out;
}

} // namespace misc
