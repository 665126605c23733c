#include "oracles.hpp"

#include "misc/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using misc::Matrix;

namespace {

double orthonormality_defect(const Matrix& q)
{
    const Matrix g = misc::matmul(misc::transpose(q), q);
    double d = 0.0;
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) d = std::max(d, std::abs(g(r, c) - (r == c ? 1.0 : 0.0)));
    return d;
}

Matrix reassemble(const misc::SvdResult& s)
{
    Matrix us = s.left;
    for (std::size_t c = 0; c < us.cols(); ++c)
        for (double& x : us.column(c)) x *= s.singular_values[c];
    return misc::matmul(us, misc::transpose(s.right));
}

double rel_error(const Matrix& a, const Matrix& b)
{
    double num = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) num += (a.data()[n] - b.data()[n]) * (a.data()[n] - b.data()[n]);
    return std::sqrt(num) / misc::frobenius_norm(b);
}

} // namespace

TEST(Svd, Identity)
{
    const auto s = misc::svd(Matrix::identity(3));
    for (double x : s.singular_values) EXPECT_NEAR(x, 1.0, 1e-15);
}

TEST(Svd, PermutedDiagonal)
{
    const Matrix m = Matrix::from_rows({{0, 2, 0}, {0, 0, 1}, {3, 0, 0}});
    const auto s = misc::svd(m);
    EXPECT_NEAR(s.singular_values[0], 3.0, 1e-14);
    EXPECT_NEAR(s.singular_values[1], 2.0, 1e-14);
    EXPECT_NEAR(s.singular_values[2], 1.0, 1e-14);
}

TEST(Svd, ContractOnRandomShapes)
{
    misc::Rng rng(21);
    for (auto [rows, cols] : {std::pair{5, 4}, {4, 5}, {1, 6}, {6, 1}, {20, 15}, {7, 7}}) {
        const Matrix m = oracle::random_matrix(rng, rows, cols);
        const auto s = misc::svd(m);
        const std::size_t p = std::min(rows, cols);
        ASSERT_EQ(s.left.rows(), static_cast<std::size_t>(rows));
        ASSERT_EQ(s.left.cols(), p);
        ASSERT_EQ(s.right.rows(), static_cast<std::size_t>(cols));
        ASSERT_EQ(s.right.cols(), p);
        EXPECT_LE(orthonormality_defect(s.left), 1e-10);
        EXPECT_LE(orthonormality_defect(s.right), 1e-10);
        EXPECT_LE(rel_error(reassemble(s), m), 1e-10);
        for (std::size_t n = 1; n < p; ++n) EXPECT_GE(s.singular_values[n - 1], s.singular_values[n]);
        const auto expected = oracle::singular_values(m);
        for (std::size_t n = 0; n < p; ++n) EXPECT_NEAR(s.singular_values[n], expected[n], 1e-8 * expected[n]);
    }
}

TEST(Svd, SignConventionOnLeftVectors)
{
    misc::Rng rng(22);
    const auto s = misc::svd(oracle::random_matrix(rng, 6, 4));
    for (std::size_t c = 0; c < s.left.cols(); ++c) {
        std::size_t best = 0;
        for (std::size_t r = 1; r < s.left.rows(); ++r)
            if (std::abs(s.left(r, c)) > std::abs(s.left(best, c))) best = r;
        EXPECT_GT(s.left(best, c), 0.0);
    }
}

TEST(Svd, RankDeficientStillOrthonormal)
{
    const Matrix m = Matrix::from_rows({{1, 2, 3}, {2, 4, 6}, {0, 0, 0}, {1, 2, 3}});
    const auto s = misc::svd(m);
    EXPECT_LE(orthonormality_defect(s.left), 1e-10);
    EXPECT_LE(orthonormality_defect(s.right), 1e-10);
    EXPECT_EQ(misc::numerical_rank(s.singular_values), 1u);
    EXPECT_LE(rel_error(reassemble(s), m), 1e-12);
}

TEST(Svd, ZeroMatrix)
{
    const auto s = misc::svd(Matrix(3, 2));
    for (double x : s.singular_values) EXPECT_EQ(x, 0.0);
    EXPECT_LE(orthonormality_defect(s.left), 1e-12);
    EXPECT_EQ(misc::numerical_rank(s.singular_values), 0u);
}

TEST(Svd, Deterministic)
{
    misc::Rng rng(23);
    const Matrix m = oracle::random_matrix(rng, 9, 5);
    const auto a = misc::svd(m);
    const auto b = misc::svd(m);
    EXPECT_EQ(a.left, b.left);
    EXPECT_EQ(a.right, b.right);
    EXPECT_EQ(a.singular_values, b.singular_values);
}

TEST(Svd, RejectsNonFinite)
{
    Matrix m = Matrix::identity(2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(misc::svd(m), misc::NumericalError);
}

TEST(Svd, EckartYoungTail)
{
    misc::Rng rng(24);
    const Matrix m = oracle::random_matrix(rng, 8, 6);
    const auto s = misc::svd(m);
    for (std::size_t r = 1; r < 6; ++r) {
        misc::SvdResult t{misc::leading_columns(s.left, r),
                          std::vector<double>(s.singular_values.begin(), s.singular_values.begin() + r),
                          misc::leading_columns(s.right, r)};
        Matrix diff = reassemble(t);
        for (std::size_t n = 0; n < diff.size(); ++n) diff.data()[n] -= m.data()[n];
        double tail = 0.0;
        for (std::size_t n = r; n < 6; ++n) tail += s.singular_values[n] * s.singular_values[n];
        EXPECT_NEAR(misc::frobenius_norm(diff), std::sqrt(tail), 1e-8);
    }
}

TEST(LeadingLeftVectors, FullAndTruncated)
{
    const Matrix d = Matrix::from_rows({{3, 0, 0}, {0, 2, 0}, {0, 0, 1}});
    const Matrix u = misc::leading_left_vectors(d, 2);
    ASSERT_EQ(u.cols(), 2u);
    EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(u(1, 1)), 1.0, 1e-14);
    EXPECT_EQ(misc::leading_left_vectors(d, 3).cols(), 3u);
    EXPECT_THROW(misc::leading_left_vectors(d, 4), misc::ShapeError);
    EXPECT_THROW(misc::leading_left_vectors(d, 0), misc::ShapeError);
}

TEST(LeadingLeftVectors, RankOneIsProportionalToU)
{
    const std::vector<double> u{1, -3, 2}, v{2, 1};
    Matrix m(3, 2);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 2; ++c) m(r, c) = u[r] * v[c];
    const Matrix q = misc::leading_left_vectors(m, 1);
    const double norm = std::sqrt(14.0);
    // Largest-magnitude entry (-3) is made positive.
    for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(q(r, 0), -u[r] / norm, 1e-14);
}

TEST(LeadingLeftBasis, PadsBeyondNumericalRank)
{
    Matrix m(5, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    const Matrix q = misc::leading_left_basis(m, 4);
    ASSERT_EQ(q.cols(), 4u);
    EXPECT_LE(orthonormality_defect(q), 1e-12);
    EXPECT_THROW(misc::leading_left_basis(m, 6), misc::ShapeError);
}
