#include "fixtures.hpp"
#include "oracles.hpp"

#include "misc/tucker.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

using misc::DenseTensor;
using misc::Matrix;
using misc::Ranks;

namespace {

double orthonormality_defect(const Matrix& q)
{
    const Matrix g = misc::matmul(misc::transpose(q), q);
    double d = 0.0;
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) d = std::max(d, std::abs(g(r, c) - (r == c ? 1.0 : 0.0)));
    return d;
}

double relative_residual(const DenseTensor& t, const misc::TuckerModel& m)
{
    return misc::tucker_residual(t, m) / misc::frobenius_norm(t);
}

Ranks brute_force_ranks(const DenseTensor& t)
{
    Ranks r;
    for (std::size_t k = 0; k < t.order(); ++k) r.push_back(oracle::matrix_rank(oracle::unfold(t, k)));
    return r;
}

// Core of the requested size times random orthonormal factors.
DenseTensor exact_tucker(misc::Rng& rng, const misc::Shape& shape, const Ranks& ranks)
{
    misc::TuckerModel m;
    m.core = oracle::random_tensor(rng, ranks);
    for (std::size_t k = 0; k < shape.size(); ++k)
        m.factors.push_back(misc::leading_left_vectors(oracle::random_matrix(rng, shape[k], ranks[k]), ranks[k]));
    return misc::reconstruct(m);
}

} // namespace

TEST(Reconstruct, TrivialCases)
{
    misc::Rng rng(1);
    const DenseTensor t = oracle::random_tensor(rng, {2, 3, 2});
    EXPECT_EQ(misc::reconstruct({t, {Matrix::identity(2), Matrix::identity(3), Matrix::identity(2)}}), t);
    const DenseTensor zero = misc::reconstruct(
        {DenseTensor({1, 1, 1}), {oracle::random_matrix(rng, 2, 1), oracle::random_matrix(rng, 3, 1), oracle::random_matrix(rng, 2, 1)}});
    for (double x : zero.data()) EXPECT_EQ(x, 0.0);
    EXPECT_THROW(misc::reconstruct({t, {Matrix::identity(2)}}), misc::ShapeError);
}

TEST(Hosvd, ExactAtMultilinearRanks)
{
    misc::Rng rng(2);
    const DenseTensor t = exact_tucker(rng, {5, 4, 6}, {2, 3, 2});
    EXPECT_EQ(misc::multilinear_ranks(t), (Ranks{2, 3, 2}));
    const auto model = misc::hosvd(t, {2, 3, 2});
    EXPECT_LE(relative_residual(t, model), 1e-10);
    for (const auto& f : model.factors) EXPECT_LE(orthonormality_defect(f), 1e-10);
    EXPECT_EQ(misc::reconstruct(model).shape(), t.shape());
}

TEST(Hosvd, ExampleTwoAtPublishedRanks)
{
    const DenseTensor t = fixture::example2_tensor();
    const auto model = misc::hosvd(t, {1, 3, 3});
    EXPECT_LE(relative_residual(t, model), 1e-10);
}

TEST(Hosvd, FullRanksReconstruct)
{
    misc::Rng rng(3);
    const DenseTensor t = oracle::random_tensor(rng, {3, 4, 2});
    EXPECT_LE(relative_residual(t, misc::hosvd(t, {3, 4, 2})), 1e-10);
}

TEST(Hosvd, RankOneCore)
{
    const std::array<Matrix, 3> u{Matrix(2, 1, std::vector<double>{1, 2}), Matrix(3, 1, std::vector<double>{0, 3, 4}),
                                  Matrix(2, 1, std::vector<double>{2, -1})};
    const DenseTensor t = misc::multilinear_product(DenseTensor({1, 1, 1}, 1.0), u);
    const auto model = misc::hosvd(t, {1, 1, 1});
    EXPECT_NEAR(std::abs(model.core.data()[0]), std::sqrt(5.0) * 5.0 * std::sqrt(5.0), 1e-12);
    EXPECT_LE(relative_residual(t, model), 1e-12);
}

TEST(Hosvd, RejectsBadRanks)
{
    const DenseTensor t({2, 3, 4});
    EXPECT_THROW(misc::hosvd(t, {1, 1}), misc::ShapeError);
    EXPECT_THROW(misc::hosvd(t, {3, 1, 1}), misc::ShapeError);
    EXPECT_THROW(misc::hosvd(t, {0, 1, 1}), misc::ShapeError);
}

TEST(Hosvd, PadsDegenerateRankRequest)
{
    const DenseTensor t = fixture::example2_tensor();
    const auto model = misc::hosvd(t, {2, 3, 4});
    for (const auto& f : model.factors) EXPECT_LE(orthonormality_defect(f), 1e-10);
    EXPECT_LE(relative_residual(t, model), 1e-10);
}

TEST(Hooi, FixedPointOnExactTucker)
{
    misc::Rng rng(4);
    const DenseTensor t = exact_tucker(rng, {6, 5, 4}, {2, 2, 2});
    const auto fit = misc::hooi(t, 2, {2, 2, 2}, {1, 1e-8});
    ASSERT_EQ(fit.residuals.size(), 1u);
    EXPECT_LE(fit.residuals[0], 1e-10 * misc::frobenius_norm(t));
}

TEST(Hooi, MonotoneAndNoWorseThanHosvd)
{
    misc::Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseTensor t = oracle::random_tensor(rng, {6, 5, 4});
        const auto fit = misc::hooi(t, 2, {2, 2, 2}, {10, 0.0});
        EXPECT_EQ(fit.residuals.size(), 10u);
        for (std::size_t n = 1; n < fit.residuals.size(); ++n) EXPECT_LE(fit.residuals[n], fit.residuals[n - 1] + 1e-12);
        EXPECT_LE(fit.residuals.back(), misc::tucker_residual(t, misc::hosvd(t, {2, 2, 2})) + 1e-12);
        for (const auto& f : fit.model.factors) EXPECT_LE(orthonormality_defect(f), 1e-10);
    }
}

TEST(Hooi, StopsOnResidualTolerance)
{
    misc::Rng rng(6);
    const DenseTensor t = oracle::random_tensor(rng, {5, 5, 5});
    const auto fit = misc::hooi(t, 3, {2, 2, 2}, {50, 1e-3});
    ASSERT_GE(fit.residuals.size(), 1u);
    EXPECT_LT(fit.residuals.size(), 50u);
    const std::size_t n = fit.residuals.size();
    if (n >= 2) {
        EXPECT_LT(fit.residuals[n - 2] - fit.residuals[n - 1], 1e-3);
    }
}

TEST(Hooi, InitialRanksFromMaxTargetCappedPerMode)
{
    EXPECT_EQ(misc::default_init_ranks({2, 10, 3}, {2, 3, 3}), (Ranks{2, 3, 3}));
    EXPECT_EQ(misc::default_init_ranks({4, 10, 6}, {1, 5, 2}), (Ranks{4, 5, 5}));
    misc::Rng rng(7);
    const DenseTensor t = oracle::random_tensor(rng, {4, 6, 3});
    EXPECT_THROW(misc::hooi(t, 5, {1, 2, 2}), misc::ShapeError);
    const auto fit = misc::hooi(t, misc::default_init_ranks(t.shape(), {1, 2, 2}), {1, 2, 2});
    EXPECT_EQ(fit.model.core.shape(), (misc::Shape{1, 2, 2}));
}

TEST(MultilinearRanks, Examples)
{
    EXPECT_EQ(misc::multilinear_ranks(fixture::example2_tensor()), (Ranks{1, 3, 3}));
    EXPECT_EQ(misc::multilinear_ranks(fixture::example1_tensor()), (Ranks{2, 3, 3}));
    EXPECT_EQ(brute_force_ranks(fixture::example1_tensor()), (Ranks{2, 3, 3}));
    EXPECT_EQ(misc::multilinear_ranks(DenseTensor({2, 3, 4})), (Ranks{0, 0, 0}));
}

TEST(MultilinearRanks, AgreeWithBruteForceOnRandomLabelTensors)
{
    misc::Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t nw = 1 + rng.below(4), ni = 1 + rng.below(5), nc = 2 + rng.below(3);
        std::vector<int> e(nw * ni);
        for (int& x : e) x = static_cast<int>(rng.below(nc + 1));
        const DenseTensor t = misc::binarize(misc::LabelMatrix(nw, ni, e, static_cast<int>(nc)));
        EXPECT_EQ(misc::multilinear_ranks(t), brute_force_ranks(t));
    }
}

TEST(MultilinearRanks, PerfectLabelingStructure)
{
    misc::Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t nw = 1 + rng.below(5), ni = 1 + rng.below(6);
        const int nc = 2 + static_cast<int>(rng.below(4));
        std::vector<int> truth(ni), e;
        for (int& x : truth) x = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(nc)));
        for (std::size_t w = 0; w < nw; ++w) e.insert(e.end(), truth.begin(), truth.end());
        const DenseTensor t = misc::binarize(misc::LabelMatrix(nw, ni, e, nc));
        const Ranks r = misc::multilinear_ranks(t);
        // Mode-2 and mode-3 ranks equal the number of distinct classes used,
        // which is min(Ni, Nc) when every class that fits is present.
        std::set<int> distinct(truth.begin(), truth.end());
        EXPECT_EQ(r, (Ranks{1, distinct.size(), distinct.size()}));
    }
}
