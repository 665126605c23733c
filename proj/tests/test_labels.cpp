#include "fixtures.hpp"

#include "misc/labels.hpp"
#include "misc/rng.hpp"

#include <gtest/gtest.h>

using misc::DenseTensor;
using misc::LabelMatrix;

TEST(LabelMatrix, InfersAndValidatesClasses)
{
    EXPECT_EQ(LabelMatrix::from_rows({{1, 0, 4}, {1, 3, 0}}).n_classes(), 4);
    EXPECT_EQ(LabelMatrix::from_rows({{0, 0}}).n_classes(), 1);
    EXPECT_EQ(LabelMatrix::from_rows({{1, 2}}, 5).n_classes(), 5);
    EXPECT_THROW(LabelMatrix::from_rows({{1, 3}}, 2), misc::ShapeError);
    EXPECT_THROW(LabelMatrix::from_rows({{1, -1}}), misc::ShapeError);
    EXPECT_THROW(LabelMatrix::from_rows({{1, 2}, {1}}), misc::ShapeError);
    EXPECT_EQ(fixture::example1_labels().label_count(), 4u);
}

TEST(Binarize, ExampleOneBitExact)
{
    EXPECT_EQ(misc::binarize(fixture::example1_labels()), fixture::example1_tensor());
    EXPECT_EQ(misc::binarize(fixture::example2_labels()), fixture::example2_tensor());
}

TEST(Binarize, ZeroMatrix)
{
    EXPECT_EQ(misc::binarize(LabelMatrix(2, 3, 4)), DenseTensor({2, 3, 4}));
}

TEST(Binarize, FiberSumsAreIndicators)
{
    misc::Rng rng(1);
    std::vector<int> e(6 * 7);
    for (int& x : e) x = static_cast<int>(rng.below(5));
    const LabelMatrix a(6, 7, e, 4);
    const DenseTensor t = misc::binarize(a);
    for (std::size_t w = 0; w < 6; ++w)
        for (std::size_t i = 0; i < 7; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < 4; ++c) s += t(w, i, c);
            EXPECT_EQ(s, a(w, i) ? 1.0 : 0.0);
        }
}

TEST(BinarizeLabels, ExampleTwoSlice)
{
    const std::vector<int> labels{1, 3, 4};
    EXPECT_EQ(misc::binarize_labels(labels, 4), misc::slice_mode1(fixture::example2_tensor(), 0));
    const std::vector<int> single{1};
    const DenseTensor s = misc::binarize_labels(single, 3);
    EXPECT_EQ(s(0, 0, 0), 1.0);
    EXPECT_EQ(s(0, 0, 1) + s(0, 0, 2), 0.0);
    const std::vector<int> bad{0};
    EXPECT_THROW(misc::binarize_labels(bad, 3), misc::ShapeError);
}

TEST(DecodeArgmax, InvertsBinarizeOnCompleteInput)
{
    const LabelMatrix a = LabelMatrix::from_rows({{2, 1, 3}, {3, 3, 1}}, 3);
    EXPECT_EQ(misc::decode_argmax(misc::binarize(a)), a);
}

TEST(DecodeArgmax, ExampleOneLabeledFibers)
{
    const LabelMatrix d = misc::decode_argmax(fixture::example1_tensor());
    EXPECT_EQ(d(0, 0), 1);
    EXPECT_EQ(d(0, 2), 4);
    EXPECT_EQ(d(1, 0), 1);
    EXPECT_EQ(d(1, 1), 3);
}

TEST(DecodeArgmax, TiesAndZeroFibers)
{
    DenseTensor t({1, 2, 4});
    t(0, 0, 0) = 0.2;
    t(0, 0, 1) = 0.9;
    t(0, 0, 2) = 0.9;
    t(0, 0, 3) = 0.1;
    const LabelMatrix d = misc::decode_argmax(t);
    EXPECT_EQ(d(0, 0), 2);
    EXPECT_EQ(d(0, 1), 1);
}

TEST(Metrics, NonzeroRate)
{
    EXPECT_NEAR(misc::nonzero_rate(fixture::example1_labels()), 4.0 / 6.0, 1e-15);
}

TEST(Metrics, ErrorRatesRestrictToKnownTruth)
{
    const LabelMatrix a = LabelMatrix::from_rows({{1, 2, 2}, {1, 0, 1}}, 2);
    EXPECT_DOUBLE_EQ(misc::annotation_error_rate(a, {1, 1, 2}), 2.0 / 5.0);
    EXPECT_DOUBLE_EQ(misc::annotation_error_rate(a, {1, 0, 0}), 0.0);
    EXPECT_THROW(misc::annotation_error_rate(a, {0, 0, 0}), std::domain_error);
    const std::vector<int> pred{1, 2, 1};
    EXPECT_DOUBLE_EQ(misc::estimation_error(pred, {1, 2, 1}), 0.0);
    EXPECT_DOUBLE_EQ(misc::estimation_error(pred, {1, 1, 0}), 0.5);
    EXPECT_THROW(misc::estimation_error(pred, {0, 0, 0}), std::domain_error);
    EXPECT_THROW(misc::estimation_error(pred, {1, 1}), misc::ShapeError);
}

TEST(Metrics, InvariantUnderWorkerPermutation)
{
    const LabelMatrix a = LabelMatrix::from_rows({{1, 2, 0}, {2, 0, 1}, {0, 1, 1}}, 2);
    const LabelMatrix b = LabelMatrix::from_rows({{0, 1, 1}, {1, 2, 0}, {2, 0, 1}}, 2);
    const misc::Truth truth{1, 2, 1};
    EXPECT_EQ(misc::nonzero_rate(a), misc::nonzero_rate(b));
    EXPECT_EQ(misc::annotation_error_rate(a, truth), misc::annotation_error_rate(b, truth));
}

TEST(ArgmaxClass, LowestIndexWins)
{
    const std::vector<double> s{0.5, 0.5};
    EXPECT_EQ(misc::argmax_class(s), 1);
    const std::vector<double> z{0, 0, 0};
    EXPECT_EQ(misc::argmax_class(z), 1);
}
