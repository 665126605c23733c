#pragma once

// Label matrices, their one-hot tensor encoding and the dataset metrics.
//
// Class ids are 1..Nc and 0 marks an unlabeled (worker, item) pair. Worker and
// item indices are 0-based.

#include "misc/errors.hpp"
#include "misc/tensor.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace misc {

// Per-item ground truth; 0 marks an item without a known label.
using Truth = std::vector<int>;

class LabelMatrix {
public:
    LabelMatrix() = default;

    // n_classes == 0 infers Nc from the largest entry (at least 1).
    LabelMatrix(std::size_t n_workers, std::size_t n_items, std::vector<int> entries, int n_classes = 0)
        : n_workers_(n_workers), n_items_(n_items), entries_(std::move(entries))
    {
        if (entries_.size() != n_workers_ * n_items_)
            throw ShapeError("LabelMatrix: entry count does not match " + std::to_string(n_workers_) + "x" +
                             std::to_string(n_items_));
        const int max_entry = entries_.empty() ? 0 : *std::max_element(entries_.begin(), entries_.end());
        n_classes_ = n_classes > 0 ? n_classes : std::max(1, max_entry);
        for (int e : entries_)
            if (e < 0 || e > n_classes_)
                throw ShapeError("LabelMatrix: entry " + std::to_string(e) + " outside [0, " +
                                 std::to_string(n_classes_) + "]");
    }

    LabelMatrix(std::size_t n_workers, std::size_t n_items, int n_classes)
        : LabelMatrix(n_workers, n_items, std::vector<int>(n_workers * n_items, 0), n_classes)
    {
    }

    static LabelMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows, int n_classes = 0)
    {
        const std::size_t nw = rows.size();
        const std::size_t ni = nw ? rows.begin()->size() : 0;
        std::vector<int> entries;
        entries.reserve(nw * ni);
        for (const auto& row : rows) {
            if (row.size() != ni) throw ShapeError("LabelMatrix::from_rows: ragged rows");
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return LabelMatrix(nw, ni, std::move(entries), n_classes);
    }

    std::size_t n_workers() const noexcept { return n_workers_; }
    std::size_t n_items() const noexcept { return n_items_; }
    int n_classes() const noexcept { return n_classes_; }

    int operator()(std::size_t w, std::size_t i) const noexcept { return entries_[w * n_items_ + i]; }

    void set(std::size_t w, std::size_t i, int label)
    {
        if (label < 0 || label > n_classes_)
            throw ShapeError("LabelMatrix::set: label " + std::to_string(label) + " outside [0, " +
                             std::to_string(n_classes_) + "]");
        entries_[w * n_items_ + i] = label;
    }

    std::span<const int> entries() const noexcept { return entries_; }

    std::size_t label_count() const
    {
        return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](int e) { return e != 0; }));
    }

    bool operator==(const LabelMatrix&) const = default;

private:
    std::size_t n_workers_ = 0;
    std::size_t n_items_ = 0;
    int n_classes_ = 1;
    std::vector<int> entries_;
};

// Inferred labels plus the per-item class posterior (Ni x Nc, rows sum to 1).
struct AggregationResult {
    std::vector<int> labels;
    Matrix posterior;
};

// 1-based index of the largest value; ties go to the lowest index.
inline int argmax_class(std::span<const double> scores)
{
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
    return static_cast<int>(best) + 1;
}

// Labels from posterior rows by argmax.
inline AggregationResult result_from_posterior(Matrix posterior)
{
    AggregationResult out;
    out.labels.resize(posterior.rows());
    std::vector<double> row(posterior.cols());
    for (std::size_t i = 0; i < posterior.rows(); ++i) {
        for (std::size_t c = 0; c < posterior.cols(); ++c) row[c] = posterior(i, c);
        out.labels[i] = argmax_class(row);
    }
    out.posterior = std::move(posterior);
    return out;
}

// Nw x Ni x Nc tensor with T(w, i, c-1) = 1 iff A(w, i) = c.
inline DenseTensor binarize(const LabelMatrix& a)
{
    DenseTensor t({a.n_workers(), a.n_items(), static_cast<std::size_t>(a.n_classes())});
    for (std::size_t w = 0; w < a.n_workers(); ++w)
        for (std::size_t i = 0; i < a.n_items(); ++i)
            if (const int c = a(w, i); c > 0) t(w, i, static_cast<std::size_t>(c - 1)) = 1.0;
    return t;
}

// One-hot 1 x Ni x Nc slice of hard labels.
inline DenseTensor binarize_labels(std::span<const int> labels, int n_classes)
{
    if (n_classes < 1) throw ShapeError("binarize_labels: n_classes must be >= 1");
    DenseTensor s({1, labels.size(), static_cast<std::size_t>(n_classes)});
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > n_classes)
            throw ShapeError("binarize_labels: label " + std::to_string(labels[i]) + " outside [1, " +
                             std::to_string(n_classes) + "]");
        s(0, i, static_cast<std::size_t>(labels[i] - 1)) = 1.0;
    }
    return s;
}

inline DenseTensor binarize_prediction(const AggregationResult& r)
{
    return binarize_labels(r.labels, static_cast<int>(r.posterior.cols()));
}

// Every (w, i) gets the class with the largest 3-mode fiber entry (lowest class
// on ties), so the result has no unlabeled entries.
inline LabelMatrix decode_argmax(const DenseTensor& t)
{
    if (t.order() != 3) throw ShapeError("decode_argmax: tensor must be 3-way");
    const std::size_t nw = t.dim(0), ni = t.dim(1), nc = t.dim(2);
    std::vector<int> entries(nw * ni);
    std::vector<double> fiber(nc);
    for (std::size_t w = 0; w < nw; ++w)
        for (std::size_t i = 0; i < ni; ++i) {
            for (std::size_t c = 0; c < nc; ++c) fiber[c] = t(w, i, c);
            entries[w * ni + i] = argmax_class(fiber);
        }
    return LabelMatrix(nw, ni, std::move(entries), static_cast<int>(nc));
}

// #labels / (#workers * #items).
inline double nonzero_rate(const LabelMatrix& a)
{
    const std::size_t cells = a.n_workers() * a.n_items();
    if (cells == 0) return 0.0;
    return static_cast<double>(a.label_count()) / static_cast<double>(cells);
}

// #wrong labels / #labels, counting only labels on items with known truth.
inline double annotation_error_rate(const LabelMatrix& a, const Truth& truth)
{
    if (truth.size() != a.n_items()) throw ShapeError("annotation_error_rate: truth length != item count");
    std::size_t labels = 0, wrong = 0;
    for (std::size_t w = 0; w < a.n_workers(); ++w)
        for (std::size_t i = 0; i < a.n_items(); ++i) {
            const int c = a(w, i);
            if (c == 0 || truth[i] == 0) continue;
            ++labels;
            if (c != truth[i]) ++wrong;
        }
    if (labels == 0) throw std::domain_error("annotation_error_rate: no labels on items with known truth");
    return static_cast<double>(wrong) / static_cast<double>(labels);
}

// Fraction of items with known truth whose predicted label differs.
inline double estimation_error(std::span<const int> predicted, const Truth& truth)
{
    if (predicted.size() != truth.size()) throw ShapeError("estimation_error: prediction length != truth length");
    std::size_t known = 0, wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 0) continue;
        ++known;
        if (predicted[i] != truth[i]) ++wrong;
    }
    if (known == 0) throw std::domain_error("estimation_error: no items with known truth");
    return static_cast<double>(wrong) / static_cast<double>(known);
}

} // namespace misc
