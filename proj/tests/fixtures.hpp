#pragma once

#include "misc/labels.hpp"
#include "misc/tensor.hpp"

#include <cstddef>
#include <initializer_list>

namespace fixture {

// Builds a Nw x Ni x Nc tensor from per-worker Ni x Nc slices written row by row.
inline misc::DenseTensor from_slices(std::initializer_list<std::initializer_list<std::initializer_list<double>>> slices)
{
    const std::size_t nw = slices.size();
    const std::size_t ni = slices.begin()->size();
    const std::size_t nc = slices.begin()->begin()->size();
    misc::DenseTensor t({nw, ni, nc});
    std::size_t w = 0;
    for (const auto& slice : slices) {
        std::size_t i = 0;
        for (const auto& row : slice) {
            std::size_t c = 0;
            for (double x : row) t(w, i, c++) = x;
            ++i;
        }
        ++w;
    }
    return t;
}

inline misc::LabelMatrix example1_labels() { return misc::LabelMatrix::from_rows({{1, 0, 4}, {1, 3, 0}}, 4); }

// The 2 x 3 x 4 label tensor printed for the two-worker, three-item example.
inline misc::DenseTensor example1_tensor()
{
    return from_slices({{{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}},
                        {{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 0}}});
}

inline misc::LabelMatrix example2_labels() { return misc::LabelMatrix::from_rows({{1, 3, 4}, {1, 3, 4}}, 4); }

inline misc::DenseTensor example2_tensor()
{
    return from_slices({{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}},
                        {{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}});
}

} // namespace fixture
