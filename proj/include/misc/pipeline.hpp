#pragma once

// The complete-aggregate loop: append the current aggregate as an extra worker
// slice, take a low-rank Tucker approximation of the stacked label tensor, read
// the aggregate back off the last slice, and repeat until it stops changing.
// The densified label matrix is then handed to the aggregator once more.

#include "misc/aggregate.hpp"
#include "misc/labels.hpp"
#include "misc/tensor.hpp"
#include "misc/tucker.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace misc {

struct MiscConfig {
    // Tucker ranks (R1, R2, R3); empty selects default_misc_ranks().
    Ranks ranks;
    // HOOI initial rank r0; 0 selects the largest target rank capped per mode.
    std::size_t init_rank = 0;
    StopRule hooi_stop;
    int max_outer = 20;
    std::string aggregator = "ds-em";
    EmConfig em;
};

struct Completion {
    DenseTensor completed;
    double residual = 0.0;
};

// Tensor in, completed tensor out.
using Completer = std::function<Completion(const DenseTensor&)>;

struct MiscIteration {
    std::vector<int> slice_labels;
    double residual = 0.0;
    // Number of items whose slice label differs from the previous iteration
    // (the initial aggregate for the first one).
    std::size_t changed = 0;
};

struct MiscOutcome {
    AggregationResult result;
    // (Nw+1) x Ni densified label matrix; the last row is the appended aggregate.
    LabelMatrix completed;
    std::vector<MiscIteration> trace;
};

// (min(Nw+1, 2), min(Ni, Nc), min(Ni, Nc)).
inline Ranks default_misc_ranks(std::size_t n_workers, std::size_t n_items, std::size_t n_classes)
{
    const std::size_t r = std::min(n_items, n_classes);
    return {std::min<std::size_t>(n_workers + 1, 2), r, r};
}

inline Ranks resolved_ranks(const LabelMatrix& a, const MiscConfig& cfg)
{
    return cfg.ranks.empty()
               ? default_misc_ranks(a.n_workers(), a.n_items(), static_cast<std::size_t>(a.n_classes()))
               : cfg.ranks;
}

inline Completer tucker_completer(Ranks ranks, std::size_t init_rank, StopRule stop)
{
    return [ranks = std::move(ranks), init_rank, stop](const DenseTensor& t) {
        const Ranks init = init_rank == 0 ? default_init_ranks(t.shape(), ranks) : Ranks(t.order(), init_rank);
        HooiResult fit = hooi(t, init, ranks, stop);
        return Completion{reconstruct(fit.model), fit.residuals.back()};
    };
}

inline Completer tucker_completer(const LabelMatrix& a, const MiscConfig& cfg)
{
    return tucker_completer(resolved_ranks(a, cfg), cfg.init_rank, cfg.hooi_stop);
}

namespace detail {

struct CompletionLoop {
    LabelMatrix completed;
    std::vector<MiscIteration> trace;
};

inline CompletionLoop run_completion_loop(const LabelMatrix& a, const MiscConfig& cfg, const Aggregator& aggregate,
                                          const Completer& complete)
{
    if (cfg.max_outer < 1) throw std::invalid_argument("run_misc: max_outer must be >= 1");
    if (!cfg.ranks.empty()) {
        if (cfg.ranks.size() != 3) throw ShapeError("run_misc: expected three Tucker ranks");
        const Shape dims{a.n_workers() + 1, a.n_items(), static_cast<std::size_t>(a.n_classes())};
        for (std::size_t k = 0; k < 3; ++k)
            if (cfg.ranks[k] < 1 || cfg.ranks[k] > dims[k])
                throw ShapeError("run_misc: rank " + std::to_string(cfg.ranks[k]) + " for mode " +
                                 std::to_string(k + 1) + " outside [1, " + std::to_string(dims[k]) + "]");
    }

    const DenseTensor raw = binarize(a);
    std::vector<int> slice = aggregate(a).labels;
    CompletionLoop loop;
    DenseTensor completed;
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        const DenseTensor target = concat_mode1(raw, binarize_labels(slice, a.n_classes()));
        Completion c = complete(target);
        completed = std::move(c.completed);

        MiscIteration it;
        const LabelMatrix decoded = decode_argmax(slice_mode1(completed, a.n_workers()));
        it.slice_labels.assign(decoded.entries().begin(), decoded.entries().end());
        it.residual = c.residual;
        for (std::size_t i = 0; i < slice.size(); ++i)
            if (slice[i] != it.slice_labels[i]) ++it.changed;
        slice = it.slice_labels;
        const bool stable = it.changed == 0;
        loop.trace.push_back(std::move(it));
        if (stable) break;
    }
    loop.completed = decode_argmax(completed);
    return loop;
}

} // namespace detail

inline MiscOutcome run_misc(const LabelMatrix& a, const MiscConfig& cfg, const Completer& complete)
{
    const Aggregator aggregate = make_aggregator(cfg.aggregator, cfg.em);
    auto loop = detail::run_completion_loop(a, cfg, aggregate, complete);
    MiscOutcome out;
    out.result = aggregate(loop.completed);
    out.completed = std::move(loop.completed);
    out.trace = std::move(loop.trace);
    return out;
}

inline MiscOutcome run_misc(const LabelMatrix& a, const MiscConfig& cfg = {})
{
    return run_misc(a, cfg, tucker_completer(a, cfg));
}

// The densified (Nw+1) x Ni label matrix, without the final aggregation.
inline LabelMatrix complete_only(const LabelMatrix& a, const MiscConfig& cfg = {})
{
    return detail::run_completion_loop(a, cfg, make_aggregator(cfg.aggregator, cfg.em), tucker_completer(a, cfg))
        .completed;
}

} // namespace misc
