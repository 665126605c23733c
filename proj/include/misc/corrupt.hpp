#pragma once

// Synthetic Dawid-Skene data and the sparsify / add-noise corruption used to
// stress aggregators on thin, noisy annotations.

#include "misc/labels.hpp"
#include "misc/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace misc {

struct SynthConfig {
    std::size_t n_workers = 50;
    std::size_t n_items = 200;
    int n_classes = 3;
    // Mean probability that a worker reports the true class; the remaining mass
    // is spread evenly over the wrong classes.
    double accuracy = 0.7;
    // Per-worker accuracy is drawn uniformly from accuracy +/- spread (clipped
    // to [0, 1]).
    double accuracy_spread = 0.0;
    // Probability that a (worker, item) pair is labeled.
    double density = 1.0;
    std::uint64_t seed = 1;
};

struct SynthData {
    LabelMatrix labels;
    Truth truth;
    std::vector<double> worker_accuracy;
};

namespace detail {

// Uniform wrong class for true class `truth` among 1..nc.
inline int random_wrong_class(Rng& rng, int truth, int nc)
{
    const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(nc - 1))) + 1;
    return r < truth ? r : r + 1;
}

} // namespace detail

inline SynthData synthesize(const SynthConfig& cfg)
{
    if (cfg.n_classes < 2) throw std::invalid_argument("synthesize: need at least two classes");
    if (cfg.n_workers == 0 || cfg.n_items == 0) throw std::invalid_argument("synthesize: empty dimensions");
    Rng rng(cfg.seed);
    SynthData out;
    out.truth.resize(cfg.n_items);
    for (int& t : out.truth) t = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_classes))) + 1;
    out.worker_accuracy.resize(cfg.n_workers);
    for (double& acc : out.worker_accuracy)
        acc = std::clamp(cfg.accuracy + cfg.accuracy_spread * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);

    std::vector<int> entries(cfg.n_workers * cfg.n_items, 0);
    for (std::size_t w = 0; w < cfg.n_workers; ++w)
        for (std::size_t i = 0; i < cfg.n_items; ++i) {
            // Both draws are always taken so streams do not depend on outcomes.
            const double observe = rng.uniform();
            const double correct = rng.uniform();
            const int wrong = detail::random_wrong_class(rng, out.truth[i], cfg.n_classes);
            if (observe >= cfg.density) continue;
            entries[w * cfg.n_items + i] = correct < out.worker_accuracy[w] ? out.truth[i] : wrong;
        }
    out.labels = LabelMatrix(cfg.n_workers, cfg.n_items, std::move(entries), cfg.n_classes);
    return out;
}

// Delete labels uniformly at random until nonzero_rate(a) <= target, never
// removing the last label of an item.
inline LabelMatrix sparsify(const LabelMatrix& a, double target_nonzero_rate, std::uint64_t seed)
{
    const double current = nonzero_rate(a);
    if (target_nonzero_rate > current)
        throw std::invalid_argument("sparsify: target rate " + std::to_string(target_nonzero_rate) +
                                    " exceeds current rate " + std::to_string(current));
    const double cells = static_cast<double>(a.n_workers() * a.n_items());

    std::vector<std::pair<std::size_t, std::size_t>> labeled;
    std::vector<std::size_t> per_item(a.n_items(), 0);
    for (std::size_t w = 0; w < a.n_workers(); ++w)
        for (std::size_t i = 0; i < a.n_items(); ++i)
            if (a(w, i) != 0) {
                labeled.emplace_back(w, i);
                ++per_item[i];
            }

    Rng rng(seed);
    rng.shuffle(std::span(labeled));
    LabelMatrix out = a;
    std::size_t remaining = labeled.size();
    for (const auto& [w, i] : labeled) {
        if (static_cast<double>(remaining) / cells <= target_nonzero_rate) break;
        if (per_item[i] <= 1) continue;
        out.set(w, i, 0);
        --per_item[i];
        --remaining;
    }
    if (static_cast<double>(remaining) / cells > target_nonzero_rate)
        throw std::invalid_argument("sparsify: target rate " + std::to_string(target_nonzero_rate) +
                                    " unreachable while keeping one label per item");
    return out;
}

// Replace randomly chosen correct labels (on items with known truth) with a
// uniformly drawn wrong class until annotation_error_rate >= target.
inline LabelMatrix inject_noise(const LabelMatrix& a, const Truth& truth, double target_error_rate, std::uint64_t seed)
{
    if (truth.size() != a.n_items()) throw ShapeError("inject_noise: truth length != item count");
    if (target_error_rate > 1.0) throw std::invalid_argument("inject_noise: target error rate above 1");

    std::vector<std::pair<std::size_t, std::size_t>> correct;
    std::size_t labels = 0, wrong = 0;
    for (std::size_t w = 0; w < a.n_workers(); ++w)
        for (std::size_t i = 0; i < a.n_items(); ++i) {
            const int c = a(w, i);
            if (c == 0 || truth[i] == 0) continue;
            ++labels;
            if (c == truth[i])
                correct.emplace_back(w, i);
            else
                ++wrong;
        }
    if (labels == 0) throw std::invalid_argument("inject_noise: no labels on items with known truth");
    const auto reached = [&] { return static_cast<double>(wrong) / static_cast<double>(labels) >= target_error_rate; };
    if (reached()) return a;
    if (a.n_classes() < 2) throw std::invalid_argument("inject_noise: a single class cannot be made wrong");

    Rng rng(seed);
    rng.shuffle(std::span(correct));
    LabelMatrix out = a;
    for (const auto& [w, i] : correct) {
        out.set(w, i, detail::random_wrong_class(rng, truth[i], a.n_classes()));
        ++wrong;
        if (reached()) return out;
    }
    throw std::invalid_argument("inject_noise: target error rate unreachable");
}

} // namespace misc
