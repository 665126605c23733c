#pragma once

// Experiment runner: pure aggregators and their Tucker-completed counterparts
// over datasets, corruption levels and seeds, reported as an aligned text table
// or as CSV.

#include "misc/aggregate.hpp"
#include "misc/corrupt.hpp"
#include "misc/labels.hpp"
#include "misc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace misc {

inline constexpr const char* kReportCsvHeader =
    "dataset,strategy,seed,nonzero_rate,annotation_error_rate,estimation_error,wall_ms,outer_iters";

// A pure aggregator ("ds-em") or an aggregator wrapped in the Tucker
// completion loop ("ds-em+tucker").
struct Strategy {
    std::string aggregator;
    bool tucker = false;

    std::string name() const { return tucker ? aggregator + "+tucker" : aggregator; }

    static Strategy parse(const std::string& name)
    {
        const std::string suffix = "+tucker";
        Strategy s;
        if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            s.aggregator = name.substr(0, name.size() - suffix.size());
            s.tucker = true;
        } else {
            s.aggregator = name;
        }
        make_aggregator(s.aggregator); // validates the name
        return s;
    }
};

struct ReportRow {
    std::string dataset;
    std::string strategy;
    std::string seed;
    double nonzero_rate = 0.0;
    double annotation_error_rate = 0.0;
    double estimation_error = 0.0;
    double wall_ms = 0.0;
    double outer_iters = 0.0;
    bool summary = false;
    // Non-empty when the cell failed; the numeric fields are then meaningless.
    std::string error;
    // Labels produced by the cell (not part of the printed report).
    std::vector<int> labels;
};

struct RunReport {
    std::vector<ReportRow> rows;

    bool any_error() const
    {
        for (const auto& r : rows)
            if (!r.error.empty()) return true;
        return false;
    }
};

struct CellInput {
    std::string dataset;
    std::string seed;
    const LabelMatrix* labels = nullptr;
    // May be empty; the error columns are then NaN.
    const Truth* truth = nullptr;
};

// Runs one strategy on one label matrix. Exceptions become error rows.
// Wall time is recorded only when `timing` is set, so reports stay
// byte-reproducible by default.
inline ReportRow run_cell(const CellInput& in, const Strategy& strategy, const MiscConfig& base, bool timing = false)
{
    ReportRow row;
    row.dataset = in.dataset;
    row.strategy = strategy.name();
    row.seed = in.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const LabelMatrix& a = *in.labels;
        row.nonzero_rate = nonzero_rate(a);
        const bool scored = in.truth && !in.truth->empty();
        row.annotation_error_rate = scored ? annotation_error_rate(a, *in.truth) : std::nan("");
        if (strategy.tucker) {
            MiscConfig cfg = base;
            cfg.aggregator = strategy.aggregator;
            MiscOutcome out = run_misc(a, cfg);
            row.labels = std::move(out.result.labels);
            row.outer_iters = static_cast<double>(out.trace.size());
        } else {
            row.labels = make_aggregator(strategy.aggregator, base.em)(a).labels;
        }
        row.estimation_error = scored ? estimation_error(row.labels, *in.truth) : std::nan("");
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    if (timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return row;
}

inline RunReport run_benchmark(const CellInput& in, const std::vector<Strategy>& strategies, const MiscConfig& cfg,
                               bool timing = false)
{
    RunReport report;
    for (const auto& s : strategies) report.rows.push_back(run_cell(in, s, cfg, timing));
    return report;
}

// Sparsify-then-add-noise sweep. For trial t the seed is master_seed + t; the
// sparsified matrix is shared by every noise level of that trial.
struct SweepSpec {
    std::string dataset;
    LabelMatrix labels;
    Truth truth;
    // Sparsify to this nonzero rate first (skipped when unset).
    std::optional<double> nonzero_rate;
    std::vector<double> error_rates;
    std::vector<Strategy> strategies;
    int trials = 10;
    std::uint64_t master_seed = 1;
    MiscConfig misc;
    bool timing = false;
};

inline std::uint64_t sweep_sparsify_seed(std::uint64_t trial_seed) { return stream_seed(trial_seed, 0); }
inline std::uint64_t sweep_noise_seed(std::uint64_t trial_seed, std::size_t level) { return stream_seed(trial_seed, level + 1); }

namespace detail {

inline std::string format_rate(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

inline ReportRow summarize(const std::vector<const ReportRow*>& cells, const std::string& dataset,
                           const std::string& strategy)
{
    ReportRow s;
    s.dataset = dataset;
    s.strategy = strategy;
    s.summary = true;
    std::size_t n = 0;
    for (const ReportRow* r : cells) {
        if (!r->error.empty()) continue;
        ++n;
        s.nonzero_rate += r->nonzero_rate;
        s.annotation_error_rate += r->annotation_error_rate;
        s.estimation_error += r->estimation_error;
        s.wall_ms += r->wall_ms;
        s.outer_iters += r->outer_iters;
    }
    if (n == 0) {
        s.error = "no successful cells";
        s.seed = "mean";
        return s;
    }
    const double dn = static_cast<double>(n);
    s.nonzero_rate /= dn;
    s.annotation_error_rate /= dn;
    s.estimation_error /= dn;
    s.wall_ms /= dn;
    s.outer_iters /= dn;
    double var = 0.0;
    for (const ReportRow* r : cells)
        if (r->error.empty()) var += (r->estimation_error - s.estimation_error) * (r->estimation_error - s.estimation_error);
    const double sd = n > 1 ? std::sqrt(var / (dn - 1.0)) : 0.0;
    char buf[48];
    std::snprintf(buf, sizeof buf, "mean(sd=%.6f)", sd);
    s.seed = buf;
    return s;
}

} // namespace detail

// One row per (level, strategy, trial) in input order, then one summary row per
// (level, strategy) carrying means and the sample standard deviation of the
// estimation error.
inline RunReport run_sweep(const SweepSpec& spec)
{
    RunReport report;
    const std::size_t nlevels = spec.error_rates.size();
    const std::size_t nstrat = spec.strategies.size();
    std::vector<std::vector<std::vector<ReportRow>>> cells(nlevels, std::vector<std::vector<ReportRow>>(nstrat));

    for (int t = 0; t < spec.trials; ++t) {
        const std::uint64_t trial_seed = spec.master_seed + static_cast<std::uint64_t>(t);
        std::optional<LabelMatrix> sparse;
        std::string setup_error;
        try {
            sparse = spec.nonzero_rate ? sparsify(spec.labels, *spec.nonzero_rate, sweep_sparsify_seed(trial_seed))
                                       : spec.labels;
        } catch (const std::exception& e) {
            setup_error = e.what();
        }
        for (std::size_t l = 0; l < nlevels; ++l) {
            const std::string dataset = spec.dataset + "@" + detail::format_rate(spec.error_rates[l]);
            std::optional<LabelMatrix> noisy;
            std::string error = setup_error;
            if (error.empty()) try {
                    noisy = inject_noise(*sparse, spec.truth, spec.error_rates[l], sweep_noise_seed(trial_seed, l));
                } catch (const std::exception& e) {
                    error = e.what();
                }
            for (std::size_t s = 0; s < nstrat; ++s) {
                ReportRow row;
                if (error.empty()) {
                    row = run_cell({dataset, std::to_string(trial_seed), &*noisy, &spec.truth}, spec.strategies[s],
                                   spec.misc, spec.timing);
                } else {
                    row.dataset = dataset;
                    row.strategy = spec.strategies[s].name();
                    row.seed = std::to_string(trial_seed);
                    row.error = error;
                }
                cells[l][s].push_back(std::move(row));
            }
        }
    }

    for (std::size_t l = 0; l < nlevels; ++l)
        for (std::size_t s = 0; s < nstrat; ++s)
            for (auto& row : cells[l][s]) report.rows.push_back(row);
    for (std::size_t l = 0; l < nlevels; ++l)
        for (std::size_t s = 0; s < nstrat; ++s) {
            std::vector<const ReportRow*> ptrs;
            for (const auto& row : cells[l][s]) ptrs.push_back(&row);
            report.rows.push_back(detail::summarize(ptrs, spec.dataset + "@" + detail::format_rate(spec.error_rates[l]),
                                                    spec.strategies[s].name()));
        }
    return report;
}

namespace detail {

inline std::string csv_number(double x, const char* fmt)
{
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

// Failed cells print "error: <message>" in the estimation_error column.
inline void write_csv(std::ostream& out, const RunReport& report)
{
    out << kReportCsvHeader << '\n';
    for (const auto& r : report.rows) {
        out << detail::csv_field(r.dataset) << ',' << detail::csv_field(r.strategy) << ',' << detail::csv_field(r.seed)
            << ',';
        if (!r.error.empty()) {
            out << ",," << detail::csv_field("error: " + r.error) << ",,\n";
            continue;
        }
        out << detail::csv_number(r.nonzero_rate, "%.6f") << ',' << detail::csv_number(r.annotation_error_rate, "%.6f")
            << ',' << detail::csv_number(r.estimation_error, "%.6f") << ',' << detail::csv_number(r.wall_ms, "%.1f")
            << ',' << detail::csv_number(r.outer_iters, r.summary ? "%.2f" : "%.0f") << '\n';
    }
}

// Aligned table with rates shown as percentages.
inline void write_text(std::ostream& out, const RunReport& report)
{
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"dataset", "strategy", "seed", "nonzero%", "annot.err%", "est.err%", "wall_ms", "outer"});
    for (const auto& r : report.rows) {
        if (!r.error.empty()) {
            cells.push_back({r.dataset, r.strategy, r.seed, "-", "-", "ERROR: " + r.error, "-", "-"});
            continue;
        }
        cells.push_back({r.dataset, r.strategy, r.seed, detail::csv_number(100.0 * r.nonzero_rate, "%.2f"),
                         detail::csv_number(100.0 * r.annotation_error_rate, "%.2f"),
                         detail::csv_number(100.0 * r.estimation_error, "%.2f"), detail::csv_number(r.wall_ms, "%.1f"),
                         detail::csv_number(r.outer_iters, r.summary ? "%.2f" : "%.0f")});
    }
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const bool left = c < 3;
            const std::string pad(width[c] - row[c].size(), ' ');
            out << (c ? "  " : "") << (left ? row[c] + pad : pad + row[c]);
        }
        out << '\n';
    }
}

} // namespace misc
