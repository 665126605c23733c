// Command-line front end: pure aggregation, Tucker-completed aggregation,
// sparsify/noise sweeps and synthetic data generation.

#include "misc/misc.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
    std::string data;
    std::string truth;
    std::string name;
    int classes = 0;
    std::string aggregator = "ds-em";
    std::string ranks;
    std::size_t init_rank = 0;
    int max_sweeps = 25;
    int max_outer = 20;
    double tol = 1e-8;
    double em_tol = 1e-6;
    int em_iters = 100;
    double smoothing = 0.01;
    std::uint64_t seed = 1;
    std::optional<double> nonzero_rate;
    std::string error_rate;
    std::string format = "text";
    bool timing = false;
    std::string output;
};

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> out;
    for (const auto& tok : split_list(s)) out.push_back(std::stod(tok));
    return out;
}

misc::MiscConfig misc_config(const CommonOptions& o)
{
    misc::MiscConfig cfg;
    if (!o.ranks.empty()) {
        for (const auto& tok : split_list(o.ranks)) cfg.ranks.push_back(static_cast<std::size_t>(std::stoul(tok)));
        if (cfg.ranks.size() != 3) throw std::invalid_argument("--ranks expects R1,R2,R3");
    }
    cfg.init_rank = o.init_rank;
    cfg.hooi_stop.max_sweeps = o.max_sweeps;
    cfg.hooi_stop.residual_tol = o.tol;
    cfg.max_outer = o.max_outer;
    cfg.aggregator = o.aggregator;
    cfg.em.tol = o.em_tol;
    cfg.em.max_iters = o.em_iters;
    cfg.em.smoothing = o.smoothing;
    return cfg;
}

misc::Dataset load(const CommonOptions& o)
{
    std::optional<std::string> truth;
    if (!o.truth.empty()) truth = o.truth;
    misc::Dataset ds = misc::load_dataset(o.data, truth, o.classes);
    if (!o.name.empty()) ds.name = o.name;
    if (ds.duplicates)
        std::cerr << "warning: " << ds.duplicates << " duplicate (worker,item) records; last occurrence kept\n";
    if (!ds.orphan_truth.empty())
        std::cerr << "warning: " << ds.orphan_truth.size() << " truth records for items without labels ignored\n";
    return ds;
}

void emit(const CommonOptions& o, const misc::RunReport& report)
{
    if (o.format == "csv")
        misc::write_csv(std::cout, report);
    else
        misc::write_text(std::cout, report);
}

// Applies --nonzero-rate / --error-rate (first level) with the same seeding
// as trial `seed` of a sweep.
misc::LabelMatrix corrupted(const CommonOptions& o, const misc::Dataset& ds)
{
    misc::LabelMatrix a = ds.labels;
    if (o.nonzero_rate) a = misc::sparsify(a, *o.nonzero_rate, misc::sweep_sparsify_seed(o.seed));
    if (const auto levels = parse_doubles(o.error_rate); !levels.empty()) {
        if (!ds.has_truth()) throw std::invalid_argument("--error-rate needs --truth");
        a = misc::inject_noise(a, ds.truth, levels.front(), misc::sweep_noise_seed(o.seed, 0));
    }
    return a;
}

int run_single(const CommonOptions& o, bool tucker)
{
    const misc::Dataset ds = load(o);
    const misc::LabelMatrix a = corrupted(o, ds);
    misc::Strategy strategy = misc::Strategy::parse(o.aggregator);
    strategy.tucker = strategy.tucker || tucker;
    misc::RunReport report =
        misc::run_benchmark({ds.name, std::to_string(o.seed), &a, &ds.truth}, {strategy}, misc_config(o), o.timing);
    emit(o, report);
    if (!o.output.empty() && report.rows.front().error.empty()) {
        std::ofstream out(o.output);
        const auto& labels = report.rows.front().labels;
        for (std::size_t i = 0; i < labels.size(); ++i) out << ds.item_ids[i] << ',' << labels[i] << '\n';
    }
    if (report.any_error()) {
        std::cerr << "error: " << report.rows.front().error << '\n';
        return 1;
    }
    return 0;
}

int run_sweep(const CommonOptions& o, int trials)
{
    const misc::Dataset ds = load(o);
    if (!ds.has_truth()) throw std::invalid_argument("sweep needs --truth");
    misc::SweepSpec spec;
    spec.dataset = ds.name;
    spec.labels = ds.labels;
    spec.truth = ds.truth;
    spec.nonzero_rate = o.nonzero_rate;
    spec.error_rates = parse_doubles(o.error_rate);
    if (spec.error_rates.empty()) spec.error_rates.push_back(0.0);
    for (const auto& agg : split_list(o.aggregator)) {
        spec.strategies.push_back(misc::Strategy::parse(agg));
        if (!spec.strategies.back().tucker) spec.strategies.push_back(misc::Strategy::parse(agg + "+tucker"));
    }
    spec.trials = trials;
    spec.master_seed = o.seed;
    spec.misc = misc_config(o);
    spec.timing = o.timing;
    const misc::RunReport report = misc::run_sweep(spec);
    emit(o, report);
    return report.any_error() ? 1 : 0;
}

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--data", o.data, "Label file (worker,item,label per line)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--truth", o.truth, "Truth file (item,label per line)")->check(CLI::ExistingFile);
    cmd->add_option("--name", o.name, "Dataset name in reports (default: label file stem)");
    cmd->add_option("--classes", o.classes, "Number of classes (default: largest label)");
    cmd->add_option("--aggregator", o.aggregator, "mv, ds-em or ds-mf (comma list for sweep)");
    cmd->add_option("--ranks", o.ranks, "Tucker ranks R1,R2,R3");
    cmd->add_option("--init-rank", o.init_rank, "HOOI initial rank (0: largest target rank)");
    cmd->add_option("--max-sweeps", o.max_sweeps, "HOOI sweep cap")->check(CLI::PositiveNumber);
    cmd->add_option("--max-outer", o.max_outer, "Complete-aggregate iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "HOOI residual decrease tolerance");
    cmd->add_option("--em-tol", o.em_tol, "Dawid-Skene posterior change tolerance");
    cmd->add_option("--em-iters", o.em_iters, "Dawid-Skene iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--smoothing", o.smoothing, "Dawid-Skene confusion pseudo-count");
    cmd->add_option("--seed", o.seed, "Random seed (default: $MISC_SEED or 1)");
    cmd->add_option("--nonzero-rate", o.nonzero_rate, "Sparsify to this nonzero rate first");
    cmd->add_option("--error-rate", o.error_rate, "Inject noise up to this annotation error rate (comma list for sweep)");
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "csv"}));
    cmd->add_flag("--timing", o.timing, "Record wall time (makes output non-reproducible)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Crowdsourced label aggregation with low-rank Tucker completion"};
    app.require_subcommand(1);

    CommonOptions opts;
    if (const char* env = std::getenv("MISC_SEED")) opts.seed = std::strtoull(env, nullptr, 10);

    auto* aggregate = app.add_subcommand("aggregate", "Run a pure aggregator");
    add_common(aggregate, opts);
    aggregate->add_option("--output", opts.output, "Write inferred labels (item,label) here");

    auto* mixed = app.add_subcommand("misc", "Run the Tucker complete-aggregate loop");
    add_common(mixed, opts);
    mixed->add_option("--output", opts.output, "Write inferred labels (item,label) here");

    int trials = 10;
    auto* sweep = app.add_subcommand("sweep", "Sparsify/noise sweep, pure vs Tucker-completed");
    add_common(sweep, opts);
    sweep->add_option("--trials", trials, "Seeds per noise level (seed, seed+1, ...)")->check(CLI::PositiveNumber);

    misc::SynthConfig synth_cfg;
    std::string labels_out, truth_out;
    auto* synth = app.add_subcommand("synth", "Generate Dawid-Skene synthetic data");
    synth->add_option("--workers", synth_cfg.n_workers)->check(CLI::PositiveNumber);
    synth->add_option("--items", synth_cfg.n_items)->check(CLI::PositiveNumber);
    synth->add_option("--classes", synth_cfg.n_classes)->check(CLI::Range(2, 1000));
    synth->add_option("--accuracy", synth_cfg.accuracy, "Mean worker accuracy")->check(CLI::Range(0.0, 1.0));
    synth->add_option("--spread", synth_cfg.accuracy_spread, "Worker accuracy half-range");
    synth->add_option("--density", synth_cfg.density, "Probability a pair is labeled")->check(CLI::Range(0.0, 1.0));
    synth->add_option("--seed", opts.seed, "Random seed (default: $MISC_SEED or 1)");
    synth->add_option("--labels-out", labels_out, "Label file to write")->required();
    synth->add_option("--truth-out", truth_out, "Truth file to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*aggregate) return run_single(opts, false);
        if (*mixed) return run_single(opts, true);
        if (*sweep) return run_sweep(opts, trials);
        if (*synth) {
            synth_cfg.seed = opts.seed;
            const misc::SynthData data = misc::synthesize(synth_cfg);
            misc::Dataset ds;
            ds.labels = data.labels;
            ds.truth = data.truth;
            ds.worker_ids = misc::numbered_ids(data.labels.n_workers());
            ds.item_ids = misc::numbered_ids(data.labels.n_items());
            std::ofstream lo(labels_out), to(truth_out);
            if (!lo || !to) throw std::runtime_error("cannot open output files");
            misc::write_labels_csv(lo, ds);
            misc::write_truth_csv(to, ds);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
