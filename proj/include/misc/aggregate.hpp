#pragma once

// Conventional label aggregation: majority voting and the Dawid-Skene worker
// confusion model fitted by EM or by mean-field variational inference.

#include "misc/labels.hpp"
#include "misc/tensor.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace misc {

// Class prior p(c) and one Nc x Nc row-stochastic confusion matrix per worker;
// confusion[w](c, c') = P(worker w reports c'+1 | truth c+1).
struct ConfusionModel {
    std::vector<double> prior;
    std::vector<Matrix> confusion;
};

struct EmConfig {
    int max_iters = 100;
    // Stop when no posterior entry moves by more than this.
    double tol = 1e-6;
    // Pseudo-count added to every confusion cell.
    double smoothing = 0.01;
};

struct DawidSkeneFit {
    AggregationResult result;
    ConfusionModel model;
    // EM: log p(labels | params) + smoothing * sum log(confusion) after each
    // iteration, i.e. the objective the smoothed M-step ascends. Empty for MF.
    std::vector<double> objective;
    int iterations = 0;
};

using Aggregator = std::function<AggregationResult(const LabelMatrix&)>;

inline AggregationResult majority_vote(const LabelMatrix& a)
{
    const std::size_t ni = a.n_items();
    const auto nc = static_cast<std::size_t>(a.n_classes());
    Matrix posterior(ni, nc);
    for (std::size_t w = 0; w < a.n_workers(); ++w)
        for (std::size_t i = 0; i < ni; ++i)
            if (const int c = a(w, i); c > 0) posterior(i, static_cast<std::size_t>(c - 1)) += 1.0;
    for (std::size_t i = 0; i < ni; ++i) {
        double total = 0.0;
        for (std::size_t c = 0; c < nc; ++c) total += posterior(i, c);
        for (std::size_t c = 0; c < nc; ++c) posterior(i, c) = total > 0.0 ? posterior(i, c) / total : 1.0 / nc;
    }
    return result_from_posterior(std::move(posterior));
}

namespace detail {

struct Observation {
    std::size_t worker;
    std::size_t cls; // 0-based
};

// Labels grouped by item.
inline std::vector<std::vector<Observation>> observations_by_item(const LabelMatrix& a)
{
    std::vector<std::vector<Observation>> obs(a.n_items());
    for (std::size_t i = 0; i < a.n_items(); ++i)
        for (std::size_t w = 0; w < a.n_workers(); ++w)
            if (const int c = a(w, i); c > 0) obs[i].push_back({w, static_cast<std::size_t>(c - 1)});
    return obs;
}

// counts[w](c, c') = sum_i q(i, c) [A(w, i) = c'+1].
inline std::vector<Matrix> soft_confusion_counts(const std::vector<std::vector<Observation>>& obs,
                                                 const Matrix& q, std::size_t n_workers)
{
    const std::size_t nc = q.cols();
    std::vector<Matrix> counts(n_workers, Matrix(nc, nc));
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (const auto& o : obs[i])
            for (std::size_t c = 0; c < nc; ++c) counts[o.worker](c, o.cls) += q(i, c);
    return counts;
}

inline std::vector<double> class_mass(const Matrix& q)
{
    std::vector<double> mass(q.cols(), 0.0);
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t c = 0; c < q.cols(); ++c) mass[c] += q(i, c);
    return mass;
}

// Normalise exp(log_scores) in place; returns log sum exp(log_scores).
// A row with no finite score becomes uniform.
inline double normalize_log_row(std::vector<double>& row)
{
    const double top = *std::max_element(row.begin(), row.end());
    if (!std::isfinite(top)) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
        return -std::numeric_limits<double>::infinity();
    }
    double sum = 0.0;
    for (double& x : row) {
        x = std::exp(x - top);
        sum += x;
    }
    for (double& x : row) x /= sum;
    return top + std::log(sum);
}

inline double max_abs_change(const Matrix& a, const Matrix& b)
{
    double d = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a.data()[n] - b.data()[n]));
    return d;
}

} // namespace detail

// Dawid-Skene EM started from the majority-vote posteriors. Each iteration is an
// M-step (smoothed confusion rows, class prior from posterior mass) followed by
// an E-step.
inline DawidSkeneFit ds_em(const LabelMatrix& a, const EmConfig& cfg = {})
{
    if (cfg.max_iters < 1) throw std::invalid_argument("ds_em: max_iters must be >= 1");
    const std::size_t ni = a.n_items(), nw = a.n_workers();
    const auto nc = static_cast<std::size_t>(a.n_classes());
    const auto obs = detail::observations_by_item(a);

    DawidSkeneFit fit;
    Matrix q = majority_vote(a).posterior;
    std::vector<double> row(nc);
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // M-step
        ConfusionModel model;
        model.confusion = detail::soft_confusion_counts(obs, q, nw);
        for (auto& m : model.confusion)
            for (std::size_t c = 0; c < nc; ++c) {
                double total = 0.0;
                for (std::size_t k = 0; k < nc; ++k) total += m(c, k) + cfg.smoothing;
                for (std::size_t k = 0; k < nc; ++k)
                    m(c, k) = total > 0.0 ? (m(c, k) + cfg.smoothing) / total : 1.0 / static_cast<double>(nc);
            }
        model.prior = detail::class_mass(q);
        for (double& p : model.prior) p = ni ? p / static_cast<double>(ni) : 1.0 / static_cast<double>(nc);

        // E-step
        std::vector<double> log_prior(nc);
        for (std::size_t c = 0; c < nc; ++c) log_prior[c] = std::log(model.prior[c]);
        Matrix next(ni, nc);
        double objective = 0.0;
        for (std::size_t i = 0; i < ni; ++i) {
            row = log_prior;
            for (const auto& o : obs[i])
                for (std::size_t c = 0; c < nc; ++c) row[c] += std::log(model.confusion[o.worker](c, o.cls));
            objective += detail::normalize_log_row(row);
            for (std::size_t c = 0; c < nc; ++c) next(i, c) = row[c];
        }
        if (cfg.smoothing > 0.0)
            for (const auto& m : model.confusion)
                for (double x : m.data()) objective += cfg.smoothing * std::log(x);

        const double change = detail::max_abs_change(q, next);
        q = std::move(next);
        fit.model = std::move(model);
        fit.objective.push_back(objective);
        fit.iterations = iter + 1;
        if (change < cfg.tol) break;
    }
    fit.result = result_from_posterior(std::move(q));
    return fit;
}

// Mean-field Dawid-Skene: symmetric Dirichlet(1 + smoothing) priors on the class
// prior and every confusion row, item posteriors updated from the expected
// log-parameters under the current Dirichlet posteriors. The returned model is
// the Dirichlet posterior mean.
inline DawidSkeneFit ds_mf(const LabelMatrix& a, const EmConfig& cfg = {})
{
    using boost::math::digamma;
    if (cfg.max_iters < 1) throw std::invalid_argument("ds_mf: max_iters must be >= 1");
    const std::size_t ni = a.n_items(), nw = a.n_workers();
    const auto nc = static_cast<std::size_t>(a.n_classes());
    const double concentration = 1.0 + cfg.smoothing;
    const auto obs = detail::observations_by_item(a);

    DawidSkeneFit fit;
    Matrix q = majority_vote(a).posterior;
    std::vector<double> row(nc);
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // Dirichlet posterior parameters from the current item posteriors.
        ConfusionModel alpha;
        alpha.confusion = detail::soft_confusion_counts(obs, q, nw);
        for (auto& m : alpha.confusion)
            for (double& x : m.data()) x += concentration;
        alpha.prior = detail::class_mass(q);
        for (double& x : alpha.prior) x += concentration;

        std::vector<double> e_log_prior(nc);
        double prior_total = 0.0;
        for (double x : alpha.prior) prior_total += x;
        for (std::size_t c = 0; c < nc; ++c) e_log_prior[c] = digamma(alpha.prior[c]) - digamma(prior_total);

        std::vector<Matrix> e_log_conf(nw, Matrix(nc, nc));
        for (std::size_t w = 0; w < nw; ++w)
            for (std::size_t c = 0; c < nc; ++c) {
                double total = 0.0;
                for (std::size_t k = 0; k < nc; ++k) total += alpha.confusion[w](c, k);
                const double psi_total = digamma(total);
                for (std::size_t k = 0; k < nc; ++k)
                    e_log_conf[w](c, k) = digamma(alpha.confusion[w](c, k)) - psi_total;
            }

        Matrix next(ni, nc);
        for (std::size_t i = 0; i < ni; ++i) {
            row = e_log_prior;
            for (const auto& o : obs[i])
                for (std::size_t c = 0; c < nc; ++c) row[c] += e_log_conf[o.worker](c, o.cls);
            detail::normalize_log_row(row);
            for (std::size_t c = 0; c < nc; ++c) next(i, c) = row[c];
        }

        const double change = detail::max_abs_change(q, next);
        q = std::move(next);

        // Posterior means.
        for (auto& m : alpha.confusion)
            for (std::size_t c = 0; c < nc; ++c) {
                double total = 0.0;
                for (std::size_t k = 0; k < nc; ++k) total += m(c, k);
                for (std::size_t k = 0; k < nc; ++k) m(c, k) /= total;
            }
        for (double& x : alpha.prior) x /= prior_total;
        fit.model = std::move(alpha);
        fit.iterations = iter + 1;
        if (change < cfg.tol) break;
    }
    fit.result = result_from_posterior(std::move(q));
    return fit;
}

// "mv", "ds-em" or "ds-mf".
inline Aggregator make_aggregator(const std::string& name, const EmConfig& cfg = {})
{
    if (name == "mv") return majority_vote;
    if (name == "ds-em") return [cfg](const LabelMatrix& a) { return ds_em(a, cfg).result; };
    if (name == "ds-mf") return [cfg](const LabelMatrix& a) { return ds_mf(a, cfg).result; };
    throw std::invalid_argument("unknown aggregator '" + name + "' (expected mv, ds-em or ds-mf)");
}

} // namespace misc
