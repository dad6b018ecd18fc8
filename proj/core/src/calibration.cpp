#include "mlconf/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mlconf {

ConfusionCounts confusion_counts(const Labelset& truth, const Labelset& prediction) {
    if (truth.label_count() != prediction.label_count()) {
        throw std::invalid_argument("confusion_counts: label count mismatch");
    }
    ConfusionCounts c;
    for (int j = 1; j <= truth.label_count(); ++j) {
        const bool t = truth.get(j), p = prediction.get(j);
        if (t && p) {
            ++c.tp;
        } else if (!t && !p) {
            ++c.tn;
        } else if (!t && p) {
            ++c.fp;
        } else {
            ++c.fn;
        }
    }
    return c;
}

namespace {

int level_index(const std::vector<std::string>& levels, const std::string& value,
                const char* what) {
    const auto it = std::find(levels.begin(), levels.end(), value);
    if (it == levels.end()) {
        throw std::invalid_argument(std::string("calibration: unseen ") + what + " level '" +
                                    value + "'");
    }
    return static_cast<int>(it - levels.begin());
}

std::vector<std::string> collect_levels(const std::vector<CalibrationRow>& rows,
                                        std::string CalibrationRow::* field) {
    std::vector<std::string> levels;
    for (const CalibrationRow& r : rows) {
        if (std::find(levels.begin(), levels.end(), r.*field) == levels.end()) {
            levels.push_back(r.*field);
        }
    }
    return levels;
}

/// Bias columns (dataset + non-baseline classifier dummies) are unpenalized;
/// the per-dataset candidate slopes carry the ridge penalty.
Eigen::VectorXd penalty_mask_for(const CalibrationModel& m) {
    const Eigen::Index d = static_cast<Eigen::Index>(m.datasets.size());
    const Eigen::Index c = static_cast<Eigen::Index>(m.classifiers.size());
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(m.design_dim());
    mask.head(d + (c > 0 ? c - 1 : 0)).setZero();
    return mask;
}

CalibrationModel model_skeleton(Metric metric, const std::vector<CandidateKind>& candidates,
                                const std::vector<CalibrationRow>& rows, double ridge_lambda) {
    if (rows.empty()) throw std::invalid_argument("calibration: no observations");
    CalibrationModel m;
    m.metric = metric;
    m.candidates = candidates;
    m.datasets = collect_levels(rows, &CalibrationRow::dataset);
    m.classifiers = collect_levels(rows, &CalibrationRow::classifier);
    m.ridge_lambda = ridge_lambda;
    return m;
}

Eigen::MatrixXd build_design(const CalibrationModel& m, const std::vector<CalibrationRow>& rows) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), m.design_dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = m.design_row(rows[i]).transpose();
    }
    return X;
}

}  // namespace

Eigen::Index CalibrationModel::design_dim() const {
    const Eigen::Index d = static_cast<Eigen::Index>(datasets.size());
    const Eigen::Index c = static_cast<Eigen::Index>(classifiers.size());
    return d + (c > 0 ? c - 1 : 0) +
           static_cast<Eigen::Index>(candidates.size()) * d;
}

Eigen::VectorXd CalibrationModel::design_row(const CalibrationRow& row) const {
    if (row.scores.size() != candidates.size()) {
        throw std::invalid_argument("calibration: score vector does not match candidate spec");
    }
    const int di = level_index(datasets, row.dataset, "dataset");
    const int ci = level_index(classifiers, row.classifier, "classifier");
    const Eigen::Index d = static_cast<Eigen::Index>(datasets.size());
    const Eigen::Index c = static_cast<Eigen::Index>(classifiers.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(design_dim());
    x[di] = 1.0;                              // per-dataset bias
    if (ci > 0) x[d + ci - 1] = 1.0;          // classifier dummy (level 0 is baseline)
    const Eigen::Index slope_base = d + (c > 0 ? c - 1 : 0);
    for (std::size_t s = 0; s < candidates.size(); ++s) {
        x[slope_base + static_cast<Eigen::Index>(s) * d + di] = row.scores[s];
    }
    return x;
}

CalibrationModel fit_binomial_calibrator(Metric metric,
                                         const std::vector<CandidateKind>& candidates,
                                         const std::vector<CalibrationRow>& rows,
                                         const Eigen::VectorXd& successes,
                                         const Eigen::VectorXd& trials, double ridge_lambda,
                                         const SolverConfig& solver) {
    if (metric == Metric::JaccardSimilarity) {
        throw std::invalid_argument("binomial calibrator does not apply to Jaccard");
    }
    CalibrationModel m = model_skeleton(metric, candidates, rows, ridge_lambda);
    const Eigen::MatrixXd X = build_design(m, rows);
    SolverConfig cfg = solver;
    cfg.ridge_lambda = ridge_lambda;
    m.weights = fit_binomial_logistic(X, successes, trials, penalty_mask_for(m), cfg).weights;
    return m;
}

CalibrationModel fit_multinomial_calibrator(const std::vector<CandidateKind>& candidates,
                                            const std::vector<CalibrationRow>& rows,
                                            const std::vector<ConfusionCounts>& counts,
                                            double ridge_lambda, const SolverConfig& solver) {
    if (counts.size() != rows.size()) {
        throw std::invalid_argument("calibration: counts/rows length mismatch");
    }
    CalibrationModel m =
        model_skeleton(Metric::JaccardSimilarity, candidates, rows, ridge_lambda);
    const Eigen::MatrixXd X = build_design(m, rows);
    Eigen::MatrixXd C(static_cast<Eigen::Index>(counts.size()), 4);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        C(static_cast<Eigen::Index>(i), 0) = counts[i].tp;
        C(static_cast<Eigen::Index>(i), 1) = counts[i].tn;
        C(static_cast<Eigen::Index>(i), 2) = counts[i].fp;
        C(static_cast<Eigen::Index>(i), 3) = counts[i].fn;
    }
    SolverConfig cfg = solver;
    cfg.ridge_lambda = ridge_lambda;
    m.class_weights = fit_multinomial_logistic(X, C, penalty_mask_for(m), cfg).weights;
    return m;
}

double predict_expected_accuracy(const CalibrationModel& m, const CalibrationRow& row) {
    const Eigen::VectorXd x = m.design_row(row);
    if (m.metric == Metric::JaccardSimilarity) {
        const Eigen::VectorXd p = softmax_probs(m.class_weights, x);
        // class order: TP, TN, FP, FN
        return p[0] / (p[0] + p[2] + p[3]);
    }
    return sigmoid(m.weights.dot(x));
}

double held_out_nll(const CalibrationModel& m, const std::vector<CalibrationRow>& rows,
                    const Eigen::VectorXd& successes, const Eigen::VectorXd& trials,
                    const std::vector<ConfusionCounts>& counts) {
    if (rows.empty()) throw std::invalid_argument("held_out_nll: no rows");
    double total = 0.0;
    if (m.metric == Metric::JaccardSimilarity) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Eigen::VectorXd p = softmax_probs(m.class_weights, m.design_row(rows[i]));
            const double cells[4] = {static_cast<double>(counts[i].tp),
                                     static_cast<double>(counts[i].tn),
                                     static_cast<double>(counts[i].fp),
                                     static_cast<double>(counts[i].fn)};
            for (int k = 0; k < 4; ++k) {
                if (cells[k] > 0.0) total -= cells[k] * std::log(std::max(p[k], 1e-300));
            }
        }
    } else {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double eta = m.weights.dot(m.design_row(rows[i]));
            const Eigen::Index idx = static_cast<Eigen::Index>(i);
            const double log1pe = eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                                            : std::log1p(std::exp(eta));
            total -= successes[idx] * eta - trials[idx] * log1pe;
        }
    }
    return total / static_cast<double>(rows.size());
}

double CalibrationDataset::realized_accuracy(std::size_t i) const {
    if (metric == Metric::JaccardSimilarity) {
        const ConfusionCounts& c = counts[i];
        const int denom = c.tp + c.fp + c.fn;
        return denom == 0 ? 1.0 : static_cast<double>(c.tp) / denom;
    }
    const Eigen::Index idx = static_cast<Eigen::Index>(i);
    return successes[idx] / trials[idx];
}

namespace {

CalibrationModel fit_calibrator(const CalibrationDataset& data,
                                const std::vector<std::size_t>& idx, double lambda,
                                const SolverConfig& solver) {
    std::vector<CalibrationRow> rows;
    rows.reserve(idx.size());
    for (std::size_t i : idx) rows.push_back(data.rows[i]);
    if (data.metric == Metric::JaccardSimilarity) {
        std::vector<ConfusionCounts> counts;
        counts.reserve(idx.size());
        for (std::size_t i : idx) counts.push_back(data.counts[i]);
        return fit_multinomial_calibrator(data.candidates, rows, counts, lambda, solver);
    }
    Eigen::VectorXd s(static_cast<Eigen::Index>(idx.size())), t(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        s[static_cast<Eigen::Index>(i)] = data.successes[static_cast<Eigen::Index>(idx[i])];
        t[static_cast<Eigen::Index>(i)] = data.trials[static_cast<Eigen::Index>(idx[i])];
    }
    return fit_binomial_calibrator(data.metric, data.candidates, rows, s, t, lambda, solver);
}

double evaluate_nll(const CalibrationModel& m, const CalibrationDataset& data,
                    const std::vector<std::size_t>& idx) {
    std::vector<CalibrationRow> rows;
    std::vector<ConfusionCounts> counts;
    Eigen::VectorXd s(static_cast<Eigen::Index>(idx.size())), t(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        rows.push_back(data.rows[idx[i]]);
        if (data.metric == Metric::JaccardSimilarity) {
            counts.push_back(data.counts[idx[i]]);
        } else {
            s[static_cast<Eigen::Index>(i)] = data.successes[static_cast<Eigen::Index>(idx[i])];
            t[static_cast<Eigen::Index>(i)] = data.trials[static_cast<Eigen::Index>(idx[i])];
        }
    }
    return held_out_nll(m, rows, s, t, counts);
}

}  // namespace

double cross_validate_lambda(const CalibrationDataset& data, int folds,
                             const std::vector<double>& grid, std::uint64_t seed,
                             const SolverConfig& solver) {
    if (grid.empty()) throw std::invalid_argument("cross_validate_lambda: empty grid");
    const std::size_t n = data.rows.size();
    if (folds < 2 || static_cast<std::size_t>(folds) > n) {
        throw std::invalid_argument("cross_validate_lambda: degenerate folds");
    }
    if (grid.size() == 1) return grid.front();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> sorted_grid = grid;
    std::sort(sorted_grid.begin(), sorted_grid.end());

    double best_lambda = sorted_grid.front();
    double best_loss = std::numeric_limits<double>::infinity();
    for (double lambda : sorted_grid) {
        double loss = 0.0;
        for (int f = 0; f < folds; ++f) {
            std::vector<std::size_t> train, held;
            for (std::size_t i = 0; i < n; ++i) {
                if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f) {
                    held.push_back(order[i]);
                } else {
                    train.push_back(order[i]);
                }
            }
            if (held.empty() || train.empty()) {
                throw std::invalid_argument("cross_validate_lambda: degenerate folds");
            }
            const CalibrationModel m = fit_calibrator(data, train, lambda, solver);
            loss += evaluate_nll(m, data, held);
        }
        loss /= folds;
        if (loss < best_loss) {  // strict: ties keep the smaller lambda
            best_loss = loss;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

std::vector<PredictedRealized> replicate_experiment(const CalibrationDataset& data,
                                                    const ReplicateConfig& cfg) {
    if (cfg.replicates < 1) throw std::invalid_argument("replicate_experiment: need >= 1 replicate");
    const std::size_t n = data.rows.size();
    std::mt19937_64 master(cfg.seed);
    std::vector<std::uint64_t> replicate_seeds;
    for (int r = 0; r < cfg.replicates; ++r) replicate_seeds.push_back(master());

    std::vector<PredictedRealized> out;
    for (int r = 0; r < cfg.replicates; ++r) {
        std::mt19937_64 rng(replicate_seeds[static_cast<std::size_t>(r)]);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t n_train =
            static_cast<std::size_t>(std::ceil(cfg.train_fraction * static_cast<double>(n)));
        if (n_train == 0 || n_train == n) {
            throw std::invalid_argument("replicate_experiment: degenerate split");
        }
        const std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        const std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

        CalibrationDataset train_data;
        train_data.metric = data.metric;
        train_data.candidates = data.candidates;
        train_data.successes.resize(static_cast<Eigen::Index>(train.size()));
        train_data.trials.resize(static_cast<Eigen::Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) {
            train_data.rows.push_back(data.rows[train[i]]);
            if (data.metric == Metric::JaccardSimilarity) {
                train_data.counts.push_back(data.counts[train[i]]);
            } else {
                train_data.successes[static_cast<Eigen::Index>(i)] =
                    data.successes[static_cast<Eigen::Index>(train[i])];
                train_data.trials[static_cast<Eigen::Index>(i)] =
                    data.trials[static_cast<Eigen::Index>(train[i])];
            }
        }

        const double lambda =
            cross_validate_lambda(train_data, cfg.cv_folds, cfg.lambda_grid, rng(), cfg.solver);
        std::vector<std::size_t> all_train(train_data.rows.size());
        std::iota(all_train.begin(), all_train.end(), std::size_t{0});
        const CalibrationModel model = fit_calibrator(train_data, all_train, lambda, cfg.solver);

        for (std::size_t i : test) {
            PredictedRealized pr;
            pr.replicate = r;
            pr.predicted = predict_expected_accuracy(model, data.rows[i]);
            pr.realized = data.realized_accuracy(i);
            out.push_back(pr);
        }
    }
    return out;
}

namespace {

int bin_of(double p, double width, int bin_count) {
    int b = static_cast<int>(std::ceil(p / width)) - 1;  // bins are (lo, hi]
    return std::clamp(b, 0, bin_count - 1);
}

double percentile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return values[lo];
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

struct BinAccumulator {
    std::map<int, std::pair<double, long>> per_replicate;  // replicate -> (sum, count)
    double pooled_sum = 0.0;
    long pooled_count = 0;
};

std::map<int, BinAccumulator> accumulate_bins(const std::vector<PredictedRealized>& pairs,
                                              double bin_width, int bin_count) {
    std::map<int, BinAccumulator> bins;
    for (const PredictedRealized& pr : pairs) {
        BinAccumulator& acc = bins[bin_of(pr.predicted, bin_width, bin_count)];
        auto& [sum, count] = acc.per_replicate[pr.replicate];
        sum += pr.realized;
        ++count;
        acc.pooled_sum += pr.realized;
        ++acc.pooled_count;
    }
    return bins;
}

std::pair<double, double> replicate_interval(const BinAccumulator& acc) {
    std::vector<double> means;
    means.reserve(acc.per_replicate.size());
    for (const auto& [rep, sc] : acc.per_replicate) {
        means.push_back(sc.first / static_cast<double>(sc.second));
    }
    return {percentile(means, 0.025), percentile(means, 0.975)};
}

}  // namespace

std::vector<IntervalRow> interval_table(const std::vector<PredictedRealized>& pairs,
                                        double bin_width) {
    if (bin_width != 0.1 && bin_width != 0.05) {
        throw std::invalid_argument("interval_table: bin width must be 0.1 or 0.05");
    }
    const int bin_count = static_cast<int>(std::lround(1.0 / bin_width));
    std::vector<IntervalRow> out;
    for (const auto& [bin, acc] : accumulate_bins(pairs, bin_width, bin_count)) {
        IntervalRow row;
        row.bin_lo = bin * bin_width;
        row.bin_hi = (bin + 1) * bin_width;
        const auto [lo, hi] = replicate_interval(acc);
        row.lower = lo;
        row.upper = hi;
        row.match = lo >= row.bin_lo - 1e-12 && hi <= row.bin_hi + 1e-12;
        row.populated_replicates = static_cast<int>(acc.per_replicate.size());
        row.point_count = acc.pooled_count;
        out.push_back(row);
    }
    return out;
}

std::vector<ReliabilityPoint> reliability_curve(const std::vector<PredictedRealized>& pairs,
                                                double bin_width) {
    const int bin_count = static_cast<int>(std::lround(1.0 / bin_width));
    std::vector<ReliabilityPoint> out;
    for (const auto& [bin, acc] : accumulate_bins(pairs, bin_width, bin_count)) {
        ReliabilityPoint pt;
        pt.bin_center = (bin + 0.5) * bin_width;
        pt.mean_realized = acc.pooled_sum / static_cast<double>(acc.pooled_count);
        const auto [lo, hi] = replicate_interval(acc);
        pt.lower = lo;
        pt.upper = hi;
        pt.point_count = acc.pooled_count;
        out.push_back(pt);
    }
    return out;
}

}  // namespace mlconf
