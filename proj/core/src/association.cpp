#include "mlconf/association.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace mlconf {

std::string arrow_marker(int arrow) {
    if (arrow == 0) return "";
    return (arrow > 0 ? "up" : "down") + std::to_string(std::abs(arrow));
}

namespace {

template <typename T>
std::vector<T> distinct_levels(const std::vector<AnalysisRecord>& records,
                               T AnalysisRecord::* field) {
    std::vector<T> levels;
    for (const AnalysisRecord& r : records) {
        if (std::find(levels.begin(), levels.end(), r.*field) == levels.end()) {
            levels.push_back(r.*field);
        }
    }
    return levels;
}

/// Move the baseline level to the front so the dummies cover the rest.
template <typename T>
void put_baseline_first(std::vector<T>& levels, const T& baseline) {
    const auto it = std::find(levels.begin(), levels.end(), baseline);
    if (it != levels.end()) std::rotate(levels.begin(), it, it + 1);
}

}  // namespace

RegressionResult ols_fixed_effects(const std::vector<AnalysisRecord>& records,
                                   const FixedEffectsBaselines& baselines) {
    if (records.empty()) throw std::invalid_argument("ols_fixed_effects: no records");

    auto candidates = distinct_levels(records, &AnalysisRecord::candidate);
    auto datasets = distinct_levels(records, &AnalysisRecord::dataset);
    auto classifiers = distinct_levels(records, &AnalysisRecord::classifier);
    put_baseline_first(candidates, baselines.candidate);
    if (!baselines.dataset.empty()) put_baseline_first(datasets, baselines.dataset);
    put_baseline_first(classifiers, baselines.classifier);

    std::vector<std::string> names{"(Intercept)"};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        names.push_back("candidate:" + candidate_name(candidates[i]));
    }
    for (std::size_t i = 1; i < datasets.size(); ++i) names.push_back("dataset:" + datasets[i]);
    for (std::size_t i = 1; i < classifiers.size(); ++i) {
        names.push_back("classifier:" + classifier_name(classifiers[i]));
    }

    const Eigen::Index n = static_cast<Eigen::Index>(records.size());
    const Eigen::Index p = static_cast<Eigen::Index>(names.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index row = 0; row < n; ++row) {
        const AnalysisRecord& r = records[static_cast<std::size_t>(row)];
        y[row] = fisher_z(r.correlation);
        Eigen::Index col = 0;
        X(row, col++) = 1.0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            X(row, col++) = r.candidate == candidates[i] ? 1.0 : 0.0;
        }
        for (std::size_t i = 1; i < datasets.size(); ++i) {
            X(row, col++) = r.dataset == datasets[i] ? 1.0 : 0.0;
        }
        for (std::size_t i = 1; i < classifiers.size(); ++i) {
            X(row, col++) = r.classifier == classifiers[i] ? 1.0 : 0.0;
        }
    }
    return ols(X, y, names);
}

std::map<CandidateKind, RegressionResult> robustness_regression(
    const std::vector<AnalysisRecord>& records,
    const std::map<std::string, DatasetStats>& data_features) {
    std::map<CandidateKind, RegressionResult> out;
    const auto all_candidates = distinct_levels(records, &AnalysisRecord::candidate);

    for (CandidateKind kind : all_candidates) {
        std::vector<AnalysisRecord> subset;
        for (const AnalysisRecord& r : records) {
            if (r.candidate == kind) subset.push_back(r);
        }
        auto classifiers = distinct_levels(subset, &AnalysisRecord::classifier);
        put_baseline_first(classifiers, ClassifierKind::EnsembleOfChains);
        auto metrics = distinct_levels(subset, &AnalysisRecord::metric);
        put_baseline_first(metrics, Metric::ExactMatch);

        std::vector<std::string> names{"(Intercept)", "label_count", "label_comb",
                                       "label_card", "feature_count"};
        for (std::size_t i = 1; i < classifiers.size(); ++i) {
            names.push_back("classifier:" + classifier_name(classifiers[i]));
        }
        for (std::size_t i = 1; i < metrics.size(); ++i) {
            names.push_back("metric:" + metric_name(metrics[i]));
        }

        const Eigen::Index n = static_cast<Eigen::Index>(subset.size());
        const Eigen::Index p = static_cast<Eigen::Index>(names.size());
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, p);
        Eigen::VectorXd y(n);
        for (Eigen::Index row = 0; row < n; ++row) {
            const AnalysisRecord& r = subset[static_cast<std::size_t>(row)];
            const auto it = data_features.find(r.dataset);
            if (it == data_features.end()) {
                throw std::invalid_argument("robustness_regression: no stats for dataset '" +
                                            r.dataset + "'");
            }
            const DatasetStats& s = it->second;
            y[row] = fisher_z(r.correlation);
            Eigen::Index col = 0;
            X(row, col++) = 1.0;
            X(row, col++) = static_cast<double>(s.label_count);
            X(row, col++) = static_cast<double>(s.distinct_combinations);
            X(row, col++) = s.label_cardinality;
            X(row, col++) = static_cast<double>(s.feature_count);
            for (std::size_t i = 1; i < classifiers.size(); ++i) {
                X(row, col++) = r.classifier == classifiers[i] ? 1.0 : 0.0;
            }
            for (std::size_t i = 1; i < metrics.size(); ++i) {
                X(row, col++) = r.metric == metrics[i] ? 1.0 : 0.0;
            }
        }
        out[kind] = ols(X, y, names);
    }
    return out;
}

namespace {

double associate(AssociationMeasure measure, const std::vector<double>& a,
                 const std::vector<double>& b) {
    return measure == AssociationMeasure::Kendall ? kendall_tau(a, b) : pearson(a, b);
}

/// Two-sided bootstrap p-value and direction for candidate-vs-HP differences.
int bootstrap_arrow(AssociationMeasure measure, const std::vector<double>& candidate,
                    const std::vector<double>& baseline, const std::vector<double>& accuracy,
                    int replicates, std::uint64_t seed) {
    const std::size_t n = accuracy.size();
    const double observed =
        associate(measure, candidate, accuracy) - associate(measure, baseline, accuracy);
    if (observed == 0.0) return 0;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    int non_positive = 0, non_negative = 0, valid = 0;
    std::vector<double> c(n), h(n), acc(n);
    for (int b = 0; b < replicates; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = pick(rng);
            c[i] = candidate[idx];
            h[i] = baseline[idx];
            acc[i] = accuracy[idx];
        }
        double diff;
        try {
            diff = associate(measure, c, acc) - associate(measure, h, acc);
        } catch (const std::invalid_argument&) {
            continue;  // degenerate resample
        }
        ++valid;
        if (diff <= 0.0) ++non_positive;
        if (diff >= 0.0) ++non_negative;
    }
    if (valid == 0) return 0;
    const double p =
        2.0 * std::min(non_positive, non_negative) / static_cast<double>(valid);
    int level = 0;
    if (p < 0.01) {
        level = 3;
    } else if (p < 0.05) {
        level = 2;
    } else if (p < 0.1) {
        level = 1;
    }
    return observed > 0.0 ? level : -level;
}

}  // namespace

std::vector<AnalysisRecord> correlation_table(const std::vector<InstanceGroup>& groups,
                                              const CorrelationTableConfig& cfg) {
    std::vector<AnalysisRecord> records;
    std::uint64_t group_seed = cfg.seed;
    for (const InstanceGroup& g : groups) {
        if (g.accuracies.size() < 10) {
            throw std::invalid_argument("correlation_table: group '" + g.dataset +
                                        "' has fewer than 10 instances");
        }
        const auto hp_it = g.scores.find(CandidateKind::HP);
        if (hp_it == g.scores.end()) {
            throw std::invalid_argument("correlation_table: HP baseline scores missing");
        }
        for (const auto& [kind, scores] : g.scores) {
            if (scores.size() != g.accuracies.size()) {
                throw std::invalid_argument("correlation_table: misaligned score vector");
            }
            AnalysisRecord rec;
            rec.dataset = g.dataset;
            rec.classifier = g.classifier;
            rec.metric = g.metric;
            rec.candidate = kind;
            rec.correlation = associate(cfg.measure, scores, g.accuracies);
            rec.n = static_cast<long>(g.accuracies.size());
            if (kind != CandidateKind::HP) {
                rec.arrow = bootstrap_arrow(cfg.measure, scores, hp_it->second, g.accuracies,
                                            cfg.bootstrap_replicates, group_seed);
            }
            records.push_back(std::move(rec));
        }
        ++group_seed;  // deterministic per-group bootstrap stream
    }
    return records;
}

std::vector<std::pair<int, double>> topk_accuracy_curve(const std::vector<double>& scores,
                                                        const std::vector<double>& accuracies) {
    if (scores.empty()) throw std::invalid_argument("topk_accuracy_curve: empty input");
    if (scores.size() != accuracies.size()) {
        throw std::invalid_argument("topk_accuracy_curve: length mismatch");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return scores[i] > scores[j]; });
    std::vector<std::pair<int, double>> curve;
    curve.reserve(scores.size());
    double running = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        running += accuracies[order[k]];
        curve.emplace_back(static_cast<int>(k + 1), running / static_cast<double>(k + 1));
    }
    return curve;
}

}  // namespace mlconf
