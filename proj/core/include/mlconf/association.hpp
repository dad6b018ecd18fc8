#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mlconf/classifiers.hpp"
#include "mlconf/confidence.hpp"
#include "mlconf/dataset.hpp"
#include "mlconf/metrics.hpp"
#include "mlconf/stats.hpp"

namespace mlconf {

/// One correlation cell: how well a candidate score tracked accuracy for one
/// (dataset, classifier, metric) combination.
struct AnalysisRecord {
    std::string dataset;
    ClassifierKind classifier = ClassifierKind::EnsembleOfChains;
    Metric metric = Metric::ExactMatch;
    CandidateKind candidate = CandidateKind::HP;
    double correlation = 0.0;
    long n = 0;
    /// Candidate-vs-HP significance: sign is direction, magnitude is the
    /// level (1: p<0.1, 2: p<0.05, 3: p<0.01), 0 when not significant.
    int arrow = 0;
};

std::string arrow_marker(int arrow);  // "", "up1".."up3", "down1".."down3"

struct FixedEffectsBaselines {
    CandidateKind candidate = CandidateKind::HP;
    std::string dataset;  // empty: first dataset seen becomes the baseline
    ClassifierKind classifier = ClassifierKind::EnsembleOfChains;
};

/// Additive dummy-coded model of Fisher-transformed correlations on
/// candidate, dataset, and classifier factors. Factors with a single level
/// present are dropped from the design.
RegressionResult ols_fixed_effects(const std::vector<AnalysisRecord>& records,
                                   const FixedEffectsBaselines& baselines);

/// Per-candidate model of Fisher-transformed correlations on four numeric
/// dataset gradients plus classifier and metric dummies.
std::map<CandidateKind, RegressionResult> robustness_regression(
    const std::vector<AnalysisRecord>& records,
    const std::map<std::string, DatasetStats>& data_features);

/// Aligned per-instance vectors for one (dataset, classifier, metric) cell.
struct InstanceGroup {
    std::string dataset;
    ClassifierKind classifier = ClassifierKind::EnsembleOfChains;
    Metric metric = Metric::ExactMatch;
    std::map<CandidateKind, std::vector<double>> scores;
    std::vector<double> accuracies;
};

enum class AssociationMeasure { Kendall, Pearson };

struct CorrelationTableConfig {
    AssociationMeasure measure = AssociationMeasure::Kendall;
    int bootstrap_replicates = 1000;
    std::uint64_t seed = 0;
};

/// Correlation per candidate with paired-bootstrap significance markers
/// against the HP baseline. Groups need at least 10 instances.
std::vector<AnalysisRecord> correlation_table(const std::vector<InstanceGroup>& groups,
                                              const CorrelationTableConfig& cfg);

/// Mean accuracy of the k best-scored instances, k = 1..n; score ties break
/// toward the lower instance index.
std::vector<std::pair<int, double>> topk_accuracy_curve(const std::vector<double>& scores,
                                                        const std::vector<double>& accuracies);

}  // namespace mlconf
