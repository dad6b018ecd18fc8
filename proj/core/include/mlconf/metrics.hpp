#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mlconf/labelset.hpp"

namespace mlconf {

enum class Metric { HammingSimilarity, ExactMatch, JaccardSimilarity };

std::string metric_name(Metric m);       // "hs", "em", "js"
Metric metric_from_name(const std::string& name);

/// Per-pair similarity in [0,1].
///   HS: fraction of matching positions
///   EM: 1 iff identical
///   JS: |a AND b| / |a OR b|, with 0/0 defined as 1
double similarity(Metric metric, const Labelset& a, const Labelset& b);

/// E_S(candidate) = sum over all labelsets y of P(y) * S(candidate, y).
double expected_accuracy(const LabelsetDistribution& d, const Labelset& candidate,
                         Metric metric);

struct BestPrediction {
    Labelset labelset;
    double expected_accuracy;
};

/// Argmax of expected accuracy over all 2^L candidates. EM and HS use their
/// closed-form optima (mode and per-label marginal threshold); debug builds
/// verify those against the brute-force value. Ties go to the lowest index.
BestPrediction best_prediction(const LabelsetDistribution& d, Metric metric);

/// Mean per-pair similarity over aligned truth/prediction lists.
double dataset_accuracy(Metric metric, const std::vector<Labelset>& truths,
                        const std::vector<Labelset>& preds);

}  // namespace mlconf
