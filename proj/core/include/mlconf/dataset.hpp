#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mlconf/labelset.hpp"

namespace mlconf {

/// A multi-label dataset: numeric feature matrix plus one labelset per row.
/// Nominal features arrive already one-hot expanded by the parser.
struct MLDataset {
    std::string name;
    Eigen::MatrixXd features;  // N x M
    std::vector<Labelset> labelsets;
    std::vector<std::string> label_names;
    std::vector<std::string> feature_names;

    Eigen::Index instance_count() const { return features.rows(); }
    Eigen::Index feature_count() const { return features.cols(); }
    int label_count() const { return labelsets.empty() ? 0 : labelsets.front().label_count(); }

    void validate() const;  // throws on inconsistent shapes
};

struct DatasetStats {
    std::string name;
    std::int64_t instance_count = 0;      // N
    int label_count = 0;                  // L
    std::int64_t feature_count = 0;       // M
    double label_cardinality = 0.0;       // mean relevant labels per instance
    std::int64_t distinct_combinations = 0;

    std::string to_json() const;
};

DatasetStats dataset_stats(const MLDataset& ds);

/// Deterministic shuffled split; train gets ceil(fraction * N) rows.
std::pair<MLDataset, MLDataset> split(const MLDataset& ds, double fraction,
                                      std::uint64_t seed);

}  // namespace mlconf
