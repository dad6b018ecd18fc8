#include "mlconf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace mlconf {

void MLDataset::validate() const {
    if (features.rows() == 0) throw std::invalid_argument("dataset has no instances");
    if (static_cast<Eigen::Index>(labelsets.size()) != features.rows()) {
        throw std::invalid_argument("labelset count does not match feature rows");
    }
    const int L = labelsets.front().label_count();
    for (const Labelset& y : labelsets) {
        if (y.label_count() != L) throw std::invalid_argument("inconsistent label counts");
    }
    if (!label_names.empty() && static_cast<int>(label_names.size()) != L) {
        throw std::invalid_argument("label name count does not match L");
    }
    if (!feature_names.empty() &&
        static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
        throw std::invalid_argument("feature name count does not match M");
    }
}

DatasetStats dataset_stats(const MLDataset& ds) {
    ds.validate();
    DatasetStats s;
    s.name = ds.name;
    s.instance_count = ds.instance_count();
    s.label_count = ds.label_count();
    s.feature_count = ds.feature_count();
    double total = 0.0;
    std::unordered_set<std::uint32_t> combos;
    for (const Labelset& y : ds.labelsets) {
        total += y.popcount();
        combos.insert(y.index());
    }
    s.label_cardinality = total / static_cast<double>(s.instance_count);
    s.distinct_combinations = static_cast<std::int64_t>(combos.size());
    return s;
}

std::string DatasetStats::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["N"] = instance_count;
    j["L"] = label_count;
    j["M"] = feature_count;
    j["label_cardinality"] = label_cardinality;
    j["distinct_combinations"] = distinct_combinations;
    return j.dump(2);
}

namespace {

MLDataset take_rows(const MLDataset& ds, const std::vector<Eigen::Index>& rows,
                    const std::string& suffix) {
    MLDataset out;
    out.name = ds.name + suffix;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
    out.labelsets.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
        out.labelsets.push_back(ds.labelsets[static_cast<std::size_t>(rows[i])]);
    }
    out.label_names = ds.label_names;
    out.feature_names = ds.feature_names;
    return out;
}

}  // namespace

std::pair<MLDataset, MLDataset> split(const MLDataset& ds, double fraction,
                                      std::uint64_t seed) {
    ds.validate();
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split fraction must be in (0,1)");
    }
    const Eigen::Index n = ds.instance_count();
    const Eigen::Index n_train =
        static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) {
        throw std::invalid_argument("split would leave one side empty");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::vector<Eigen::Index> train_rows(order.begin(), order.begin() + n_train);
    const std::vector<Eigen::Index> test_rows(order.begin() + n_train, order.end());
    return {take_rows(ds, train_rows, "/train"), take_rows(ds, test_rows, "/test")};
}

}  // namespace mlconf
