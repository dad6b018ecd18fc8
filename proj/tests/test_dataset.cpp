#include <doctest.h>

#include <set>

#include "mlconf/dataset.hpp"

using namespace mlconf;

namespace {

MLDataset tiny(int n) {
    MLDataset ds;
    ds.name = "tiny";
    ds.features = Eigen::MatrixXd::Zero(n, 2);
    ds.feature_names = {"f1", "f2"};
    ds.label_names = {"a", "b"};
    for (int i = 0; i < n; ++i) {
        ds.features(i, 0) = i;
        ds.labelsets.push_back(Labelset(static_cast<std::uint32_t>(i % 3), 2));
    }
    return ds;
}

}  // namespace

TEST_CASE("dataset stats") {
    const DatasetStats s = dataset_stats(tiny(9));
    CHECK(s.instance_count == 9);
    CHECK(s.label_count == 2);
    CHECK(s.feature_count == 2);
    CHECK(s.distinct_combinations == 3);  // indices 0,1,2 cycle
    // labelsets 0,1,2 have cardinality 0,1,1; mean over the cycle = 2/3
    CHECK(s.label_cardinality == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("split sizes and determinism") {
    const MLDataset ds = tiny(10);
    const auto [train, test] = split(ds, 0.5, 77);
    CHECK(train.instance_count() == 5);
    CHECK(test.instance_count() == 5);

    const auto [train2, test2] = split(ds, 0.5, 77);
    CHECK(train.features == train2.features);
    const auto [train3, test3] = split(ds, 0.5, 78);
    CHECK(train.features != train3.features);

    // ceil rule: 7 instances at 0.5 -> 4 train
    const auto [t7, e7] = split(tiny(7), 0.5, 1);
    CHECK(t7.instance_count() == 4);
    CHECK(e7.instance_count() == 3);
}

TEST_CASE("split partitions rows without loss") {
    const MLDataset ds = tiny(20);
    const auto [train, test] = split(ds, 0.7, 3);
    std::multiset<double> seen;
    for (Eigen::Index i = 0; i < train.instance_count(); ++i) seen.insert(train.features(i, 0));
    for (Eigen::Index i = 0; i < test.instance_count(); ++i) seen.insert(test.features(i, 0));
    CHECK(seen.size() == 20);
    for (int i = 0; i < 20; ++i) CHECK(seen.count(i) == 1);
}

TEST_CASE("degenerate splits are rejected") {
    CHECK_THROWS(split(tiny(3), 0.999, 0));  // empty test side
    CHECK_THROWS(split(tiny(0), 0.5, 0));
}

TEST_CASE("validate catches shape mismatches") {
    MLDataset ds = tiny(5);
    ds.labelsets.pop_back();
    CHECK_THROWS(ds.validate());
}
