#include <doctest.h>

#include <random>

#include "mlconf/classifiers.hpp"
#include "mlconf/metrics.hpp"

using namespace mlconf;

namespace {

// label 1 follows the single feature; label 2 copies label 1 regardless of x.
MLDataset coupled_labels(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    MLDataset ds;
    ds.name = "coupled";
    ds.features = Eigen::MatrixXd(n, 1);
    ds.feature_names = {"x"};
    ds.label_names = {"a", "b"};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        ds.features(i, 0) = g(rng);
        const int a = u(rng) < 1.0 / (1.0 + std::exp(-3.0 * ds.features(i, 0))) ? 1 : 0;
        ds.labelsets.push_back(Labelset(std::vector<int>{a, a}));
    }
    return ds;
}

double mass_off_diagonal(const LabelsetDistribution& d) {
    return d.prob(std::size_t{1}) + d.prob(std::size_t{2});  // [0,1] and [1,0]
}

}  // namespace

TEST_CASE("classifier names round trip") {
    for (ClassifierKind k : {ClassifierKind::Independent, ClassifierKind::Chain,
                             ClassifierKind::EnsembleOfChains}) {
        CHECK(classifier_from_name(classifier_name(k)) == k);
    }
    CHECK_THROWS(classifier_from_name("trellis"));
}

TEST_CASE("every predicted joint is a proper distribution") {
    const MLDataset ds = coupled_labels(300, 5);
    SolverConfig cfg;
    Eigen::VectorXd x(1);
    x << 0.7;
    for (ClassifierKind kind : {ClassifierKind::Independent, ClassifierKind::Chain,
                                ClassifierKind::EnsembleOfChains}) {
        const MultiLabelModel m = train_classifier(kind, ds, 5, 42, cfg);
        const LabelsetDistribution joint = predict_joint(m, x);
        double total = 0.0;
        for (double v : joint.probs()) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("chains exploit label dependence the independent model cannot") {
    const MLDataset ds = coupled_labels(2000, 17);
    SolverConfig cfg;
    const MultiLabelModel indep = train_independent(ds, cfg);
    const MultiLabelModel chain = train_chain(ds, {1, 2}, cfg);
    Eigen::VectorXd x(1);
    x << 0.0;  // maximal label-1 uncertainty, so dependence matters most
    const double indep_off = mass_off_diagonal(predict_joint(indep, x));
    const double chain_off = mass_off_diagonal(predict_joint(chain, x));
    CHECK(chain_off < 0.5 * indep_off);
}

TEST_CASE("training is deterministic in the seed") {
    const MLDataset ds = coupled_labels(200, 9);
    SolverConfig cfg;
    const MultiLabelModel a = train_ensemble(ds, 4, 123, cfg);
    const MultiLabelModel b = train_ensemble(ds, 4, 123, cfg);
    const MultiLabelModel c = train_ensemble(ds, 4, 124, cfg);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("ensemble members use distinct chain orders eventually") {
    const MLDataset ds = coupled_labels(100, 3);
    const MultiLabelModel m = train_ensemble(ds, 8, 7, SolverConfig{});
    REQUIRE(m.chains.size() == 8);
    bool any_different = false;
    for (const ChainModel& cm : m.chains) {
        if (cm.order != m.chains.front().order) any_different = true;
    }
    CHECK(any_different);
}

TEST_CASE("model json round trip preserves predictions") {
    const MLDataset ds = coupled_labels(300, 21);
    SolverConfig cfg;
    for (ClassifierKind kind : {ClassifierKind::Independent, ClassifierKind::Chain,
                                ClassifierKind::EnsembleOfChains}) {
        const MultiLabelModel m = train_classifier(kind, ds, 3, 99, cfg);
        const MultiLabelModel back = MultiLabelModel::from_json(m.to_json());
        Eigen::VectorXd x(1);
        x << -1.3;
        const LabelsetDistribution p1 = predict_joint(m, x);
        const LabelsetDistribution p2 = predict_joint(back, x);
        for (std::size_t k = 0; k < p1.size(); ++k) CHECK(p1.prob(k) == p2.prob(k));
    }
}

TEST_CASE("prediction rejects a feature vector of the wrong length") {
    const MLDataset ds = coupled_labels(100, 2);
    const MultiLabelModel m = train_independent(ds, SolverConfig{});
    Eigen::VectorXd wrong(3);
    wrong << 1, 2, 3;
    CHECK_THROWS(predict_joint(m, wrong));
}

TEST_CASE("strong signal yields accurate exact-match predictions") {
    const MLDataset ds = coupled_labels(2000, 33);
    const auto [train, test] = std::pair{coupled_labels(2000, 33), coupled_labels(500, 34)};
    const MultiLabelModel m = train_chain(train, {1, 2}, SolverConfig{});
    std::vector<Labelset> preds;
    for (Eigen::Index i = 0; i < test.instance_count(); ++i) {
        preds.push_back(
            best_prediction(predict_joint(m, test.features.row(i)), Metric::ExactMatch)
                .labelset);
    }
    CHECK(dataset_accuracy(Metric::ExactMatch, test.labelsets, preds) > 0.75);
}
