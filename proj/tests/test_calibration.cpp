#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mlconf/calibration.hpp"

using namespace mlconf;

namespace {

// Synthetic EM calibration data: one dataset, one classifier, a single
// informative score whose logit is the true success probability's logit.
CalibrationDataset bernoulli_fixture(int n, std::uint64_t seed,
                                     std::vector<CandidateKind> candidates = {CandidateKind::HP}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    CalibrationDataset data;
    data.metric = Metric::ExactMatch;
    data.candidates = candidates;
    data.successes.resize(n);
    data.trials.resize(n);
    for (int i = 0; i < n; ++i) {
        const double p = u(rng);
        CalibrationRow row;
        row.dataset = "synth";
        row.classifier = "ecc";
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            // first score carries the signal, any others pure noise
            row.scores.push_back(c == 0 ? p : u(rng));
        }
        data.rows.push_back(std::move(row));
        data.successes[i] = u(rng) < p ? 1.0 : 0.0;
        data.trials[i] = 1.0;
    }
    return data;
}

}  // namespace

TEST_CASE("confusion counts partition the label positions") {
    const Labelset truth(std::vector<int>{1, 1, 0, 0});
    const Labelset pred(std::vector<int>{1, 0, 1, 0});
    const ConfusionCounts c = confusion_counts(truth, pred);
    CHECK(c.tp == 1);
    CHECK(c.fn == 1);
    CHECK(c.fp == 1);
    CHECK(c.tn == 1);
    CHECK(c.tp + c.tn + c.fp + c.fn == 4);
    CHECK_THROWS(confusion_counts(truth, Labelset(0, 3)));
}

TEST_CASE("design row layout: dataset bias, classifier dummy, per-dataset slopes") {
    CalibrationModel m;
    m.metric = Metric::ExactMatch;
    m.candidates = {CandidateKind::HP, CandidateKind::SE};
    m.datasets = {"d1", "d2"};
    m.classifiers = {"ecc", "chain"};
    REQUIRE(m.design_dim() == 2 + 1 + 2 * 2);

    CalibrationRow row;
    row.dataset = "d2";
    row.classifier = "chain";
    row.scores = {0.7, 0.3};
    const Eigen::VectorXd x = m.design_row(row);
    CHECK(x[0] == 0.0);  // d1 bias
    CHECK(x[1] == 1.0);  // d2 bias
    CHECK(x[2] == 1.0);  // classifier "chain" dummy (first level is baseline)
    CHECK(x[3] == 0.0);  // HP slope for d1
    CHECK(x[4] == 0.7);  // HP slope for d2
    CHECK(x[5] == 0.0);  // SE slope for d1
    CHECK(x[6] == 0.3);  // SE slope for d2

    CalibrationRow unseen = row;
    unseen.dataset = "d3";
    CHECK_THROWS(m.design_row(unseen));
    unseen = row;
    unseen.classifier = "br";
    CHECK_THROWS(m.design_row(unseen));
    unseen = row;
    unseen.scores = {0.7};
    CHECK_THROWS(m.design_row(unseen));
}

TEST_CASE("zero coefficients predict one half, uniform softmax predicts a third") {
    CalibrationModel em;
    em.metric = Metric::ExactMatch;
    em.candidates = {CandidateKind::HP};
    em.datasets = {"d"};
    em.classifiers = {"ecc"};
    em.weights = Eigen::VectorXd::Zero(em.design_dim());
    CalibrationRow row;
    row.dataset = "d";
    row.classifier = "ecc";
    row.scores = {0.7};
    CHECK(predict_expected_accuracy(em, row) == doctest::Approx(0.5));

    CalibrationModel js = em;
    js.metric = Metric::JaccardSimilarity;
    js.class_weights = Eigen::MatrixXd::Zero(js.design_dim(), 3);
    // uniform class probabilities: S = 0.25 / (0.25 + 0.25 + 0.25)
    CHECK(predict_expected_accuracy(js, row) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("prediction matches a hand-computed linear predictor") {
    CalibrationModel m;
    m.metric = Metric::ExactMatch;
    m.candidates = {CandidateKind::HP};
    m.datasets = {"d"};
    m.classifiers = {"ecc"};
    m.weights = Eigen::VectorXd(2);
    m.weights << -1.0, 3.0;  // bias, slope
    CalibrationRow row;
    row.dataset = "d";
    row.classifier = "ecc";
    row.scores = {0.7};
    const double eta = -1.0 + 3.0 * 0.7;
    CHECK(predict_expected_accuracy(m, row) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-eta))).epsilon(1e-15));
}

TEST_CASE("binomial calibrator recovers a monotone score-accuracy link") {
    const CalibrationDataset data = bernoulli_fixture(4000, 31);
    const CalibrationModel m = fit_binomial_calibrator(
        Metric::ExactMatch, data.candidates, data.rows, data.successes, data.trials, 1e-4);
    CHECK(m.weights[1] > 0.0);  // higher score, higher predicted accuracy
    CalibrationRow lo, hi;
    lo.dataset = hi.dataset = "synth";
    lo.classifier = hi.classifier = "ecc";
    lo.scores = {0.1};
    hi.scores = {0.9};
    const double p_lo = predict_expected_accuracy(m, lo);
    const double p_hi = predict_expected_accuracy(m, hi);
    CHECK(p_lo < p_hi);
    CHECK(p_lo == doctest::Approx(0.1).epsilon(0.5));
    CHECK(p_hi == doctest::Approx(0.9).epsilon(0.15));
}

TEST_CASE("MIX nests single-candidate models at lambda zero") {
    const CalibrationDataset mix_data =
        bernoulli_fixture(1500, 77, {CandidateKind::HP, CandidateKind::SE, CandidateKind::CE});
    CalibrationDataset single = mix_data;
    single.candidates = {CandidateKind::HP};
    for (CalibrationRow& r : single.rows) r.scores.resize(1);

    const CalibrationModel mix = fit_binomial_calibrator(
        Metric::ExactMatch, mix_data.candidates, mix_data.rows, mix_data.successes,
        mix_data.trials, 0.0);
    const CalibrationModel one = fit_binomial_calibrator(
        Metric::ExactMatch, single.candidates, single.rows, single.successes, single.trials,
        0.0);
    const double nll_mix =
        held_out_nll(mix, mix_data.rows, mix_data.successes, mix_data.trials, {});
    const double nll_one =
        held_out_nll(one, single.rows, single.successes, single.trials, {});
    CHECK(nll_mix <= nll_one + 1e-9);
}

TEST_CASE("trials=1 binomial coincides with the bernoulli exact-match path") {
    const CalibrationDataset data = bernoulli_fixture(800, 5);
    const CalibrationModel as_em = fit_binomial_calibrator(
        Metric::ExactMatch, data.candidates, data.rows, data.successes, data.trials, 0.01);
    const CalibrationModel as_hs = fit_binomial_calibrator(
        Metric::HammingSimilarity, data.candidates, data.rows, data.successes, data.trials,
        0.01);
    CHECK((as_em.weights - as_hs.weights).norm() < 1e-10);
}

TEST_CASE("cross validation: single grid, determinism, refit oracle") {
    const CalibrationDataset data = bernoulli_fixture(400, 13);
    CHECK(cross_validate_lambda(data, 5, {0.5}, 1) == 0.5);
    const std::vector<double> grid{0.0, 1e-3, 1e-1, 10.0};
    const double a = cross_validate_lambda(data, 5, grid, 42);
    const double b = cross_validate_lambda(data, 5, grid, 42);
    CHECK(a == b);
    CHECK_THROWS(cross_validate_lambda(data, 1, grid, 0));
    CHECK_THROWS(cross_validate_lambda(data, 5, {}, 0));
}

TEST_CASE("multinomial calibrator reconstructs sensible jaccard predictions") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CalibrationDataset data;
    data.metric = Metric::JaccardSimilarity;
    data.candidates = {CandidateKind::HP};
    const int L = 4;
    for (int i = 0; i < 3000; ++i) {
        const double quality = u(rng);
        CalibrationRow row;
        row.dataset = "synth";
        row.classifier = "ecc";
        row.scores = {quality};
        data.rows.push_back(std::move(row));
        ConfusionCounts c;
        for (int j = 0; j < L; ++j) {
            const bool relevant = u(rng) < 0.5;
            const bool correct = u(rng) < 0.25 + 0.7 * quality;
            if (relevant && correct) ++c.tp;
            if (relevant && !correct) ++c.fn;
            if (!relevant && correct) ++c.tn;
            if (!relevant && !correct) ++c.fp;
        }
        data.counts.push_back(c);
    }
    const CalibrationModel m =
        fit_multinomial_calibrator(data.candidates, data.rows, data.counts, 1e-3);
    CalibrationRow lo, hi;
    lo.dataset = hi.dataset = "synth";
    lo.classifier = hi.classifier = "ecc";
    lo.scores = {0.05};
    hi.scores = {0.95};
    const double p_lo = predict_expected_accuracy(m, lo);
    const double p_hi = predict_expected_accuracy(m, hi);
    CHECK(p_lo > 0.0);
    CHECK(p_hi < 1.0);
    CHECK(p_hi > p_lo + 0.2);
}

TEST_CASE("replicates are deterministic and use distinct splits") {
    const CalibrationDataset data = bernoulli_fixture(300, 8);
    ReplicateConfig cfg;
    cfg.replicates = 4;
    cfg.cv_folds = 4;
    cfg.seed = 21;
    cfg.lambda_grid = {1e-2};
    const auto a = replicate_experiment(data, cfg);
    const auto b = replicate_experiment(data, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].predicted == b[i].predicted);
        CHECK(a[i].realized == b[i].realized);
    }
    // split fingerprints differ across replicates with overwhelming probability
    std::vector<double> fingerprints;
    for (int r = 0; r < cfg.replicates; ++r) {
        double f = 0.0;
        for (const PredictedRealized& pr : a) {
            if (pr.replicate == r) f += pr.realized * 17.0 + pr.predicted;
        }
        fingerprints.push_back(f);
    }
    std::sort(fingerprints.begin(), fingerprints.end());
    CHECK(std::adjacent_find(fingerprints.begin(), fingerprints.end()) == fingerprints.end());
}

TEST_CASE("interval table on a concentrated fixture") {
    std::vector<PredictedRealized> pairs;
    for (int rep = 0; rep < 5; ++rep) {
        for (int i = 0; i < 20; ++i) {
            pairs.push_back({rep, 0.55, 0.55});  // bin (0.5, 0.6], perfectly realized
        }
    }
    const auto rows = interval_table(pairs, 0.1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].bin_lo == doctest::Approx(0.5));
    CHECK(rows[0].bin_hi == doctest::Approx(0.6));
    CHECK(rows[0].lower == doctest::Approx(0.55));
    CHECK(rows[0].upper == doctest::Approx(0.55));
    CHECK(rows[0].match);
    CHECK(rows[0].populated_replicates == 5);
    CHECK(rows[0].point_count == 100);
    CHECK_THROWS(interval_table(pairs, 0.2));
}

TEST_CASE("interval percentiles match the order-statistics oracle") {
    // two replicates with distinct means: the 2.5/97.5 percentiles of two
    // values interpolate linearly between them
    std::vector<PredictedRealized> pairs;
    pairs.push_back({0, 0.35, 0.2});
    pairs.push_back({0, 0.35, 0.4});  // replicate 0 mean 0.3
    pairs.push_back({1, 0.35, 0.7});  // replicate 1 mean 0.7
    const auto rows = interval_table(pairs, 0.1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].lower == doctest::Approx(0.3 + 0.025 * (0.7 - 0.3)).epsilon(1e-12));
    CHECK(rows[0].upper == doctest::Approx(0.3 + 0.975 * (0.7 - 0.3)).epsilon(1e-12));
    CHECK_FALSE(rows[0].match);
}

TEST_CASE("reliability curve on an anti-calibrated fixture") {
    std::vector<PredictedRealized> pairs;
    for (int rep = 0; rep < 3; ++rep) {
        for (double p : {0.15, 0.45, 0.85}) {
            for (int i = 0; i < 10; ++i) pairs.push_back({rep, p, 1.0 - p});
        }
    }
    const auto curve = reliability_curve(pairs, 0.1);
    REQUIRE(curve.size() == 3);
    for (const ReliabilityPoint& pt : curve) {
        CHECK(pt.mean_realized == doctest::Approx(1.0 - pt.bin_center));
        CHECK(pt.point_count == 30);
    }
}
