#include <doctest.h>

#include <cmath>
#include <random>

#include "mlconf/logistic.hpp"

using namespace mlconf;

namespace {

struct Problem {
    Eigen::MatrixXd X;
    Eigen::VectorXd successes, trials, mask;
};

Problem random_bernoulli(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Problem prob;
    prob.X = Eigen::MatrixXd(n, p);
    Eigen::VectorXd w_true(p);
    for (int j = 0; j < p; ++j) w_true[j] = g(rng);
    for (int i = 0; i < n; ++i) {
        prob.X(i, 0) = 1.0;
        for (int j = 1; j < p; ++j) prob.X(i, j) = g(rng);
    }
    prob.successes = Eigen::VectorXd(n);
    prob.trials = Eigen::VectorXd::Ones(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        prob.successes[i] = u(rng) < sigmoid(prob.X.row(i).dot(w_true)) ? 1.0 : 0.0;
    }
    prob.mask = Eigen::VectorXd::Ones(p);
    prob.mask[0] = 0.0;  // intercept unpenalized
    return prob;
}

// Central-difference gradient of the penalized objective.
Eigen::VectorXd numeric_gradient(const Problem& prob, double lambda,
                                 const Eigen::VectorXd& w) {
    const double h = 1e-6;
    Eigen::VectorXd g(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        Eigen::VectorXd lo = w, hi = w;
        lo[j] -= h;
        hi[j] += h;
        g[j] = (binomial_objective(prob.X, prob.successes, prob.trials, prob.mask, lambda, hi) -
                binomial_objective(prob.X, prob.successes, prob.trials, prob.mask, lambda, lo)) /
               (2.0 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("fit reaches a stationary point of the penalized objective") {
    const Problem prob = random_bernoulli(300, 4, 11);
    SolverConfig cfg;
    cfg.ridge_lambda = 0.5;
    const LogisticFit fit =
        fit_binomial_logistic(prob.X, prob.successes, prob.trials, prob.mask, cfg);
    CHECK(fit.gradient_norm < 1e-8);
    CHECK(numeric_gradient(prob, cfg.ridge_lambda, fit.weights).norm() < 1e-4);
}

TEST_CASE("objective path is monotone non-increasing") {
    const Problem prob = random_bernoulli(500, 5, 23);
    SolverConfig cfg;
    cfg.ridge_lambda = 1.0;
    const LogisticFit fit =
        fit_binomial_logistic(prob.X, prob.successes, prob.trials, prob.mask, cfg);
    for (std::size_t i = 1; i < fit.objective_path.size(); ++i) {
        CHECK(fit.objective_path[i] <= fit.objective_path[i - 1] + 1e-12);
    }
}

TEST_CASE("stronger ridge shrinks the penalized weights") {
    const Problem prob = random_bernoulli(400, 4, 31);
    SolverConfig weak, strong;
    weak.ridge_lambda = 1e-3;
    strong.ridge_lambda = 100.0;
    const auto w1 = fit_binomial_logistic(prob.X, prob.successes, prob.trials, prob.mask, weak);
    const auto w2 =
        fit_binomial_logistic(prob.X, prob.successes, prob.trials, prob.mask, strong);
    CHECK(w2.weights.tail(3).norm() < w1.weights.tail(3).norm());
}

TEST_CASE("perfectly separable data still converges under ridge") {
    Eigen::MatrixXd X(6, 2);
    Eigen::VectorXd y(6), trials = Eigen::VectorXd::Ones(6);
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = i < 3 ? -1.0 - i : 1.0 + i;
        y[i] = i < 3 ? 0.0 : 1.0;
    }
    Eigen::VectorXd mask(2);
    mask << 0.0, 1.0;
    SolverConfig cfg;
    cfg.ridge_lambda = 1.0;
    const LogisticFit fit = fit_binomial_logistic(X, y, trials, mask, cfg);
    CHECK(std::isfinite(fit.weights[1]));
    CHECK(fit.gradient_norm < 1e-8);
}

TEST_CASE("binomial counts match the aggregated bernoulli fit") {
    // 10 successes of 20 trials at x=0 and 15 of 20 at x=1, as counts...
    Eigen::MatrixXd Xc(2, 2);
    Xc << 1, 0, 1, 1;
    Eigen::VectorXd sc(2), tc(2);
    sc << 10, 15;
    tc << 20, 20;
    // ...and the same data as 40 bernoulli rows.
    Eigen::MatrixXd Xb(40, 2);
    Eigen::VectorXd sb(40), tb = Eigen::VectorXd::Ones(40);
    for (int i = 0; i < 40; ++i) {
        Xb(i, 0) = 1.0;
        Xb(i, 1) = i < 20 ? 0.0 : 1.0;
        sb[i] = (i < 20 ? i < 10 : i < 35) ? 1.0 : 0.0;
    }
    Eigen::VectorXd mask(2);
    mask << 0.0, 1.0;
    SolverConfig cfg;
    cfg.ridge_lambda = 0.25;
    const auto wc = fit_binomial_logistic(Xc, sc, tc, mask, cfg).weights;
    const auto wb = fit_binomial_logistic(Xb, sb, tb, mask, cfg).weights;
    CHECK((wc - wb).norm() < 1e-9);
}

TEST_CASE("invalid inputs are rejected") {
    Eigen::MatrixXd X(2, 1);
    X << 1, 1;
    Eigen::VectorXd bad(2), trials(2), mask = Eigen::VectorXd::Ones(1);
    trials << 1, 1;
    bad << 2, 0;  // successes above trials
    CHECK_THROWS(fit_binomial_logistic(X, bad, trials, mask, SolverConfig{}));
    Eigen::MatrixXd empty(0, 1);
    CHECK_THROWS(fit_binomial_logistic(empty, Eigen::VectorXd(0), Eigen::VectorXd(0), mask,
                                       SolverConfig{}));
}

TEST_CASE("two-class multinomial agrees with binomial logistic") {
    const Problem prob = random_bernoulli(300, 3, 57);
    SolverConfig cfg;
    cfg.ridge_lambda = 0.7;
    const auto binom =
        fit_binomial_logistic(prob.X, prob.successes, prob.trials, prob.mask, cfg);
    Eigen::MatrixXd counts(300, 2);
    for (int i = 0; i < 300; ++i) {
        counts(i, 0) = 1.0 - prob.successes[i];  // class 0 = failure (reference)
        counts(i, 1) = prob.successes[i];
    }
    const auto multi = fit_multinomial_logistic(prob.X, counts, prob.mask, cfg);
    CHECK((multi.weights.col(0) - binom.weights).norm() < 1e-7);
}

TEST_CASE("softmax probabilities sum to one and respect weights") {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2, 3);  // 4 classes, all equal
    Eigen::VectorXd x(2);
    x << 1.0, 2.0;
    const Eigen::VectorXd p = softmax_probs(W, x);
    REQUIRE(p.size() == 4);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
    for (int k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("multinomial fit reaches a stationary point") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    const int n = 400, p = 3, K = 4;
    Eigen::MatrixXd X(n, p), counts = Eigen::MatrixXd::Zero(n, K);
    Eigen::MatrixXd W_true(p, K - 1);
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < K - 1; ++k) W_true(j, k) = g(rng);
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (int j = 1; j < p; ++j) X(i, j) = g(rng);
        const Eigen::VectorXd probs = softmax_probs(W_true, X.row(i));
        double r = u(rng), acc = 0.0;
        int cls = K - 1;
        for (int k = 0; k < K; ++k) {
            acc += probs[k];
            if (r <= acc) {
                cls = k;
                break;
            }
        }
        counts(i, cls) = 1.0;
    }
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(p);
    mask[0] = 0.0;
    SolverConfig cfg;
    cfg.ridge_lambda = 0.3;
    const MultinomialFit fit = fit_multinomial_logistic(X, counts, mask, cfg);
    // the line search can stall a hair above the gradient target once the
    // objective is flat to double precision
    CHECK(fit.gradient_norm < 1e-6);

    // central differences on the flattened weights
    const double h = 1e-6;
    double max_grad = 0.0;
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < K - 1; ++k) {
            Eigen::MatrixXd lo = fit.weights, hi = fit.weights;
            lo(j, k) -= h;
            hi(j, k) += h;
            const double d =
                (multinomial_objective(X, counts, mask, cfg.ridge_lambda, hi) -
                 multinomial_objective(X, counts, mask, cfg.ridge_lambda, lo)) /
                (2.0 * h);
            max_grad = std::max(max_grad, std::abs(d));
        }
    }
    CHECK(max_grad < 1e-3);
}
