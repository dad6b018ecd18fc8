#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mlconf {

/// Solver settings shared by every ridge-penalized likelihood fit. The
/// solver is full-batch Newton with step halving, so identical inputs give
/// bit-identical weights.
struct SolverConfig {
    double ridge_lambda = 1.0;
    int max_iterations = 100;
    double tolerance = 1e-8;  // stop when penalized-gradient norm drops below
};

struct LogisticFit {
    Eigen::VectorXd weights;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> objective_path;  // penalized NLL after each iteration
};

/// Ridge binomial logistic regression: successes[i] ~ Binomial(trials[i],
/// sigmoid(x_i . w)). penalty_mask selects which weights the ridge term
/// applies to (0 for intercept-like columns). Bernoulli is trials == 1.
LogisticFit fit_binomial_logistic(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& successes,
                                  const Eigen::VectorXd& trials,
                                  const Eigen::VectorXd& penalty_mask,
                                  const SolverConfig& cfg);

/// Penalized negative log-likelihood at the given weights (test oracle hook).
double binomial_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& successes,
                          const Eigen::VectorXd& trials, const Eigen::VectorXd& penalty_mask,
                          double lambda, const Eigen::VectorXd& w);

struct MultinomialFit {
    /// One coefficient column per non-reference class (class 0 is reference).
    Eigen::MatrixXd weights;  // p x (K-1)
    int iterations = 0;
    double gradient_norm = 0.0;
};

/// Ridge multinomial (softmax) regression over K classes with per-row count
/// vectors. counts is n x K; class 0 is the reference class.
MultinomialFit fit_multinomial_logistic(const Eigen::MatrixXd& X,
                                        const Eigen::MatrixXd& counts,
                                        const Eigen::VectorXd& penalty_mask,
                                        const SolverConfig& cfg);

double multinomial_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& counts,
                             const Eigen::VectorXd& penalty_mask, double lambda,
                             const Eigen::MatrixXd& W);

/// Class probabilities for one row given multinomial weights (K columns out).
Eigen::VectorXd softmax_probs(const Eigen::MatrixXd& W, const Eigen::VectorXd& x);

double sigmoid(double z);

}  // namespace mlconf
