#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mlconf {

/// Tie-corrected Kendall tau-b via sort-and-merge counting, O(n log n).
/// Throws when either vector is constant (tau undefined).
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

/// Product-moment correlation; throws on zero variance.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

/// atanh(r) for variance stabilization. |r| within 1e-12 of 1 clamps to
/// atanh(1 - 1e-12) and sets *clamped; |r| > 1 is an error.
double fisher_z(double r, bool* clamped = nullptr);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with nu degrees of freedom.
double student_t_cdf(double t, double nu);

/// Significance stars at the thresholds used throughout the result tables:
/// "***" p<0.01, "**" p<0.05, "*" p<0.1, "" otherwise.
std::string significance_stars(double p_value);

struct RegressionResult {
    std::vector<std::string> names;
    Eigen::VectorXd estimates;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    std::vector<std::string> stars;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double rmse = 0.0;  // residual standard error, sqrt(RSS / (n - p))
    long n_obs = 0;
};

/// Least-squares fit with classical standard errors and two-sided t-tests.
/// The design must be full rank and have more rows than columns.
RegressionResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<std::string>& names);

}  // namespace mlconf
