#include "mlconf/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace mlconf {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

/// log(1 + e^z) without overflow.
double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

void check_finite(const Eigen::MatrixXd& X) {
    if (!X.allFinite()) throw std::invalid_argument("non-finite design matrix entry");
}

}  // namespace

double binomial_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& successes,
                          const Eigen::VectorXd& trials, const Eigen::VectorXd& penalty_mask,
                          double lambda, const Eigen::VectorXd& w) {
    const Eigen::VectorXd eta = X * w;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        nll -= successes[i] * eta[i] - trials[i] * log1pexp(eta[i]);
    }
    return nll + 0.5 * lambda * (penalty_mask.array() * w.array().square()).sum();
}

LogisticFit fit_binomial_logistic(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& successes,
                                  const Eigen::VectorXd& trials,
                                  const Eigen::VectorXd& penalty_mask,
                                  const SolverConfig& cfg) {
    check_finite(X);
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n == 0) throw std::invalid_argument("empty training data");
    if (successes.size() != n || trials.size() != n || penalty_mask.size() != p) {
        throw std::invalid_argument("shape mismatch in logistic fit");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (successes[i] < 0.0 || successes[i] > trials[i]) {
            throw std::invalid_argument("successes must lie in [0, trials]");
        }
    }
    const double lambda = cfg.ridge_lambda;

    LogisticFit fit;
    fit.weights = Eigen::VectorXd::Zero(p);
    double objective = binomial_objective(X, successes, trials, penalty_mask, lambda, fit.weights);

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const Eigen::VectorXd eta = X * fit.weights;
        Eigen::VectorXd mu(n), wdiag(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = sigmoid(eta[i]);
            mu[i] = trials[i] * s;
            wdiag[i] = trials[i] * s * (1.0 - s);
        }
        Eigen::VectorXd grad = X.transpose() * (mu - successes) +
                               lambda * (penalty_mask.array() * fit.weights.array()).matrix();
        fit.gradient_norm = grad.norm();
        if (fit.gradient_norm < cfg.tolerance) {
            fit.iterations = iter;
            return fit;
        }

        Eigen::MatrixXd H = X.transpose() * wdiag.asDiagonal() * X;
        H.diagonal() += lambda * penalty_mask;
        // Tiny Levenberg ridge keeps the solve well posed when lambda = 0 and
        // the data are separable.
        H.diagonal().array() += 1e-10;
        const Eigen::VectorXd step = H.ldlt().solve(grad);

        double alpha = 1.0;
        double new_objective = objective;
        Eigen::VectorXd candidate = fit.weights;
        for (int backtrack = 0; backtrack < 50; ++backtrack) {
            candidate = fit.weights - alpha * step;
            new_objective = binomial_objective(X, successes, trials, penalty_mask, lambda, candidate);
            if (new_objective <= objective) break;
            alpha *= 0.5;
        }
        if (new_objective > objective) break;  // cannot improve further
        const double gain = objective - new_objective;
        fit.weights = candidate;
        objective = new_objective;
        fit.objective_path.push_back(objective);
        fit.iterations = iter + 1;
        // Improvements at the resolution of the objective are noise; stop
        // instead of re-running full Newton steps that go nowhere.
        if (gain <= 1e-13 * (1.0 + std::abs(objective))) break;
    }
    {
        const Eigen::VectorXd eta = X * fit.weights;
        Eigen::VectorXd mu(n);
        for (Eigen::Index i = 0; i < n; ++i) mu[i] = trials[i] * sigmoid(eta[i]);
        fit.gradient_norm = (X.transpose() * (mu - successes) +
                             lambda * (penalty_mask.array() * fit.weights.array()).matrix())
                                .norm();
    }
    return fit;
}

double multinomial_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& counts,
                             const Eigen::VectorXd& penalty_mask, double lambda,
                             const Eigen::MatrixXd& W) {
    const Eigen::Index n = X.rows();
    const Eigen::Index K = counts.cols();
    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        // eta_0 = 0 (reference class), eta_k = x . w_k
        Eigen::VectorXd eta = Eigen::VectorXd::Zero(K);
        eta.tail(K - 1) = W.transpose() * X.row(i).transpose();
        const double m = eta.maxCoeff();
        const double logz = m + std::log((eta.array() - m).exp().sum());
        for (Eigen::Index k = 0; k < K; ++k) {
            if (counts(i, k) != 0.0) nll -= counts(i, k) * (eta[k] - logz);
        }
    }
    double penalty = 0.0;
    for (Eigen::Index k = 0; k < W.cols(); ++k) {
        penalty += (penalty_mask.array() * W.col(k).array().square()).sum();
    }
    return nll + 0.5 * lambda * penalty;
}

MultinomialFit fit_multinomial_logistic(const Eigen::MatrixXd& X,
                                        const Eigen::MatrixXd& counts,
                                        const Eigen::VectorXd& penalty_mask,
                                        const SolverConfig& cfg) {
    check_finite(X);
    check_finite(counts);
    const Eigen::Index n = X.rows(), p = X.cols(), K = counts.cols();
    if (counts.rows() != n || penalty_mask.size() != p) {
        throw std::invalid_argument("shape mismatch in multinomial fit");
    }
    if (K < 2) throw std::invalid_argument("multinomial fit needs at least 2 classes");
    const double lambda = cfg.ridge_lambda;
    const Eigen::Index dim = p * (K - 1);

    MultinomialFit fit;
    fit.weights = Eigen::MatrixXd::Zero(p, K - 1);
    double objective = multinomial_objective(X, counts, penalty_mask, lambda, fit.weights);

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        // Class probabilities and per-row trial totals.
        Eigen::MatrixXd probs(n, K);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd eta = Eigen::VectorXd::Zero(K);
            eta.tail(K - 1) = fit.weights.transpose() * X.row(i).transpose();
            const double m = eta.maxCoeff();
            Eigen::VectorXd e = (eta.array() - m).exp();
            probs.row(i) = e.transpose() / e.sum();
        }
        const Eigen::VectorXd totals = counts.rowwise().sum();

        Eigen::VectorXd grad(dim);
        for (Eigen::Index k = 1; k < K; ++k) {
            const Eigen::VectorXd resid =
                (totals.array() * probs.col(k).array() - counts.col(k).array()).matrix();
            grad.segment((k - 1) * p, p) =
                X.transpose() * resid +
                lambda * (penalty_mask.array() * fit.weights.col(k - 1).array()).matrix();
        }
        fit.gradient_norm = grad.norm();
        if (fit.gradient_norm < cfg.tolerance) {
            fit.iterations = iter;
            return fit;
        }

        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index k = 1; k < K; ++k) {
            for (Eigen::Index l = k; l < K; ++l) {
                Eigen::VectorXd wdiag(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double pk = probs(i, k), pl = probs(i, l);
                    wdiag[i] = totals[i] * (k == l ? pk * (1.0 - pk) : -pk * pl);
                }
                const Eigen::MatrixXd block = X.transpose() * wdiag.asDiagonal() * X;
                H.block((k - 1) * p, (l - 1) * p, p, p) = block;
                if (l != k) H.block((l - 1) * p, (k - 1) * p, p, p) = block.transpose();
            }
        }
        for (Eigen::Index k = 1; k < K; ++k) {
            H.diagonal().segment((k - 1) * p, p) += lambda * penalty_mask;
        }
        H.diagonal().array() += 1e-10;
        const Eigen::VectorXd step = H.ldlt().solve(grad);

        double alpha = 1.0;
        double new_objective = objective;
        Eigen::MatrixXd candidate = fit.weights;
        for (int backtrack = 0; backtrack < 50; ++backtrack) {
            candidate = fit.weights;
            for (Eigen::Index k = 1; k < K; ++k) {
                candidate.col(k - 1) -= alpha * step.segment((k - 1) * p, p);
            }
            new_objective = multinomial_objective(X, counts, penalty_mask, lambda, candidate);
            if (new_objective <= objective) break;
            alpha *= 0.5;
        }
        if (new_objective > objective) break;
        const double gain = objective - new_objective;
        fit.weights = candidate;
        objective = new_objective;
        fit.iterations = iter + 1;
        if (gain <= 1e-13 * (1.0 + std::abs(objective))) break;
    }
    {
        const Eigen::Index dim2 = p * (K - 1);
        Eigen::MatrixXd probs(n, K);
        for (Eigen::Index i = 0; i < n; ++i) {
            probs.row(i) = softmax_probs(fit.weights, X.row(i)).transpose();
        }
        const Eigen::VectorXd totals = counts.rowwise().sum();
        Eigen::VectorXd grad(dim2);
        for (Eigen::Index k = 1; k < K; ++k) {
            const Eigen::VectorXd resid =
                (totals.array() * probs.col(k).array() - counts.col(k).array()).matrix();
            grad.segment((k - 1) * p, p) =
                X.transpose() * resid +
                lambda * (penalty_mask.array() * fit.weights.col(k - 1).array()).matrix();
        }
        fit.gradient_norm = grad.norm();
    }
    return fit;
}

Eigen::VectorXd softmax_probs(const Eigen::MatrixXd& W, const Eigen::VectorXd& x) {
    const Eigen::Index K = W.cols() + 1;
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(K);
    eta.tail(K - 1) = W.transpose() * x;
    const double m = eta.maxCoeff();
    Eigen::VectorXd e = (eta.array() - m).exp();
    return e / e.sum();
}

}  // namespace mlconf
