#include "mlconf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mlconf {

namespace {

/// Count inversions of v by bottom-up merge sort.
std::int64_t count_inversions(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> buffer(n);
    std::int64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t left = 0; left + width < n; left += 2 * width) {
            const std::size_t mid = left + width;
            const std::size_t right = std::min(left + 2 * width, n);
            std::size_t i = left, j = mid, k = left;
            while (i < mid && j < right) {
                if (v[j] < v[i]) {
                    inversions += static_cast<std::int64_t>(mid - i);
                    buffer[k++] = v[j++];
                } else {
                    buffer[k++] = v[i++];
                }
            }
            while (i < mid) buffer[k++] = v[i++];
            while (j < right) buffer[k++] = v[j++];
            std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(left),
                      buffer.begin() + static_cast<std::ptrdiff_t>(right),
                      v.begin() + static_cast<std::ptrdiff_t>(left));
        }
    }
    return inversions;
}

/// Sum over runs of equal keys of t(t-1)/2.
template <typename Equal>
std::int64_t tie_pairs(const std::vector<std::size_t>& order, Equal equal) {
    std::int64_t total = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i < order.size() && equal(order[i - 1], order[i])) {
            ++run;
        } else {
            total += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

}  // namespace

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n != b.size()) throw std::invalid_argument("kendall_tau: length mismatch");
    if (n < 2) throw std::invalid_argument("kendall_tau: need at least 2 observations");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (a[i] != a[j]) return a[i] < a[j];
        return b[i] < b[j];
    });

    const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t ties_a =
        tie_pairs(order, [&](std::size_t i, std::size_t j) { return a[i] == a[j]; });
    const std::int64_t ties_b_sorted = [&] {
        std::vector<std::size_t> by_b = order;
        std::sort(by_b.begin(), by_b.end(),
                  [&](std::size_t i, std::size_t j) { return b[i] < b[j]; });
        return tie_pairs(by_b, [&](std::size_t i, std::size_t j) { return b[i] == b[j]; });
    }();
    const std::int64_t ties_both = tie_pairs(
        order, [&](std::size_t i, std::size_t j) { return a[i] == a[j] && b[i] == b[j]; });

    if (ties_a == n0 || ties_b_sorted == n0) {
        throw std::invalid_argument("kendall_tau: constant input, tau undefined");
    }

    std::vector<double> b_in_a_order(n);
    for (std::size_t i = 0; i < n; ++i) b_in_a_order[i] = b[order[i]];
    const std::int64_t discordant = count_inversions(b_in_a_order);

    const double numerator = static_cast<double>(n0 - ties_a - ties_b_sorted + ties_both -
                                                 2 * discordant);
    const double denominator = std::sqrt(static_cast<double>(n0 - ties_a)) *
                               std::sqrt(static_cast<double>(n0 - ties_b_sorted));
    return numerator / denominator;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n != b.size()) throw std::invalid_argument("pearson: length mismatch");
    if (n < 2) throw std::invalid_argument("pearson: need at least 2 observations");
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw std::invalid_argument("pearson: zero variance input");
    }
    return sab / std::sqrt(saa * sbb);
}

double fisher_z(double r, bool* clamped) {
    if (clamped) *clamped = false;
    if (std::abs(r) > 1.0) throw std::invalid_argument("fisher_z: |r| > 1");
    if (std::abs(r) > 1.0 - 1e-12) {
        if (clamped) *clamped = true;
        r = std::copysign(1.0 - 1e-12, r);
    }
    return std::atanh(r);
}

namespace {

/// Continued fraction for the incomplete beta (Lentz's method).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = a * std::log(x) + b * std::log1p(-x) - std::log(a) -
                            (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(ln_front) * beta_continued_fraction(a, b, x);
    }
    // symmetry: I_x(a,b) = 1 - I_{1-x}(b,a)
    const double ln_front_sym = b * std::log1p(-x) + a * std::log(x) - std::log(b) -
                                (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    return 1.0 - std::exp(ln_front_sym) * beta_continued_fraction(b, a, 1.0 - x);
}

double student_t_cdf(double t, double nu) {
    if (nu <= 0.0) throw std::invalid_argument("student_t_cdf: dof must be positive");
    if (t == 0.0) return 0.5;
    const double x = nu / (nu + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

std::string significance_stars(double p_value) {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

RegressionResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<std::string>& names) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw std::invalid_argument("ols: response length mismatch");
    if (static_cast<Eigen::Index>(names.size()) != p) {
        throw std::invalid_argument("ols: name count does not match design columns");
    }
    if (n <= p) throw std::invalid_argument("ols: fewer observations than parameters");

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < p) throw std::invalid_argument("ols: rank-deficient design");

    RegressionResult result;
    result.names = names;
    result.n_obs = static_cast<long>(n);
    result.estimates = qr.solve(y);

    const Eigen::VectorXd residuals = y - X * result.estimates;
    const double rss = residuals.squaredNorm();
    const double sigma2 = rss / static_cast<double>(n - p);
    result.rmse = std::sqrt(sigma2);

    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    result.std_errors.resize(p);
    result.t_stats.resize(p);
    result.p_values.resize(p);
    const double dof = static_cast<double>(n - p);
    for (Eigen::Index j = 0; j < p; ++j) {
        result.std_errors[j] = std::sqrt(sigma2 * xtx_inv(j, j));
        result.t_stats[j] =
            result.std_errors[j] > 0.0 ? result.estimates[j] / result.std_errors[j] : 0.0;
        result.p_values[j] = 2.0 * (1.0 - student_t_cdf(std::abs(result.t_stats[j]), dof));
        result.stars.push_back(significance_stars(result.p_values[j]));
    }

    const double mean_y = y.mean();
    const double tss = (y.array() - mean_y).square().sum();
    if (tss > 0.0) {
        result.r_squared = 1.0 - rss / tss;
        result.adj_r_squared = 1.0 - (1.0 - result.r_squared) *
                                         static_cast<double>(n - 1) / static_cast<double>(n - p);
    } else {
        result.r_squared = 0.0;  // constant response: R^2 undefined, reported 0
        result.adj_r_squared = 0.0;
    }
    return result;
}

}  // namespace mlconf
