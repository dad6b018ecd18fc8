#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlconf/confidence.hpp"
#include "mlconf/labelset.hpp"
#include "mlconf/logistic.hpp"
#include "mlconf/metrics.hpp"

namespace mlconf {

/// Per-instance prediction/truth confusion counts; TP+TN+FP+FN == L.
struct ConfusionCounts {
    int tp = 0, tn = 0, fp = 0, fn = 0;
};

ConfusionCounts confusion_counts(const Labelset& truth, const Labelset& prediction);

/// One calibration observation: the factor levels plus the candidate scores
/// entering the model (aligned with CalibrationModel::candidates).
struct CalibrationRow {
    std::string dataset;
    std::string classifier;
    std::vector<double> scores;
};

/// Regression calibrator mapping candidate confidence scores to predicted
/// expected accuracy. EM/HS use ridge binomial logistic regression; JS uses
/// a four-class ridge multinomial over {TP, TN, FP, FN} and reconstructs
/// S = p_TP / (p_TP + p_FP + p_FN). Candidate slopes interact with the
/// dataset factor; dataset and classifier bias terms are unpenalized.
struct CalibrationModel {
    Metric metric = Metric::ExactMatch;
    std::vector<CandidateKind> candidates;
    std::vector<std::string> datasets;
    std::vector<std::string> classifiers;
    double ridge_lambda = 0.0;
    Eigen::VectorXd weights;        // binomial calibrators
    Eigen::MatrixXd class_weights;  // multinomial calibrators, p x 3

    Eigen::Index design_dim() const;
    /// Throws on a dataset/classifier level unseen at fit time.
    Eigen::VectorXd design_row(const CalibrationRow& row) const;
};

CalibrationModel fit_binomial_calibrator(Metric metric,
                                         const std::vector<CandidateKind>& candidates,
                                         const std::vector<CalibrationRow>& rows,
                                         const Eigen::VectorXd& successes,
                                         const Eigen::VectorXd& trials, double ridge_lambda,
                                         const SolverConfig& solver = {});

CalibrationModel fit_multinomial_calibrator(const std::vector<CandidateKind>& candidates,
                                            const std::vector<CalibrationRow>& rows,
                                            const std::vector<ConfusionCounts>& counts,
                                            double ridge_lambda,
                                            const SolverConfig& solver = {});

double predict_expected_accuracy(const CalibrationModel& m, const CalibrationRow& row);

/// Mean held-out negative log-likelihood of a fitted calibrator on new data
/// (JS passes counts, EM/HS successes/trials).
double held_out_nll(const CalibrationModel& m, const std::vector<CalibrationRow>& rows,
                    const Eigen::VectorXd& successes, const Eigen::VectorXd& trials,
                    const std::vector<ConfusionCounts>& counts);

/// All inputs needed to fit one calibrator; counts used only for JS.
struct CalibrationDataset {
    Metric metric = Metric::ExactMatch;
    std::vector<CandidateKind> candidates;
    std::vector<CalibrationRow> rows;
    Eigen::VectorXd successes;
    Eigen::VectorXd trials;
    std::vector<ConfusionCounts> counts;

    double realized_accuracy(std::size_t i) const;
};

/// k-fold cross validation over the ridge grid; ties pick the smaller λ.
double cross_validate_lambda(const CalibrationDataset& data, int folds,
                             const std::vector<double>& grid, std::uint64_t seed,
                             const SolverConfig& solver = {});

inline std::vector<double> default_lambda_grid() {
    return {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
}

struct PredictedRealized {
    int replicate = 0;
    double predicted = 0.0;
    double realized = 0.0;
};

struct ReplicateConfig {
    int replicates = 20;
    double train_fraction = 0.5;
    int cv_folds = 10;
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid = default_lambda_grid();
    SolverConfig solver;
};

/// Repeated split / CV / fit / predict over the pooled calibration data;
/// deterministic in the master seed.
std::vector<PredictedRealized> replicate_experiment(const CalibrationDataset& data,
                                                    const ReplicateConfig& cfg);

/// One predicted-accuracy bin (lo, hi] with the 95% empirical interval of
/// per-replicate mean realized accuracy. Empty bins are simply absent.
struct IntervalRow {
    double bin_lo = 0.0, bin_hi = 0.0;
    double lower = 0.0, upper = 0.0;
    bool match = false;  // interval lies inside the bin
    int populated_replicates = 0;
    long point_count = 0;
};

std::vector<IntervalRow> interval_table(const std::vector<PredictedRealized>& pairs,
                                        double bin_width);

struct ReliabilityPoint {
    double bin_center = 0.0;
    double mean_realized = 0.0;
    double lower = 0.0, upper = 0.0;  // 95% band across replicates
    long point_count = 0;
};

std::vector<ReliabilityPoint> reliability_curve(const std::vector<PredictedRealized>& pairs,
                                                double bin_width);

}  // namespace mlconf
