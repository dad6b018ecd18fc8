#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlconf/dataset.hpp"
#include "mlconf/labelset.hpp"
#include "mlconf/logistic.hpp"

namespace mlconf {

enum class ClassifierKind { Independent, Chain, EnsembleOfChains };

std::string classifier_name(ClassifierKind k);  // "independent", "chain", "ecc"
ClassifierKind classifier_from_name(const std::string& name);

/// Ridge logistic model for a single binary target; weights[0] is the
/// unpenalized intercept.
struct BinaryModel {
    Eigen::VectorXd weights;
};

BinaryModel train_binary(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                         const SolverConfig& cfg);
double predict_binary(const BinaryModel& m, const Eigen::VectorXd& x);

/// One classifier chain: label order plus per-position conditional models.
/// The model at position j consumes the standardized features followed by
/// the 0/1 values of the j-1 preceding labels in the order.
struct ChainModel {
    std::vector<int> order;  // permutation of 1..L
    std::vector<BinaryModel> models;
};

/// A trained probabilistic multi-label classifier. Prediction always yields
/// the full joint distribution over 2^L labelsets: the independent model as a
/// product of marginals, chains by exact enumeration of all 2^L paths, and
/// the ensemble as the arithmetic mean of its member joints.
struct MultiLabelModel {
    ClassifierKind kind = ClassifierKind::Independent;
    int label_count = 0;
    Eigen::VectorXd feature_mean;   // train-set standardization constants
    Eigen::VectorXd feature_scale;
    std::vector<BinaryModel> per_label;  // Independent
    std::vector<ChainModel> chains;      // Chain: 1 entry; ECC: M entries

    std::string to_json() const;
    static MultiLabelModel from_json(const std::string& text);
};

MultiLabelModel train_independent(const MLDataset& ds, const SolverConfig& cfg);
MultiLabelModel train_chain(const MLDataset& ds, const std::vector<int>& order,
                            const SolverConfig& cfg);
MultiLabelModel train_ensemble(const MLDataset& ds, int member_count, std::uint64_t seed,
                               const SolverConfig& cfg);

/// Train whichever kind is named; ensembles use the given member count.
MultiLabelModel train_classifier(ClassifierKind kind, const MLDataset& ds,
                                 int ensemble_members, std::uint64_t seed,
                                 const SolverConfig& cfg);

LabelsetDistribution predict_joint(const MultiLabelModel& m, const Eigen::VectorXd& x);

}  // namespace mlconf
