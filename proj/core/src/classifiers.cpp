#include "mlconf/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace mlconf {

std::string classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Independent: return "independent";
        case ClassifierKind::Chain: return "chain";
        case ClassifierKind::EnsembleOfChains: return "ecc";
    }
    throw std::logic_error("unreachable classifier tag");
}

ClassifierKind classifier_from_name(const std::string& name) {
    if (name == "independent") return ClassifierKind::Independent;
    if (name == "chain") return ClassifierKind::Chain;
    if (name == "ecc") return ClassifierKind::EnsembleOfChains;
    throw std::invalid_argument("unknown classifier '" + name +
                                "' (expected independent, chain, or ecc)");
}

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd D(X.rows(), X.cols() + 1);
    D.col(0).setOnes();
    D.rightCols(X.cols()) = X;
    return D;
}

struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
};

Standardization compute_standardization(const Eigen::MatrixXd& X) {
    Standardization s;
    s.mean = X.colwise().mean();
    s.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - s.mean[j]).square().mean();
        const double sd = std::sqrt(var);
        s.scale[j] = sd > 0.0 ? sd : 1.0;  // constant columns pass through
    }
    return s;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& scale) {
    return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd standardize_row(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                                const Eigen::VectorXd& scale) {
    return (x - mean).cwiseQuotient(scale);
}

void check_order(const std::vector<int>& order, int L) {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < L; ++j) {
        if (j >= static_cast<int>(sorted.size()) || sorted[j] != j + 1) {
            throw std::invalid_argument("chain order is not a permutation of 1..L");
        }
    }
    if (static_cast<int>(order.size()) != L) {
        throw std::invalid_argument("chain order length != L");
    }
}

Eigen::VectorXd label_column(const MLDataset& ds, int label) {
    Eigen::VectorXd t(ds.instance_count());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        t[i] = ds.labelsets[static_cast<std::size_t>(i)].get(label) ? 1.0 : 0.0;
    }
    return t;
}

ChainModel train_chain_members(const MLDataset& ds, const std::vector<int>& order,
                               const Eigen::MatrixXd& Z, const SolverConfig& cfg) {
    const int L = ds.label_count();
    ChainModel chain;
    chain.order = order;
    chain.models.reserve(order.size());
    Eigen::MatrixXd design = Z;
    for (int pos = 0; pos < L; ++pos) {
        chain.models.push_back(train_binary(design, label_column(ds, order[pos]), cfg));
        if (pos + 1 < L) {
            design.conservativeResize(Eigen::NoChange, design.cols() + 1);
            design.col(design.cols() - 1) = label_column(ds, order[pos]);
        }
    }
    return chain;
}

/// Exact joint of one chain by enumerating all 2^L label paths.
LabelsetDistribution chain_joint(const ChainModel& chain, const Eigen::VectorXd& z) {
    const int L = static_cast<int>(chain.order.size());
    const std::size_t n = std::size_t{1} << L;
    std::vector<double> probs(n, 0.0);
    // path bits are in chain order; mask bit p = value of label order[p]
    for (std::size_t path = 0; path < n; ++path) {
        double prob = 1.0;
        for (int pos = 0; pos < L; ++pos) {
            Eigen::VectorXd input(z.size() + pos);
            input.head(z.size()) = z;
            for (int q = 0; q < pos; ++q) {
                input[z.size() + q] = (path >> q) & 1u ? 1.0 : 0.0;
            }
            const double p1 = predict_binary(chain.models[static_cast<std::size_t>(pos)], input);
            prob *= ((path >> pos) & 1u) ? p1 : 1.0 - p1;
        }
        // map the path to the labelset index (label 1 = MSB)
        std::uint32_t index = 0;
        for (int pos = 0; pos < L; ++pos) {
            if ((path >> pos) & 1u) index |= 1u << (L - chain.order[static_cast<std::size_t>(pos)]);
        }
        probs[index] = prob;
    }
    return make_distribution(std::move(probs), L);
}

MultiLabelModel base_model(const MLDataset& ds) {
    ds.validate();
    MultiLabelModel m;
    m.label_count = ds.label_count();
    const Standardization s = compute_standardization(ds.features);
    m.feature_mean = s.mean;
    m.feature_scale = s.scale;
    return m;
}

}  // namespace

BinaryModel train_binary(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                         const SolverConfig& cfg) {
    const Eigen::MatrixXd D = with_intercept(features);
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(D.cols());
    mask[0] = 0.0;  // intercept unpenalized
    const LogisticFit fit = fit_binomial_logistic(
        D, targets, Eigen::VectorXd::Ones(targets.size()), mask, cfg);
    return BinaryModel{fit.weights};
}

double predict_binary(const BinaryModel& m, const Eigen::VectorXd& x) {
    if (x.size() + 1 != m.weights.size()) {
        throw std::invalid_argument("feature dimension does not match binary model");
    }
    return sigmoid(m.weights[0] + m.weights.tail(x.size()).dot(x));
}

MultiLabelModel train_independent(const MLDataset& ds, const SolverConfig& cfg) {
    MultiLabelModel m = base_model(ds);
    m.kind = ClassifierKind::Independent;
    const Eigen::MatrixXd Z = standardize(ds.features, m.feature_mean, m.feature_scale);
    for (int j = 1; j <= m.label_count; ++j) {
        m.per_label.push_back(train_binary(Z, label_column(ds, j), cfg));
    }
    return m;
}

MultiLabelModel train_chain(const MLDataset& ds, const std::vector<int>& order,
                            const SolverConfig& cfg) {
    MultiLabelModel m = base_model(ds);
    m.kind = ClassifierKind::Chain;
    check_order(order, m.label_count);
    const Eigen::MatrixXd Z = standardize(ds.features, m.feature_mean, m.feature_scale);
    m.chains.push_back(train_chain_members(ds, order, Z, cfg));
    return m;
}

MultiLabelModel train_ensemble(const MLDataset& ds, int member_count, std::uint64_t seed,
                               const SolverConfig& cfg) {
    if (member_count < 1) throw std::invalid_argument("ensemble needs at least one member");
    MultiLabelModel m = base_model(ds);
    m.kind = ClassifierKind::EnsembleOfChains;
    const Eigen::MatrixXd Z = standardize(ds.features, m.feature_mean, m.feature_scale);
    std::mt19937_64 rng(seed);
    for (int member = 0; member < member_count; ++member) {
        std::vector<int> order(static_cast<std::size_t>(m.label_count));
        std::iota(order.begin(), order.end(), 1);
        std::shuffle(order.begin(), order.end(), rng);
        m.chains.push_back(train_chain_members(ds, order, Z, cfg));
    }
    return m;
}

MultiLabelModel train_classifier(ClassifierKind kind, const MLDataset& ds,
                                 int ensemble_members, std::uint64_t seed,
                                 const SolverConfig& cfg) {
    switch (kind) {
        case ClassifierKind::Independent:
            return train_independent(ds, cfg);
        case ClassifierKind::Chain: {
            std::vector<int> order(static_cast<std::size_t>(ds.label_count()));
            std::iota(order.begin(), order.end(), 1);
            return train_chain(ds, order, cfg);
        }
        case ClassifierKind::EnsembleOfChains:
            return train_ensemble(ds, ensemble_members, seed, cfg);
    }
    throw std::logic_error("unreachable classifier tag");
}

LabelsetDistribution predict_joint(const MultiLabelModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.feature_mean.size()) {
        throw std::invalid_argument("feature dimension does not match model schema");
    }
    const Eigen::VectorXd z = standardize_row(x, m.feature_mean, m.feature_scale);
    switch (m.kind) {
        case ClassifierKind::Independent: {
            MarginalVector marg(static_cast<std::size_t>(m.label_count));
            for (int j = 0; j < m.label_count; ++j) {
                marg[static_cast<std::size_t>(j)] =
                    predict_binary(m.per_label[static_cast<std::size_t>(j)], z);
            }
            return joint_from_marginals(marg);
        }
        case ClassifierKind::Chain:
            return chain_joint(m.chains.front(), z);
        case ClassifierKind::EnsembleOfChains: {
            std::vector<double> mean_probs(std::size_t{1} << m.label_count, 0.0);
            for (const ChainModel& chain : m.chains) {
                const LabelsetDistribution d = chain_joint(chain, z);
                for (std::size_t k = 0; k < d.size(); ++k) mean_probs[k] += d.prob(k);
            }
            for (double& p : mean_probs) p /= static_cast<double>(m.chains.size());
            return make_distribution(std::move(mean_probs), m.label_count);
        }
    }
    throw std::logic_error("unreachable classifier tag");
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string MultiLabelModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = classifier_name(kind);
    j["L"] = label_count;
    j["feature_mean"] = vec_to_json(feature_mean);
    j["feature_scale"] = vec_to_json(feature_scale);
    j["per_label"] = nlohmann::json::array();
    for (const BinaryModel& b : per_label) j["per_label"].push_back(vec_to_json(b.weights));
    j["chains"] = nlohmann::json::array();
    for (const ChainModel& c : chains) {
        nlohmann::json jc;
        jc["order"] = c.order;
        jc["models"] = nlohmann::json::array();
        for (const BinaryModel& b : c.models) jc["models"].push_back(vec_to_json(b.weights));
        j["chains"].push_back(std::move(jc));
    }
    return j.dump();
}

MultiLabelModel MultiLabelModel::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format_version").get<int>() != 1) {
        throw std::invalid_argument("unsupported model format version");
    }
    MultiLabelModel m;
    m.kind = classifier_from_name(j.at("kind").get<std::string>());
    m.label_count = j.at("L").get<int>();
    m.feature_mean = vec_from_json(j.at("feature_mean"));
    m.feature_scale = vec_from_json(j.at("feature_scale"));
    for (const auto& b : j.at("per_label")) m.per_label.push_back(BinaryModel{vec_from_json(b)});
    for (const auto& jc : j.at("chains")) {
        ChainModel c;
        c.order = jc.at("order").get<std::vector<int>>();
        for (const auto& b : jc.at("models")) c.models.push_back(BinaryModel{vec_from_json(b)});
        m.chains.push_back(std::move(c));
    }
    return m;
}

}  // namespace mlconf
