#include "mlconf/synth.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mlconf/logistic.hpp"

namespace mlconf {

SynthDependence synth_dependence_from_name(const std::string& name) {
    if (name == "independent") return SynthDependence::Independent;
    if (name == "chain") return SynthDependence::Chain;
    throw std::invalid_argument("unknown dependence '" + name +
                                "' (expected independent or chain)");
}

namespace {

constexpr int kSynthFeatureDim = 5;

}  // namespace

SyntheticData synth_generate(int label_count, int instance_count,
                             SynthDependence dependence, std::uint64_t seed) {
    if (label_count < 1 || label_count > 10) {
        throw std::invalid_argument("synthetic label count must be in [1,10]");
    }
    if (instance_count < 1) throw std::invalid_argument("instance count must be positive");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Fixed parametric model per seed: one weight vector + bias per label,
    // plus label-to-label couplings for the chain variant.
    const int L = label_count;
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(L));
    std::vector<double> bias(static_cast<std::size_t>(L));
    std::vector<std::vector<double>> coupling(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j) {
        weights[static_cast<std::size_t>(j)].resize(kSynthFeatureDim);
        for (double& w : weights[static_cast<std::size_t>(j)]) w = gauss(rng);
        bias[static_cast<std::size_t>(j)] = 0.5 * gauss(rng);
        coupling[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(j));
        for (double& v : coupling[static_cast<std::size_t>(j)]) v = 1.5 * gauss(rng);
    }

    SyntheticData out;
    out.dataset.name = "synthetic";
    out.dataset.features.resize(instance_count, kSynthFeatureDim);
    for (int j = 1; j <= L; ++j) out.dataset.label_names.push_back("y" + std::to_string(j));
    for (int f = 1; f <= kSynthFeatureDim; ++f) {
        out.dataset.feature_names.push_back("x" + std::to_string(f));
    }
    out.true_joints.reserve(static_cast<std::size_t>(instance_count));

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t n_combos = std::size_t{1} << L;

    for (int i = 0; i < instance_count; ++i) {
        std::vector<double> x(kSynthFeatureDim);
        for (int f = 0; f < kSynthFeatureDim; ++f) {
            x[static_cast<std::size_t>(f)] = gauss(rng);
            out.dataset.features(i, f) = x[static_cast<std::size_t>(f)];
        }

        std::vector<double> probs(n_combos, 1.0);
        for (std::size_t k = 0; k < n_combos; ++k) {
            for (int j = 0; j < L; ++j) {
                double eta = bias[static_cast<std::size_t>(j)];
                for (int f = 0; f < kSynthFeatureDim; ++f) {
                    eta += weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(f)] *
                           x[static_cast<std::size_t>(f)];
                }
                if (dependence == SynthDependence::Chain) {
                    for (int q = 0; q < j; ++q) {
                        const bool yq = (k >> (L - 1 - q)) & 1u;
                        if (yq) eta += coupling[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)];
                    }
                }
                const double p1 = sigmoid(eta);
                const bool yj = (k >> (L - 1 - j)) & 1u;
                probs[k] *= yj ? p1 : 1.0 - p1;
            }
        }
        LabelsetDistribution joint = make_distribution(std::move(probs), L);

        // Sample the labelset from the true joint.
        double u = unif(rng);
        std::uint32_t drawn = static_cast<std::uint32_t>(n_combos - 1);
        for (std::size_t k = 0; k < n_combos; ++k) {
            u -= joint.prob(k);
            if (u <= 0.0) {
                drawn = static_cast<std::uint32_t>(k);
                break;
            }
        }
        out.dataset.labelsets.emplace_back(drawn, L);
        out.true_joints.push_back(std::move(joint));
    }
    out.dataset.validate();
    return out;
}

std::string dataset_to_arff(const MLDataset& ds) {
    ds.validate();
    std::ostringstream os;
    os.precision(17);
    os << "@relation '" << ds.name << ": -C " << ds.label_count() << "'\n\n";
    for (int j = 0; j < ds.label_count(); ++j) {
        const std::string name =
            ds.label_names.empty() ? "y" + std::to_string(j + 1) : ds.label_names[static_cast<std::size_t>(j)];
        os << "@attribute " << name << " {0,1}\n";
    }
    for (Eigen::Index c = 0; c < ds.feature_count(); ++c) {
        const std::string name = ds.feature_names.empty()
                                     ? "x" + std::to_string(c + 1)
                                     : ds.feature_names[static_cast<std::size_t>(c)];
        os << "@attribute " << name << " numeric\n";
    }
    os << "\n@data\n";
    for (Eigen::Index i = 0; i < ds.instance_count(); ++i) {
        const Labelset& y = ds.labelsets[static_cast<std::size_t>(i)];
        for (int j = 1; j <= y.label_count(); ++j) {
            if (j > 1) os << ',';
            os << (y.get(j) ? '1' : '0');
        }
        for (Eigen::Index c = 0; c < ds.feature_count(); ++c) {
            os << ',' << ds.features(i, c);
        }
        os << '\n';
    }
    return os.str();
}

std::string joints_to_json(const std::vector<LabelsetDistribution>& joints) {
    nlohmann::json j = nlohmann::json::array();
    for (const LabelsetDistribution& d : joints) {
        nlohmann::json jd;
        jd["L"] = d.label_count();
        jd["probs"] = d.probs();
        j.push_back(std::move(jd));
    }
    return j.dump();
}

}  // namespace mlconf
