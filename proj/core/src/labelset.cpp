#include "mlconf/labelset.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mlconf {

namespace {

void check_label_count(int label_count) {
    if (label_count < 1 || label_count > kMaxLabels) {
        throw std::invalid_argument("label count must be in [1, " +
                                    std::to_string(kMaxLabels) + "], got " +
                                    std::to_string(label_count));
    }
}

}  // namespace

Labelset::Labelset(std::uint32_t index, int label_count)
    : index_(index), label_count_(label_count) {
    check_label_count(label_count);
    if (index >= (1u << label_count)) {
        throw std::invalid_argument("labelset index " + std::to_string(index) +
                                    " out of range for L=" + std::to_string(label_count));
    }
}

Labelset::Labelset(const std::vector<int>& bits) : index_(0), label_count_(static_cast<int>(bits.size())) {
    check_label_count(label_count_);
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("labelset bits must be 0/1");
        index_ = (index_ << 1) | static_cast<std::uint32_t>(b);
    }
}

int Labelset::popcount() const { return std::popcount(index_); }

std::vector<int> Labelset::to_bits() const {
    std::vector<int> bits(label_count_);
    for (int j = 1; j <= label_count_; ++j) bits[j - 1] = get(j) ? 1 : 0;
    return bits;
}

std::string Labelset::to_string() const {
    std::ostringstream os;
    os << '[';
    for (int j = 1; j <= label_count_; ++j) {
        if (j > 1) os << ',';
        os << (get(j) ? '1' : '0');
    }
    os << ']';
    return os.str();
}

LabelsetDistribution::LabelsetDistribution(std::vector<double> probs, int label_count)
    : probs_(std::move(probs)), label_count_(label_count) {
    check_label_count(label_count);
    const std::size_t expected = std::size_t{1} << label_count;
    if (probs_.size() != expected) {
        throw std::invalid_argument("distribution over L=" + std::to_string(label_count) +
                                    " labels needs " + std::to_string(expected) +
                                    " entries, got " + std::to_string(probs_.size()));
    }
    for (double& p : probs_) {
        if (!std::isfinite(p)) throw std::invalid_argument("non-finite probability");
        if (p < 0.0) {
            if (p < -1e-12) {
                throw std::invalid_argument("negative probability " + std::to_string(p));
            }
            p = 0.0;  // clamp tiny numerical negatives
        }
    }
    const double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-9");
    }
    // drift at the few-ulp level is left alone so serialization round-trips
    if (std::abs(sum - 1.0) > 1e-13) {
        for (double& p : probs_) p /= sum;
    }
}

std::string LabelsetDistribution::to_json() const {
    nlohmann::json j;
    j["L"] = label_count_;
    j["probs"] = probs_;
    return j.dump();
}

LabelsetDistribution LabelsetDistribution::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    return make_distribution(j.at("probs").get<std::vector<double>>(), j.at("L").get<int>());
}

LabelsetDistribution make_distribution(std::vector<double> probs, int label_count) {
    return LabelsetDistribution(std::move(probs), label_count);
}

LabelsetDistribution uniform(int label_count) {
    check_label_count(label_count);
    const std::size_t n = std::size_t{1} << label_count;
    return LabelsetDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)), label_count);
}

LabelsetDistribution point_mass(const Labelset& y) {
    std::vector<double> probs(std::size_t{1} << y.label_count(), 0.0);
    probs[y.index()] = 1.0;
    return LabelsetDistribution(std::move(probs), y.label_count());
}

MarginalVector marginals(const LabelsetDistribution& d) {
    const int L = d.label_count();
    MarginalVector m(L, 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double p = d.prob(k);
        if (p == 0.0) continue;
        for (int j = 1; j <= L; ++j) {
            if ((k >> (L - j)) & 1u) m[j - 1] += p;
        }
    }
    return m;
}

Labelset mode(const LabelsetDistribution& d) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < d.size(); ++k) {
        if (d.prob(k) > d.prob(best)) best = k;  // ties keep the lowest index
    }
    return Labelset(static_cast<std::uint32_t>(best), d.label_count());
}

LabelsetDistribution joint_from_marginals(const MarginalVector& m) {
    const int L = static_cast<int>(m.size());
    check_label_count(L);
    for (double p : m) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("marginal probability outside [0,1]");
        }
    }
    const std::size_t n = std::size_t{1} << L;
    std::vector<double> probs(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (int j = 1; j <= L; ++j) {
            const bool on = (k >> (L - j)) & 1u;
            probs[k] *= on ? m[j - 1] : 1.0 - m[j - 1];
        }
    }
    return LabelsetDistribution(std::move(probs), L);
}

}  // namespace mlconf
