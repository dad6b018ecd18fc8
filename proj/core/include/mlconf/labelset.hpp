#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlconf {

/// Hard cap on the number of labels; every distribution is fully enumerated
/// over 2^L labelsets, so L beyond this is refused outright.
inline constexpr int kMaxLabels = 25;

/// A relevance vector over L labels. Label 1 is the most significant bit of
/// the packed index, so index k = sum_j y_j * 2^(L-j).
class Labelset {
public:
    Labelset(std::uint32_t index, int label_count);
    explicit Labelset(const std::vector<int>& bits);

    int label_count() const { return label_count_; }
    std::uint32_t index() const { return index_; }

    /// Relevance of label j, 1-based.
    bool get(int j) const { return (index_ >> (label_count_ - j)) & 1u; }

    /// Number of relevant labels.
    int popcount() const;

    std::vector<int> to_bits() const;
    std::string to_string() const;  // e.g. "[0,1,1]"

    friend bool operator==(const Labelset&, const Labelset&) = default;

private:
    std::uint32_t index_;
    int label_count_;
};

/// Per-label relevance probabilities P(y_j = 1 | x), each in [0,1].
using MarginalVector = std::vector<double>;

/// Exact categorical distribution over all 2^L labelsets of one instance.
/// Entries are non-negative and sum to 1; construction renormalizes small
/// drift and rejects anything worse.
class LabelsetDistribution {
public:
    LabelsetDistribution(std::vector<double> probs, int label_count);

    int label_count() const { return label_count_; }
    std::size_t size() const { return probs_.size(); }
    double prob(std::size_t k) const { return probs_[k]; }
    double prob(const Labelset& y) const { return probs_[y.index()]; }
    const std::vector<double>& probs() const { return probs_; }

    std::string to_json() const;
    static LabelsetDistribution from_json(const std::string& text);

private:
    std::vector<double> probs_;
    int label_count_;
};

LabelsetDistribution make_distribution(std::vector<double> probs, int label_count);
LabelsetDistribution uniform(int label_count);
LabelsetDistribution point_mass(const Labelset& y);

MarginalVector marginals(const LabelsetDistribution& d);
Labelset mode(const LabelsetDistribution& d);

/// Independent joint: P(y) = prod_j m_j^{y_j} (1-m_j)^{1-y_j}.
LabelsetDistribution joint_from_marginals(const MarginalVector& m);

}  // namespace mlconf
