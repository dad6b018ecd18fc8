#include "mlconf/metrics.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mlconf {

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::HammingSimilarity: return "hs";
        case Metric::ExactMatch: return "em";
        case Metric::JaccardSimilarity: return "js";
    }
    throw std::logic_error("unreachable metric tag");
}

Metric metric_from_name(const std::string& name) {
    if (name == "hs") return Metric::HammingSimilarity;
    if (name == "em") return Metric::ExactMatch;
    if (name == "js") return Metric::JaccardSimilarity;
    throw std::invalid_argument("unknown metric '" + name + "' (expected hs, em, or js)");
}

namespace {

void check_same_length(const Labelset& a, const Labelset& b) {
    if (a.label_count() != b.label_count()) {
        throw std::invalid_argument("labelsets have different label counts");
    }
}

double similarity_indices(Metric metric, std::uint32_t a, std::uint32_t b, int L) {
    switch (metric) {
        case Metric::HammingSimilarity:
            return static_cast<double>(L - std::popcount(a ^ b)) / L;
        case Metric::ExactMatch:
            return a == b ? 1.0 : 0.0;
        case Metric::JaccardSimilarity: {
            const int uni = std::popcount(a | b);
            if (uni == 0) return 1.0;  // both empty: agree with EM/HS
            return static_cast<double>(std::popcount(a & b)) / uni;
        }
    }
    throw std::logic_error("unreachable metric tag");
}

double expected_accuracy_index(const LabelsetDistribution& d, std::uint32_t candidate,
                               Metric metric) {
    const int L = d.label_count();
    double acc = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double p = d.prob(k);
        if (p == 0.0) continue;
        acc += p * similarity_indices(metric, candidate, static_cast<std::uint32_t>(k), L);
    }
    return acc;
}

BestPrediction brute_force_best(const LabelsetDistribution& d, Metric metric) {
    std::uint32_t best = 0;
    double best_value = expected_accuracy_index(d, 0, metric);
    for (std::uint32_t c = 1; c < d.size(); ++c) {
        const double v = expected_accuracy_index(d, c, metric);
        if (v > best_value) {
            best = c;
            best_value = v;
        }
    }
    return {Labelset(best, d.label_count()), best_value};
}

}  // namespace

double similarity(Metric metric, const Labelset& a, const Labelset& b) {
    check_same_length(a, b);
    return similarity_indices(metric, a.index(), b.index(), a.label_count());
}

double expected_accuracy(const LabelsetDistribution& d, const Labelset& candidate,
                         Metric metric) {
    if (candidate.label_count() != d.label_count()) {
        throw std::invalid_argument("candidate label count does not match distribution");
    }
    return expected_accuracy_index(d, candidate.index(), metric);
}

BestPrediction best_prediction(const LabelsetDistribution& d, Metric metric) {
    switch (metric) {
        case Metric::ExactMatch: {
            const Labelset y = mode(d);
            BestPrediction result{y, d.prob(y)};
#ifndef NDEBUG
            assert(std::abs(brute_force_best(d, metric).expected_accuracy -
                            result.expected_accuracy) <= 1e-12);
#endif
            return result;
        }
        case Metric::HammingSimilarity: {
            // Per-label marginal mode at threshold 0.5.
            const MarginalVector m = marginals(d);
            const int L = d.label_count();
            std::uint32_t bits = 0;
            for (int j = 1; j <= L; ++j) {
                bits <<= 1;
                if (m[j - 1] > 0.5) bits |= 1u;
            }
            const Labelset y(bits, L);
            BestPrediction result{y, expected_accuracy_index(d, bits, metric)};
#ifndef NDEBUG
            assert(std::abs(brute_force_best(d, metric).expected_accuracy -
                            result.expected_accuracy) <= 1e-12);
#endif
            return result;
        }
        case Metric::JaccardSimilarity:
            return brute_force_best(d, metric);
    }
    throw std::logic_error("unreachable metric tag");
}

double dataset_accuracy(Metric metric, const std::vector<Labelset>& truths,
                        const std::vector<Labelset>& preds) {
    if (truths.empty()) throw std::invalid_argument("dataset_accuracy over empty lists");
    if (truths.size() != preds.size()) {
        throw std::invalid_argument("truth/prediction list length mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        total += similarity(metric, truths[i], preds[i]);
    }
    return total / static_cast<double>(truths.size());
}

}  // namespace mlconf
