#include "mlconf/confidence.hpp"

#include <cmath>
#include <stdexcept>

namespace mlconf {

std::string candidate_name(CandidateKind k) {
    switch (k) {
        case CandidateKind::HP: return "HP";
        case CandidateKind::TG: return "TG";
        case CandidateKind::SE: return "SE";
        case CandidateKind::CE: return "CE";
        case CandidateKind::ME: return "ME";
        case CandidateKind::GI: return "GI";
        case CandidateKind::CS: return "CS";
    }
    throw std::logic_error("unreachable candidate tag");
}

CandidateKind candidate_from_name(const std::string& name) {
    for (CandidateKind k : kAllCandidates) {
        if (candidate_name(k) == name) return k;
    }
    throw std::invalid_argument("unknown candidate kind '" + name + "'");
}

namespace {

double max_prob(const LabelsetDistribution& d) {
    double m = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) m = std::max(m, d.prob(k));
    return m;
}

double sum_squares(const LabelsetDistribution& d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) s += d.prob(k) * d.prob(k);
    return s;
}

/// Shannon entropy with natural log; zero entries contribute 0.
double entropy_nat(const LabelsetDistribution& d) {
    double h = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double p = d.prob(k);
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double clamp_score(double v) {
    if (v < 0.0) {
        if (v < -1e-12) throw std::domain_error("confidence score below 0: " + std::to_string(v));
        return 0.0;
    }
    if (v > 1.0) {
        if (v > 1.0 + 1e-12) throw std::domain_error("confidence score above 1: " + std::to_string(v));
        return 1.0;
    }
    return v;
}

}  // namespace

double c_hp(const LabelsetDistribution& d) {
    const double n = static_cast<double>(d.size());
    return clamp_score((n * max_prob(d) - 1.0) / (n - 1.0));
}

double c_tg(const LabelsetDistribution& d) {
    // Second max over the multiset: a duplicated max gives gap 0.
    double top = -1.0, second = -1.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double p = d.prob(k);
        if (p > top) {
            second = top;
            top = p;
        } else if (p > second) {
            second = p;
        }
    }
    return clamp_score(top - second);
}

double c_se(const LabelsetDistribution& d) {
    const double log_n = static_cast<double>(d.label_count()) * std::log(2.0);
    return clamp_score(1.0 - entropy_nat(d) / log_n);
}

double c_ce(const LabelsetDistribution& d) {
    const double log_n = static_cast<double>(d.label_count()) * std::log(2.0);
    return clamp_score(1.0 + std::log(sum_squares(d)) / log_n);
}

double c_me(const LabelsetDistribution& d) {
    const double log_n = static_cast<double>(d.label_count()) * std::log(2.0);
    return clamp_score(1.0 + std::log(max_prob(d)) / log_n);
}

double c_gi(const LabelsetDistribution& d) {
    const double inv_n = 1.0 / static_cast<double>(d.size());
    // 1 - sum P(1-P)/(1-2^-L) == (sum P^2 - 2^-L)/(1 - 2^-L)
    return clamp_score((sum_squares(d) - inv_n) / (1.0 - inv_n));
}

double c_cs(const LabelsetDistribution& d) {
    const double inv_n = 1.0 / static_cast<double>(d.size());
    double s = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double dev = d.prob(k) - inv_n;
        s += dev * dev;
    }
    return clamp_score(s / (1.0 - inv_n));
}

double score(const LabelsetDistribution& d, CandidateKind kind) {
    switch (kind) {
        case CandidateKind::HP: return c_hp(d);
        case CandidateKind::TG: return c_tg(d);
        case CandidateKind::SE: return c_se(d);
        case CandidateKind::CE: return c_ce(d);
        case CandidateKind::ME: return c_me(d);
        case CandidateKind::GI: return c_gi(d);
        case CandidateKind::CS: return c_cs(d);
    }
    throw std::logic_error("unreachable candidate tag");
}

std::map<CandidateKind, double> score_all(const LabelsetDistribution& d) {
    std::map<CandidateKind, double> out;
    for (CandidateKind k : kAllCandidates) out[k] = score(d, k);
    return out;
}

double raw_statistic(const LabelsetDistribution& d, CandidateKind kind) {
    const double inv_n = 1.0 / static_cast<double>(d.size());
    switch (kind) {
        case CandidateKind::HP: return max_prob(d);
        case CandidateKind::TG: return c_tg(d);
        case CandidateKind::SE: return entropy_nat(d);
        case CandidateKind::CE: return -std::log(sum_squares(d));
        case CandidateKind::ME: return -std::log(max_prob(d));
        case CandidateKind::GI: {
            double s = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) s += d.prob(k) * (1.0 - d.prob(k));
            return s;
        }
        case CandidateKind::CS: {
            double s = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                const double dev = d.prob(k) - inv_n;
                s += dev * dev;
            }
            return s / inv_n;
        }
    }
    throw std::logic_error("unreachable candidate tag");
}

}  // namespace mlconf
