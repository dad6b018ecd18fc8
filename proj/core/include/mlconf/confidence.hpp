#pragma once

#include <array>
#include <map>
#include <string>

#include "mlconf/labelset.hpp"

namespace mlconf {

/// The seven candidate confidence (expected-accuracy) statistics of a
/// labelset distribution. Every normalized score is 0 on the uniform
/// distribution and 1 on any point mass.
enum class CandidateKind { HP, TG, SE, CE, ME, GI, CS };

inline constexpr std::array<CandidateKind, 7> kAllCandidates = {
    CandidateKind::HP, CandidateKind::TG, CandidateKind::SE, CandidateKind::CE,
    CandidateKind::ME, CandidateKind::GI, CandidateKind::CS};

std::string candidate_name(CandidateKind k);  // "HP", "TG", ...
CandidateKind candidate_from_name(const std::string& name);

double c_hp(const LabelsetDistribution& d);  // (2^L max P - 1) / (2^L - 1)
double c_tg(const LabelsetDistribution& d);  // max P - second max P
double c_se(const LabelsetDistribution& d);  // 1 + sum P log_{2^L} P
double c_ce(const LabelsetDistribution& d);  // 1 + log_{2^L} sum P^2
double c_me(const LabelsetDistribution& d);  // 1 + log_{2^L} max P
double c_gi(const LabelsetDistribution& d);  // 1 - sum P(1-P) / (1 - 2^-L)
double c_cs(const LabelsetDistribution& d);  // sum (P - 2^-L)^2 / (1 - 2^-L)

double score(const LabelsetDistribution& d, CandidateKind kind);
std::map<CandidateKind, double> score_all(const LabelsetDistribution& d);

/// Pre-normalization statistic (H_HP, H_SE, ...). Entropies use natural log;
/// H_TG is the same gap as the normalized score.
double raw_statistic(const LabelsetDistribution& d, CandidateKind kind);

}  // namespace mlconf
