#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlconf/dataset.hpp"
#include "mlconf/labelset.hpp"

namespace mlconf {

enum class SynthDependence { Independent, Chain };

SynthDependence synth_dependence_from_name(const std::string& name);

/// A generated dataset plus the true per-instance joint each labelset was
/// sampled from, for calibration oracles.
struct SyntheticData {
    MLDataset dataset;
    std::vector<LabelsetDistribution> true_joints;
};

/// Draw features from a seeded Gaussian and labels from a known parametric
/// joint conditioned on the features. Under Independent dependence the true
/// joint is the product of the per-label sigmoids; under Chain each label's
/// conditional also sees the preceding labels.
SyntheticData synth_generate(int label_count, int instance_count,
                             SynthDependence dependence, std::uint64_t seed);

/// Dense ARFF text for a dataset (labels first, "-C L" in the relation name).
std::string dataset_to_arff(const MLDataset& ds);

/// Sidecar JSON for the true joints of a synthetic dataset.
std::string joints_to_json(const std::vector<LabelsetDistribution>& joints);

}  // namespace mlconf
