#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlconf/association.hpp"
#include "mlconf/calibration.hpp"
#include "mlconf/classifiers.hpp"
#include "mlconf/confidence.hpp"
#include "mlconf/dataset.hpp"
#include "mlconf/logistic.hpp"
#include "mlconf/metrics.hpp"
#include "mlconf/synth.hpp"
#include "mlconf/table_io.hpp"

namespace mlconf {

/// Error families mapped to process exit codes by the CLI:
/// config 2, data 3, numeric 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One dataset entry of a run: either an ARFF file on disk or a synthetic
/// generator spec.
struct DatasetSpec {
    std::string name;
    std::string kind = "arff";  // "arff" | "synth"
    std::string path;
    std::vector<std::string> label_names;
    int meka_c = 0;
    int synth_labels = 3;
    int synth_instances = 500;
    SynthDependence dependence = SynthDependence::Chain;
};

struct RunConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<ClassifierKind> classifiers = {ClassifierKind::Independent,
                                               ClassifierKind::Chain,
                                               ClassifierKind::EnsembleOfChains};
    std::vector<Metric> metrics = {Metric::HammingSimilarity, Metric::ExactMatch,
                                   Metric::JaccardSimilarity};
    std::vector<CandidateKind> candidates{kAllCandidates.begin(), kAllCandidates.end()};
    std::uint64_t seed = 0;
    int replicates = 20;
    int ensemble_members = 10;
    double train_fraction = 0.5;
    int bootstrap_replicates = 1000;
    int cv_folds = 10;
    std::string out_dir = "out";
    TableFormat format = TableFormat::Csv;
    SolverConfig solver;

    void validate() const;  // throws ConfigError
};

/// Flat key-value config text: `[section]` headers, `key = value` lines,
/// `#` comments. Section order is preserved; duplicate keys keep the last
/// value. Dataset sections are named `[dataset <name>]`.
struct ConfigFile {
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> sections;

    const std::map<std::string, std::string>* find(const std::string& name) const;
};

ConfigFile parse_config_file(const std::string& text);
RunConfig run_config_from_file(const ConfigFile& file);
RunConfig load_run_config(const std::string& path);

/// 64-bit FNV-1a content hash, rendered as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

/// Everything cmd_run produced: output file paths (relative to out_dir) and
/// the manifest text that records the effective config, seed, and per-file
/// content hashes.
struct RunResult {
    std::vector<std::string> files;
    std::string manifest_path;
};

/// Full pipeline: load every dataset, split, train each classifier, predict
/// joint distributions on the held-out half, score the seven candidates,
/// build correlation/regression/calibration/top-k tables, and write them with
/// a manifest. Deterministic in (config, seed).
RunResult run_experiment(const RunConfig& cfg);

/// Per-instance evaluation of one trained classifier on one test set.
struct ScoredPredictions {
    std::string dataset;
    ClassifierKind classifier = ClassifierKind::Independent;
    /// scores[c][i]: candidate c of instance i.
    std::map<CandidateKind, std::vector<double>> scores;
    /// per metric: predicted labelset index, expected accuracy, realized accuracy.
    std::map<Metric, std::vector<Labelset>> predictions;
    std::map<Metric, std::vector<double>> expected;
    std::map<Metric, std::vector<double>> realized;
    std::vector<ConfusionCounts> confusions;  // truth vs JS-best prediction
    std::vector<Labelset> truths;
};

ScoredPredictions score_predictions(const std::string& dataset_name, ClassifierKind kind,
                                    const std::vector<LabelsetDistribution>& joints,
                                    const std::vector<Labelset>& truths,
                                    const std::vector<CandidateKind>& candidates,
                                    const std::vector<Metric>& metrics);

std::string dataset_summary_json(const MLDataset& ds);

}  // namespace mlconf
