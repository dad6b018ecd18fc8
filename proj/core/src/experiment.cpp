#include "mlconf/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mlconf/arff.hpp"

namespace mlconf {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
    return out.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::string* lookup(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
}

long to_long(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

}  // namespace

const std::map<std::string, std::string>* ConfigFile::find(const std::string& name) const {
    for (const auto& [section, kv] : sections) {
        if (section == name) return &kv;
    }
    return nullptr;
}

ConfigFile parse_config_file(const std::string& text) {
    ConfigFile file;
    std::map<std::string, std::string>* current = nullptr;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) {
                throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
            }
            file.sections.emplace_back(name, std::map<std::string, std::string>{});
            current = &file.sections.back().second;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        if (!current) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside any section");
        }
        (*current)[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return file;
}

void RunConfig::validate() const {
    if (datasets.empty()) throw ConfigError("no datasets configured");
    if (classifiers.empty()) throw ConfigError("no classifiers configured");
    if (metrics.empty()) throw ConfigError("no metrics configured");
    if (candidates.empty()) throw ConfigError("no candidates configured");
    if (std::find(candidates.begin(), candidates.end(), CandidateKind::HP) == candidates.end()) {
        throw ConfigError("candidate list must include HP (the correlation baseline)");
    }
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    if (ensemble_members < 1) throw ConfigError("ensemble_members must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0, 1)");
    }
    if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
    if (bootstrap_replicates < 1) throw ConfigError("bootstrap_replicates must be >= 1");
    if (out_dir.empty()) throw ConfigError("output directory not set");
    std::vector<std::string> names;
    for (const DatasetSpec& d : datasets) {
        if (d.name.empty()) throw ConfigError("dataset with empty name");
        if (std::find(names.begin(), names.end(), d.name) != names.end()) {
            throw ConfigError("duplicate dataset name '" + d.name + "'");
        }
        names.push_back(d.name);
        if (d.kind == "arff") {
            if (d.path.empty()) throw ConfigError("dataset '" + d.name + "': no path");
            if (!fs::exists(d.path)) {
                throw ConfigError("dataset '" + d.name + "': path '" + d.path + "' does not exist");
            }
        } else if (d.kind == "synth") {
            if (d.synth_labels < 1 || d.synth_labels > kMaxLabels) {
                throw ConfigError("dataset '" + d.name + "': label count outside 1.." +
                                  std::to_string(kMaxLabels));
            }
            if (d.synth_instances < 4) {
                throw ConfigError("dataset '" + d.name + "': too few instances");
            }
        } else {
            throw ConfigError("dataset '" + d.name + "': unknown kind '" + d.kind + "'");
        }
    }
}

RunConfig run_config_from_file(const ConfigFile& file) {
    RunConfig cfg;
    try {
        if (const auto* run = file.find("run")) {
            if (const auto* v = lookup(*run, "seed")) {
                cfg.seed = static_cast<std::uint64_t>(to_long(*v, "seed"));
            }
            if (const auto* v = lookup(*run, "replicates")) {
                cfg.replicates = static_cast<int>(to_long(*v, "replicates"));
            }
            if (const auto* v = lookup(*run, "ensemble_members")) {
                cfg.ensemble_members = static_cast<int>(to_long(*v, "ensemble_members"));
            }
            if (const auto* v = lookup(*run, "train_fraction")) {
                cfg.train_fraction = to_double(*v, "train_fraction");
            }
            if (const auto* v = lookup(*run, "bootstrap_replicates")) {
                cfg.bootstrap_replicates = static_cast<int>(to_long(*v, "bootstrap_replicates"));
            }
            if (const auto* v = lookup(*run, "cv_folds")) {
                cfg.cv_folds = static_cast<int>(to_long(*v, "cv_folds"));
            }
            if (const auto* v = lookup(*run, "out")) cfg.out_dir = *v;
            if (const auto* v = lookup(*run, "format")) {
                cfg.format = table_format_from_name(*v);
            }
            if (const auto* v = lookup(*run, "ridge_lambda")) {
                cfg.solver.ridge_lambda = to_double(*v, "ridge_lambda");
            }
            if (const auto* v = lookup(*run, "classifiers")) {
                cfg.classifiers.clear();
                for (const std::string& name : split_list(*v)) {
                    cfg.classifiers.push_back(classifier_from_name(name));
                }
            }
            if (const auto* v = lookup(*run, "metrics")) {
                cfg.metrics.clear();
                for (const std::string& name : split_list(*v)) {
                    cfg.metrics.push_back(metric_from_name(name));
                }
            }
            if (const auto* v = lookup(*run, "candidates")) {
                cfg.candidates.clear();
                for (const std::string& name : split_list(*v)) {
                    cfg.candidates.push_back(candidate_from_name(name));
                }
            }
        }
        for (const auto& [section, kv] : file.sections) {
            if (section.rfind("dataset ", 0) != 0) continue;
            DatasetSpec spec;
            spec.name = trim(section.substr(8));
            if (const auto* v = lookup(kv, "type")) spec.kind = *v;
            if (const auto* v = lookup(kv, "path")) spec.path = *v;
            if (const auto* v = lookup(kv, "labels")) {
                // a number is a count (synth / MEKA -C); otherwise label names
                try {
                    spec.meka_c = static_cast<int>(to_long(*v, "labels"));
                    spec.synth_labels = spec.meka_c;
                } catch (const ConfigError&) {
                    spec.label_names = split_list(*v);
                }
            }
            if (const auto* v = lookup(kv, "instances")) {
                spec.synth_instances = static_cast<int>(to_long(*v, "instances"));
            }
            if (const auto* v = lookup(kv, "dependence")) {
                spec.dependence = synth_dependence_from_name(*v);
            }
            cfg.datasets.push_back(std::move(spec));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_config_from_file(parse_config_file(buf.str()));
}

std::string dataset_summary_json(const MLDataset& ds) {
    return dataset_stats(ds).to_json();
}

ScoredPredictions score_predictions(const std::string& dataset_name, ClassifierKind kind,
                                    const std::vector<LabelsetDistribution>& joints,
                                    const std::vector<Labelset>& truths,
                                    const std::vector<CandidateKind>& candidates,
                                    const std::vector<Metric>& metrics) {
    if (joints.size() != truths.size()) {
        throw std::invalid_argument("score_predictions: joints/truths length mismatch");
    }
    ScoredPredictions out;
    out.dataset = dataset_name;
    out.classifier = kind;
    out.truths = truths;
    for (CandidateKind c : candidates) out.scores[c].reserve(joints.size());
    for (std::size_t i = 0; i < joints.size(); ++i) {
        for (CandidateKind c : candidates) out.scores[c].push_back(score(joints[i], c));
        for (Metric m : metrics) {
            const BestPrediction best = best_prediction(joints[i], m);
            out.predictions[m].push_back(best.labelset);
            out.expected[m].push_back(best.expected_accuracy);
            out.realized[m].push_back(similarity(m, truths[i], best.labelset));
            if (m == Metric::JaccardSimilarity) {
                out.confusions.push_back(confusion_counts(truths[i], best.labelset));
            }
        }
    }
    return out;
}

namespace {

json config_to_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["replicates"] = cfg.replicates;
    j["ensemble_members"] = cfg.ensemble_members;
    j["train_fraction"] = cfg.train_fraction;
    j["bootstrap_replicates"] = cfg.bootstrap_replicates;
    j["cv_folds"] = cfg.cv_folds;
    j["out"] = cfg.out_dir;
    j["format"] = cfg.format == TableFormat::Csv ? "csv" : "json";
    j["ridge_lambda"] = cfg.solver.ridge_lambda;
    j["classifiers"] = json::array();
    for (ClassifierKind k : cfg.classifiers) j["classifiers"].push_back(classifier_name(k));
    j["metrics"] = json::array();
    for (Metric m : cfg.metrics) j["metrics"].push_back(metric_name(m));
    j["candidates"] = json::array();
    for (CandidateKind c : cfg.candidates) j["candidates"].push_back(candidate_name(c));
    j["datasets"] = json::array();
    for (const DatasetSpec& d : cfg.datasets) {
        json ds;
        ds["name"] = d.name;
        ds["type"] = d.kind;
        if (d.kind == "arff") {
            ds["path"] = d.path;
            if (!d.label_names.empty()) ds["labels"] = d.label_names;
            if (d.meka_c != 0) ds["meka_c"] = d.meka_c;
        } else {
            ds["labels"] = d.synth_labels;
            ds["instances"] = d.synth_instances;
            ds["dependence"] =
                d.dependence == SynthDependence::Chain ? "chain" : "independent";
        }
        j["datasets"].push_back(ds);
    }
    return j;
}

MLDataset load_spec(const DatasetSpec& spec, std::uint64_t seed) {
    if (spec.kind == "synth") {
        SyntheticData synth = synth_generate(spec.synth_labels, spec.synth_instances,
                                             spec.dependence, seed ^ fnv1a64("synth:" + spec.name));
        synth.dataset.name = spec.name;
        return std::move(synth.dataset);
    }
    LabelSpec labels;
    labels.label_names = spec.label_names;
    labels.meka_c = spec.meka_c;
    MLDataset ds = load_arff(spec.path, labels);
    ds.name = spec.name;
    return ds;
}

Table regression_table(const RegressionResult& r) {
    Table t;
    t.columns = {"term", "estimate", "std_error", "t_stat", "p_value", "stars"};
    for (Eigen::Index i = 0; i < r.estimates.size(); ++i) {
        t.add_row({r.names[static_cast<std::size_t>(i)], r.estimates[i], r.std_errors[i],
                   r.t_stats[i], r.p_values[i], r.stars[static_cast<std::size_t>(i)]});
    }
    t.add_row({std::string("(R2)"), r.r_squared, 0.0, 0.0, 0.0, std::string("")});
    t.add_row({std::string("(RMSE)"), r.rmse, 0.0, 0.0, 0.0, std::string("")});
    t.add_row({std::string("(N)"), static_cast<double>(r.n_obs), 0.0, 0.0, 0.0,
               std::string("")});
    return t;
}

template <typename ErrorKind, typename F>
auto stage(const std::string& name, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(name + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(name + ": " + e.what());
    } catch (const std::exception& e) {
        throw ErrorKind(name + ": " + e.what());
    }
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg) {
    cfg.validate();
    stage<DataError>("prepare output directory", [&] { fs::create_directories(cfg.out_dir); });

    struct LoadedDataset {
        MLDataset train, test;
        DatasetStats stats;
    };
    std::vector<LoadedDataset> data;
    stage<DataError>("load datasets", [&] {
        for (const DatasetSpec& spec : cfg.datasets) {
            MLDataset full = load_spec(spec, cfg.seed);
            full.validate();
            LoadedDataset entry;
            entry.stats = dataset_stats(full);
            std::tie(entry.train, entry.test) =
                split(full, cfg.train_fraction, cfg.seed ^ fnv1a64("split:" + spec.name));
            data.push_back(std::move(entry));
        }
    });

    std::vector<ScoredPredictions> scored;
    stage<NumericError>("train and score", [&] {
        for (const LoadedDataset& entry : data) {
            for (ClassifierKind kind : cfg.classifiers) {
                const std::uint64_t train_seed =
                    cfg.seed ^ fnv1a64("train:" + entry.stats.name + ":" + classifier_name(kind));
                const MultiLabelModel model = train_classifier(
                    kind, entry.train, cfg.ensemble_members, train_seed, cfg.solver);
                std::vector<LabelsetDistribution> joints;
                joints.reserve(static_cast<std::size_t>(entry.test.instance_count()));
                for (Eigen::Index i = 0; i < entry.test.instance_count(); ++i) {
                    joints.push_back(predict_joint(model, entry.test.features.row(i)));
                }
                scored.push_back(score_predictions(entry.stats.name, kind, joints,
                                                   entry.test.labelsets, cfg.candidates,
                                                   cfg.metrics));
            }
        }
    });

    const std::string ext = cfg.format == TableFormat::Csv ? ".csv" : ".json";
    std::vector<std::pair<std::string, Table>> outputs;

    stage<NumericError>("per-instance score table", [&] {
        Table t;
        t.columns = {"dataset", "classifier", "instance", "truth"};
        for (CandidateKind c : cfg.candidates) t.columns.push_back(candidate_name(c));
        for (Metric m : cfg.metrics) {
            t.columns.push_back("pred_" + metric_name(m));
            t.columns.push_back("expected_" + metric_name(m));
            t.columns.push_back("realized_" + metric_name(m));
        }
        for (const ScoredPredictions& sp : scored) {
            const std::size_t n = sp.truths.size();
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<Cell> row{sp.dataset, classifier_name(sp.classifier),
                                      static_cast<std::int64_t>(i), sp.truths[i].to_string()};
                for (CandidateKind c : cfg.candidates) row.push_back(sp.scores.at(c)[i]);
                for (Metric m : cfg.metrics) {
                    row.push_back(sp.predictions.at(m)[i].to_string());
                    row.push_back(sp.expected.at(m)[i]);
                    row.push_back(sp.realized.at(m)[i]);
                }
                t.add_row(std::move(row));
            }
        }
        outputs.emplace_back("scores" + ext, std::move(t));
    });

    std::vector<AnalysisRecord> kendall_records, pearson_records;
    stage<NumericError>("correlation tables", [&] {
        std::vector<InstanceGroup> groups;
        for (const ScoredPredictions& sp : scored) {
            for (Metric m : cfg.metrics) {
                InstanceGroup g;
                g.dataset = sp.dataset;
                g.classifier = sp.classifier;
                g.metric = m;
                g.scores = sp.scores;
                g.accuracies = sp.realized.at(m);
                groups.push_back(std::move(g));
            }
        }
        CorrelationTableConfig ccfg;
        ccfg.bootstrap_replicates = cfg.bootstrap_replicates;
        ccfg.seed = cfg.seed ^ fnv1a64("bootstrap");
        ccfg.measure = AssociationMeasure::Kendall;
        kendall_records = correlation_table(groups, ccfg);
        ccfg.measure = AssociationMeasure::Pearson;
        pearson_records = correlation_table(groups, ccfg);

        for (const auto& [tag, records] :
             {std::pair{std::string("kendall"), &kendall_records},
              std::pair{std::string("pearson"), &pearson_records}}) {
            Table t;
            t.columns = {"dataset", "classifier", "metric", "candidate",
                         "correlation", "n", "marker"};
            for (const AnalysisRecord& r : *records) {
                t.add_row({r.dataset, classifier_name(r.classifier), metric_name(r.metric),
                           candidate_name(r.candidate), r.correlation,
                           static_cast<std::int64_t>(r.n), arrow_marker(r.arrow)});
            }
            outputs.emplace_back("correlation_" + tag + ext, std::move(t));
        }
    });

    stage<NumericError>("fixed-effects regressions", [&] {
        FixedEffectsBaselines baselines;
        baselines.dataset = cfg.datasets.front().name;
        outputs.emplace_back("fixed_effects_kendall" + ext,
                             regression_table(ols_fixed_effects(kendall_records, baselines)));
        outputs.emplace_back("fixed_effects_pearson" + ext,
                             regression_table(ols_fixed_effects(pearson_records, baselines)));
    });

    // Robustness needs the dataset gradients to vary; a single dataset makes
    // the design rank-deficient, so the table is only produced with >= 2.
    if (cfg.datasets.size() >= 2) {
        stage<NumericError>("robustness regressions", [&] {
            std::map<std::string, DatasetStats> features;
            for (const LoadedDataset& entry : data) features[entry.stats.name] = entry.stats;
            Table t;
            t.columns = {"candidate", "term", "estimate", "std_error",
                         "t_stat", "p_value", "stars"};
            for (const auto& [kind, result] :
                 robustness_regression(kendall_records, features)) {
                for (Eigen::Index i = 0; i < result.estimates.size(); ++i) {
                    t.add_row({candidate_name(kind), result.names[static_cast<std::size_t>(i)],
                               result.estimates[i], result.std_errors[i], result.t_stats[i],
                               result.p_values[i], result.stars[static_cast<std::size_t>(i)]});
                }
            }
            outputs.emplace_back("robustness" + ext, std::move(t));
        });
    }

    stage<NumericError>("calibration", [&] {
        Table intervals, reliability;
        intervals.columns = {"metric", "bin_lo", "bin_hi", "lower",
                             "upper", "match", "replicates", "points"};
        reliability.columns = {"metric", "bin_center", "mean_realized",
                               "lower", "upper", "points"};
        for (Metric m : cfg.metrics) {
            CalibrationDataset cal;
            cal.metric = m;
            cal.candidates = cfg.candidates;
            std::vector<double> succ, trials;
            for (const ScoredPredictions& sp : scored) {
                const int L = sp.truths.empty() ? 1 : sp.truths.front().label_count();
                for (std::size_t i = 0; i < sp.truths.size(); ++i) {
                    CalibrationRow row;
                    row.dataset = sp.dataset;
                    row.classifier = classifier_name(sp.classifier);
                    for (CandidateKind c : cfg.candidates) {
                        row.scores.push_back(sp.scores.at(c)[i]);
                    }
                    cal.rows.push_back(std::move(row));
                    if (m == Metric::JaccardSimilarity) {
                        cal.counts.push_back(sp.confusions[i]);
                    } else if (m == Metric::ExactMatch) {
                        succ.push_back(sp.realized.at(m)[i]);
                        trials.push_back(1.0);
                    } else {
                        succ.push_back(std::round(sp.realized.at(m)[i] * L));
                        trials.push_back(static_cast<double>(L));
                    }
                }
            }
            if (m != Metric::JaccardSimilarity) {
                cal.successes = Eigen::Map<Eigen::VectorXd>(succ.data(),
                                                            static_cast<Eigen::Index>(succ.size()));
                cal.trials = Eigen::Map<Eigen::VectorXd>(trials.data(),
                                                         static_cast<Eigen::Index>(trials.size()));
            }
            ReplicateConfig rcfg;
            rcfg.replicates = cfg.replicates;
            rcfg.cv_folds = cfg.cv_folds;
            rcfg.seed = cfg.seed ^ fnv1a64("calibration:" + metric_name(m));
            rcfg.solver = cfg.solver;
            const auto pairs = replicate_experiment(cal, rcfg);
            const double width = m == Metric::HammingSimilarity ? 0.05 : 0.1;
            for (const IntervalRow& r : interval_table(pairs, width)) {
                intervals.add_row({metric_name(m), r.bin_lo, r.bin_hi, r.lower, r.upper,
                                   static_cast<std::int64_t>(r.match ? 1 : 0),
                                   static_cast<std::int64_t>(r.populated_replicates),
                                   static_cast<std::int64_t>(r.point_count)});
            }
            for (const ReliabilityPoint& p : reliability_curve(pairs, width)) {
                reliability.add_row({metric_name(m), p.bin_center, p.mean_realized, p.lower,
                                     p.upper, static_cast<std::int64_t>(p.point_count)});
            }
        }
        outputs.emplace_back("calibration_intervals" + ext, std::move(intervals));
        outputs.emplace_back("reliability" + ext, std::move(reliability));
    });

    stage<NumericError>("top-k curves", [&] {
        Table t;
        t.columns = {"dataset", "classifier", "metric", "candidate", "k", "mean_accuracy"};
        for (const ScoredPredictions& sp : scored) {
            for (Metric m : cfg.metrics) {
                for (CandidateKind c : cfg.candidates) {
                    for (const auto& [k, acc] :
                         topk_accuracy_curve(sp.scores.at(c), sp.realized.at(m))) {
                        t.add_row({sp.dataset, classifier_name(sp.classifier), metric_name(m),
                                   candidate_name(c), static_cast<std::int64_t>(k), acc});
                    }
                }
            }
        }
        outputs.emplace_back("topk" + ext, std::move(t));
    });

    RunResult result;
    json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["seed"] = cfg.seed;
    manifest["files"] = json::object();
    stage<DataError>("write outputs", [&] {
        for (const auto& [name, table] : outputs) {
            const std::string rendered = render_table(table, cfg.format);
            std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
            if (!out) throw DataError("cannot write '" + name + "'");
            out << rendered;
            manifest["files"][name] = fnv1a64_hex(rendered);
            result.files.push_back(name);
        }
        result.manifest_path = (fs::path(cfg.out_dir) / "manifest.json").string();
        std::ofstream out(result.manifest_path, std::ios::binary);
        if (!out) throw DataError("cannot write manifest");
        out << manifest.dump(2) << '\n';
    });
    return result;
}

}  // namespace mlconf
