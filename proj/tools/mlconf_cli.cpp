// Command-line front end: ingestion, full experiment runs, single-instance
// scoring, association analyses, calibration, and manifest verification.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlconf/arff.hpp"
#include "mlconf/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mlconf;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

LabelSpec label_spec_from_flag(const std::string& labels) {
    LabelSpec spec;
    if (labels.empty()) return spec;
    try {
        std::size_t used = 0;
        const int k = std::stoi(labels, &used);
        if (used == labels.size()) {
            spec.meka_c = k;
            return spec;
        }
    } catch (const std::exception&) {
    }
    std::istringstream in(labels);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) spec.label_names.push_back(item);
    }
    return spec;
}

Labelset labelset_from_string(const std::string& text) {
    std::vector<int> bits;
    for (char c : text) {
        if (c == '0') bits.push_back(0);
        if (c == '1') bits.push_back(1);
    }
    if (bits.empty()) throw DataError("cannot parse labelset '" + text + "'");
    return Labelset(bits);
}

struct CliOptions {
    std::string config_path;
    std::string labels;
    std::string out;
    std::string format;
    long seed = -1;
    int replicates = -1;
    std::string classifier;
    std::vector<std::string> metrics;
    std::vector<std::string> candidates;
};

void apply_overrides(RunConfig& cfg, const CliOptions& opt) {
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.replicates >= 0) cfg.replicates = opt.replicates;
    if (!opt.out.empty()) cfg.out_dir = opt.out;
    if (!opt.format.empty()) cfg.format = table_format_from_name(opt.format);
    if (!opt.classifier.empty()) cfg.classifiers = {classifier_from_name(opt.classifier)};
    if (!opt.metrics.empty()) {
        cfg.metrics.clear();
        for (const std::string& m : opt.metrics) cfg.metrics.push_back(metric_from_name(m));
    }
    if (!opt.candidates.empty()) {
        cfg.candidates.clear();
        for (const std::string& c : opt.candidates) {
            cfg.candidates.push_back(candidate_from_name(c));
        }
    }
}

// ---- score-table reconstruction (input for analyze/calibrate) -------------

struct ScoreColumn {
    std::size_t index;
    CandidateKind kind;
};

struct LoadedScores {
    Table table;
    std::vector<ScoreColumn> candidate_columns;
    std::vector<Metric> metrics;
    std::map<std::string, std::size_t> col;
};

double cell_number(const Cell& c) {
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<std::int64_t>(c)) {
        return static_cast<double>(std::get<std::int64_t>(c));
    }
    throw DataError("expected a numeric table cell");
}

const std::string& cell_text(const Cell& c) {
    if (!std::holds_alternative<std::string>(c)) throw DataError("expected a text table cell");
    return std::get<std::string>(c);
}

LoadedScores load_scores(const std::string& path) {
    LoadedScores s;
    s.table = table_from_json(read_file(path));
    for (std::size_t i = 0; i < s.table.columns.size(); ++i) s.col[s.table.columns[i]] = i;
    for (const char* required : {"dataset", "classifier", "truth"}) {
        if (!s.col.count(required)) {
            throw DataError(std::string("scores table lacks a '") + required + "' column");
        }
    }
    for (CandidateKind k : kAllCandidates) {
        const auto it = s.col.find(candidate_name(k));
        if (it != s.col.end()) s.candidate_columns.push_back({it->second, k});
    }
    if (s.candidate_columns.empty()) throw DataError("scores table has no candidate columns");
    for (Metric m :
         {Metric::HammingSimilarity, Metric::ExactMatch, Metric::JaccardSimilarity}) {
        if (s.col.count("realized_" + metric_name(m))) s.metrics.push_back(m);
    }
    if (s.metrics.empty()) throw DataError("scores table has no realized accuracy columns");
    return s;
}

// ---- subcommands ----------------------------------------------------------

int cmd_ingest(const std::string& path, const std::string& labels) {
    const MLDataset ds = load_arff(path, label_spec_from_flag(labels));
    std::cout << dataset_summary_json(ds) << '\n';
    return 0;
}

int cmd_run(const CliOptions& opt) {
    if (opt.config_path.empty()) throw ConfigError("run requires --config");
    RunConfig cfg = load_run_config(opt.config_path);
    apply_overrides(cfg, opt);
    cfg.validate();
    const RunResult result = run_experiment(cfg);
    std::cout << "wrote " << result.manifest_path << '\n';
    for (const std::string& f : result.files) std::cout << "  " << f << '\n';
    return 0;
}

int cmd_score(const std::string& model_path, const std::vector<double>& features) {
    MultiLabelModel model;
    try {
        model = MultiLabelModel::from_json(read_file(model_path));
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
    if (static_cast<Eigen::Index>(features.size()) != model.feature_mean.size()) {
        throw DataError("expected " + std::to_string(model.feature_mean.size()) +
                        " features, got " + std::to_string(features.size()));
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = features[i];
    }
    const LabelsetDistribution joint = predict_joint(model, x);

    json out;
    for (Metric m :
         {Metric::HammingSimilarity, Metric::ExactMatch, Metric::JaccardSimilarity}) {
        const BestPrediction best = best_prediction(joint, m);
        out["prediction"][metric_name(m)] = best.labelset.to_string();
        out["expected_accuracy"][metric_name(m)] = best.expected_accuracy;
    }
    for (CandidateKind c : kAllCandidates) {
        out["confidence"][candidate_name(c)] = score(joint, c);
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_analyze(const std::string& scores_path, AssociationMeasure measure,
                const CliOptions& opt) {
    const LoadedScores s = load_scores(scores_path);

    // one group per (dataset, classifier, metric), rows in file order
    std::vector<InstanceGroup> groups;
    std::map<std::pair<std::string, std::string>, std::map<Metric, std::size_t>> where;
    for (const auto& row : s.table.rows) {
        const std::string& ds = cell_text(row[s.col.at("dataset")]);
        const std::string& cl = cell_text(row[s.col.at("classifier")]);
        for (Metric m : s.metrics) {
            auto& slot = where[{ds, cl}];
            if (!slot.count(m)) {
                InstanceGroup g;
                g.dataset = ds;
                g.classifier = classifier_from_name(cl);
                g.metric = m;
                slot[m] = groups.size();
                groups.push_back(std::move(g));
            }
            InstanceGroup& g = groups[slot[m]];
            for (const ScoreColumn& c : s.candidate_columns) {
                g.scores[c.kind].push_back(cell_number(row[c.index]));
            }
            g.accuracies.push_back(cell_number(row[s.col.at("realized_" + metric_name(m))]));
        }
    }

    CorrelationTableConfig ccfg;
    ccfg.measure = measure;
    if (opt.seed >= 0) ccfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.replicates >= 0) ccfg.bootstrap_replicates = opt.replicates;
    Table t;
    t.columns = {"dataset", "classifier", "metric", "candidate", "correlation", "n", "marker"};
    for (const AnalysisRecord& r : correlation_table(groups, ccfg)) {
        t.add_row({r.dataset, classifier_name(r.classifier), metric_name(r.metric),
                   candidate_name(r.candidate), r.correlation, static_cast<std::int64_t>(r.n),
                   arrow_marker(r.arrow)});
    }
    const TableFormat fmt =
        opt.format.empty() ? TableFormat::Csv : table_format_from_name(opt.format);
    if (opt.out.empty()) {
        std::cout << render_table(t, fmt);
    } else {
        export_table(t, fmt, opt.out);
    }
    return 0;
}

int cmd_calibrate(const std::string& scores_path, const CliOptions& opt) {
    if (opt.out.empty()) throw ConfigError("calibrate requires --out (a directory)");
    const LoadedScores s = load_scores(scores_path);
    std::vector<Metric> metrics = s.metrics;
    if (!opt.metrics.empty()) {
        metrics.clear();
        for (const std::string& m : opt.metrics) metrics.push_back(metric_from_name(m));
    }

    fs::create_directories(opt.out);
    Table intervals, reliability;
    intervals.columns = {"metric", "bin_lo", "bin_hi", "lower",
                         "upper",  "match",  "replicates", "points"};
    reliability.columns = {"metric", "bin_center", "mean_realized", "lower", "upper", "points"};
    for (Metric m : metrics) {
        CalibrationDataset cal;
        cal.metric = m;
        std::vector<double> succ, trials;
        for (const ScoreColumn& c : s.candidate_columns) cal.candidates.push_back(c.kind);
        for (const auto& row : s.table.rows) {
            CalibrationRow r;
            r.dataset = cell_text(row[s.col.at("dataset")]);
            r.classifier = cell_text(row[s.col.at("classifier")]);
            for (const ScoreColumn& c : s.candidate_columns) {
                r.scores.push_back(cell_number(row[c.index]));
            }
            cal.rows.push_back(std::move(r));
            const Labelset truth = labelset_from_string(cell_text(row[s.col.at("truth")]));
            if (m == Metric::JaccardSimilarity) {
                const auto pred_it = s.col.find("pred_js");
                if (pred_it == s.col.end()) throw DataError("scores table lacks 'pred_js'");
                cal.counts.push_back(confusion_counts(
                    truth, labelset_from_string(cell_text(row[pred_it->second]))));
            } else {
                const double realized =
                    cell_number(row[s.col.at("realized_" + metric_name(m))]);
                const double n_trials =
                    m == Metric::ExactMatch ? 1.0 : static_cast<double>(truth.label_count());
                succ.push_back(std::round(realized * n_trials));
                trials.push_back(n_trials);
            }
        }
        if (m != Metric::JaccardSimilarity) {
            cal.successes =
                Eigen::Map<Eigen::VectorXd>(succ.data(), static_cast<Eigen::Index>(succ.size()));
            cal.trials = Eigen::Map<Eigen::VectorXd>(trials.data(),
                                                     static_cast<Eigen::Index>(trials.size()));
        }
        ReplicateConfig rcfg;
        if (opt.replicates >= 0) rcfg.replicates = opt.replicates;
        if (opt.seed >= 0) rcfg.seed = static_cast<std::uint64_t>(opt.seed);
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
    const TableFormat fmt =
        opt.format.empty() ? TableFormat::Csv : table_format_from_name(opt.format);
    const std::string ext = fmt == TableFormat::Csv ? ".csv" : ".json";
    export_table(intervals, fmt, (fs::path(opt.out) / ("calibration_intervals" + ext)).string());
    export_table(reliability, fmt, (fs::path(opt.out) / ("reliability" + ext)).string());
    std::cout << "wrote calibration_intervals" << ext << " and reliability" << ext << " to "
              << opt.out << '\n';
    return 0;
}

int cmd_report(const std::string& manifest_path) {
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(std::string("manifest: ") + e.what());
    }
    const fs::path dir = fs::path(manifest_path).parent_path();
    std::cout << "seed: " << manifest.value("seed", 0) << '\n';
    bool all_ok = true;
    for (const auto& [name, hash] : manifest.at("files").items()) {
        const fs::path p = dir / name;
        std::string state;
        if (!fs::exists(p)) {
            state = "MISSING";
            all_ok = false;
        } else if (fnv1a64_hex(read_file(p.string())) != hash.get<std::string>()) {
            state = "MISMATCH";
            all_ok = false;
        } else {
            state = "ok";
        }
        std::cout << name << "  " << hash.get<std::string>() << "  " << state << '\n';
    }
    if (!all_ok) throw DataError("manifest verification failed");
    std::cout << "all files verified" << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"probabilistic multi-label classification confidence toolkit"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string path;
    std::vector<double> features;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opt.seed, "random seed");
        cmd->add_option("--out", opt.out, "output file or directory");
        cmd->add_option("--format", opt.format, "table format: csv or json");
        cmd->add_option("--replicates", opt.replicates, "replicate / bootstrap count");
        cmd->add_option("--metric", opt.metrics, "metric (hs, em, js); repeatable");
        cmd->add_option("--candidate", opt.candidates, "confidence candidate; repeatable");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "parse an ARFF file and print its stats");
    ingest->add_option("path", path, "ARFF file")->required();
    ingest->add_option("--labels", opt.labels, "label count (MEKA -C) or comma-separated names");

    CLI::App* run = app.add_subcommand("run", "full experiment pipeline from a config file");
    run->add_option("--config", opt.config_path, "run config file")->required();
    run->add_option("--labels", opt.labels, "unused for run; labels come from the config");
    run->add_option("--classifier", opt.classifier, "restrict to one classifier");
    add_common(run);

    CLI::App* score_cmd = app.add_subcommand("score", "score one instance with a saved model");
    score_cmd->add_option("model", path, "model JSON file")->required();
    score_cmd->add_option("--features", features, "feature vector")->required();

    CLI::App* rel = app.add_subcommand("analyze-relative",
                                       "rank correlation of confidence vs accuracy");
    rel->add_option("scores", path, "scores table (JSON) from a run")->required();
    add_common(rel);

    CLI::App* abs_cmd = app.add_subcommand("analyze-absolute",
                                           "linear correlation of confidence vs accuracy");
    abs_cmd->add_option("scores", path, "scores table (JSON) from a run")->required();
    add_common(abs_cmd);

    CLI::App* cal = app.add_subcommand("calibrate", "fit calibrators and emit interval tables");
    cal->add_option("scores", path, "scores table (JSON) from a run")->required();
    add_common(cal);

    CLI::App* report = app.add_subcommand("report", "verify a run manifest's content hashes");
    report->add_option("manifest", path, "manifest.json of a run")->required();

    try {
        app.parse(argc, argv);
        if (ingest->parsed()) return cmd_ingest(path, opt.labels);
        if (run->parsed()) return cmd_run(opt);
        if (score_cmd->parsed()) return cmd_score(path, features);
        if (rel->parsed()) return cmd_analyze(path, AssociationMeasure::Kendall, opt);
        if (abs_cmd->parsed()) return cmd_analyze(path, AssociationMeasure::Pearson, opt);
        if (cal->parsed()) return cmd_calibrate(path, opt);
        if (report->parsed()) return cmd_report(path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
