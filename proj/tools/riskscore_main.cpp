// Command-line shell around the risk scoring library: training, prediction,
// evaluation, cross-validation, calibration repair, synthetic prediction
// generation, envelope tables, decision curves, MILP export, and scorecard
// rendering. Exit codes: 0 ok, 1 data error, 2 configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskscore/bounds.hpp"
#include "riskscore/calibration.hpp"
#include "riskscore/csv.hpp"
#include "riskscore/cv.hpp"
#include "riskscore/metrics.hpp"
#include "riskscore/milp.hpp"
#include "riskscore/model_json.hpp"
#include "riskscore/reports.hpp"
#include "riskscore/solver.hpp"
#include "riskscore/synthetic.hpp"
#include "riskscore/types.hpp"

namespace {

using namespace riskscore;

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }
    return values;
}

ThresholdGrid make_grid(const std::string& thresholds, const std::string& weights) {
    std::vector<double> inner = parse_double_list(thresholds);
    if (weights.empty() || weights == "default") {
        return ThresholdGrid(std::move(inner));
    }
    return ThresholdGrid(std::move(inner), parse_double_list(weights));
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    return out;
}

BinarizationSpec load_spec_or_default(const std::string& path) {
    if (path.empty()) return BinarizationSpec{};
    return load_binarization_spec(path);
}

// Shared data/solver flags for train-like subcommands.
struct TrainOptions {
    std::string data_path;
    std::string label_col;
    std::string thresholds = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::string weights = "default";
    std::string binarize_path;
    double c0 = 1e-3;
    long long lambda_min = -10;
    long long lambda_max = 10;
    std::string bounds_file;
    long long t_max = 100;
    double sa_t0 = 1e-3;
    double sa_cooling = 1e-6;
    double sa_tmin = 0.0;
    int sa_iters = 10;
    std::uint64_t seed = 0;
    int restarts = 1;
    std::string solver = "sa";
};

void add_data_flags(CLI::App* cmd, TrainOptions& opt) {
    cmd->add_option("--data", opt.data_path, "input CSV with a header row")->required();
    cmd->add_option("--label-col", opt.label_col, "name of the 0/1 label column")->required();
    cmd->add_option("--thresholds", opt.thresholds, "comma-separated decision thresholds");
    cmd->add_option("--weights", opt.weights, "comma list of weights, or 'default'");
    cmd->add_option("--binarize", opt.binarize_path, "JSON binarization rules");
}

void add_solver_flags(CLI::App* cmd, TrainOptions& opt) {
    cmd->add_option("--c0", opt.c0, "sparsity penalty");
    cmd->add_option("--lambda-min", opt.lambda_min, "global coefficient lower bound");
    cmd->add_option("--lambda-max", opt.lambda_max, "global coefficient upper bound");
    cmd->add_option("--lambda-bounds-file", opt.bounds_file,
                    "CSV feature,lo,hi overriding the global bounds per feature");
    cmd->add_option("--t-max", opt.t_max, "intercept magnitude cap (MILP export)");
    cmd->add_option("--sa-initial-temp", opt.sa_t0, "annealing initial temperature");
    cmd->add_option("--sa-cooling-rate", opt.sa_cooling, "annealing cooling rate");
    cmd->add_option("--sa-min-temp", opt.sa_tmin, "annealing minimum temperature");
    cmd->add_option("--sa-iters", opt.sa_iters, "iterations per temperature");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--restarts", opt.restarts, "independent annealing chains");
    cmd->add_option("--solver", opt.solver, "sa | exact")
        ->check(CLI::IsMember({"sa", "exact"}));
}

SolverConfig make_config(const TrainOptions& opt, const BinaryDataset& data) {
    SolverConfig config;
    config.c0 = opt.c0;
    config.lambda_bounds.assign(data.n_cols(), {opt.lambda_min, opt.lambda_max});
    if (!opt.bounds_file.empty()) {
        const CsvTable table = read_csv(opt.bounds_file);
        const std::size_t f = table.column_index("feature");
        const std::size_t lo = table.column_index("lo");
        const std::size_t hi = table.column_index("hi");
        for (const auto& row : table.rows) {
            bool found = false;
            for (std::size_t k = 0; k < data.feature_names().size(); ++k) {
                if (data.feature_names()[k] == row[f]) {
                    config.lambda_bounds[k] = {std::stoll(row[lo]), std::stoll(row[hi])};
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw ConfigError("bounds file names unknown feature '" + row[f] + "'");
            }
        }
    }
    config.t_max = opt.t_max;
    config.sa_initial_temp = opt.sa_t0;
    config.sa_cooling_rate = opt.sa_cooling;
    config.sa_min_temp = opt.sa_tmin;
    config.sa_iters_per_temp = opt.sa_iters;
    config.seed = opt.seed;
    config.restarts = opt.restarts;
    return config;
}

int run(int argc, char** argv) {
    CLI::App app{"sparse integer risk scoring: train, evaluate, and audit"};
    app.require_subcommand(1);

    // ---- train ----
    TrainOptions train_opt;
    std::string train_out;
    auto* train_ml = app.add_subcommand("train", "fit an integer scoring model");
    add_data_flags(train_ml, train_opt);
    add_solver_flags(train_ml, train_opt);
    train_ml->add_option("--out", train_out, "output model JSON")->required();

    // ---- predict ----
    std::string predict_model, predict_data, predict_out, predict_binarize, predict_label;
    auto* predict_cmd = app.add_subcommand("predict", "score rows with a trained model");
    predict_cmd->add_option("--model", predict_model, "model JSON")->required();
    predict_cmd->add_option("--data", predict_data, "input CSV")->required();
    predict_cmd->add_option("--label-col", predict_label,
                            "label column to carry through (optional)");
    predict_cmd->add_option("--binarize", predict_binarize, "JSON binarization rules");
    predict_cmd->add_option("--out", predict_out, "output CSV (score,risk)")->required();

    // ---- eval ----
    std::string eval_data, eval_label, eval_pred, eval_thresholds =
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::string eval_weights = "default", eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "metrics for an external prediction column");
    eval_cmd->add_option("--data", eval_data, "CSV with predictions and labels")->required();
    eval_cmd->add_option("--label-col", eval_label, "label column")->required();
    eval_cmd->add_option("--pred-col", eval_pred, "prediction column in [0,1]")->required();
    eval_cmd->add_option("--thresholds", eval_thresholds, "comma-separated thresholds");
    eval_cmd->add_option("--weights", eval_weights, "comma list of weights, or 'default'");
    eval_cmd->add_option("--out", eval_out, "report JSON (stdout when omitted)");

    // ---- cv ----
    TrainOptions cv_opt;
    int cv_folds = 10, cv_repeats = 1;
    bool cv_no_stratify = false;
    std::string cv_out, cv_pooled_out;
    auto* cv_cmd = app.add_subcommand("cv", "cross-validated training and evaluation");
    add_data_flags(cv_cmd, cv_opt);
    add_solver_flags(cv_cmd, cv_opt);
    cv_cmd->add_option("--folds", cv_folds, "fold count");
    cv_cmd->add_option("--repeats", cv_repeats, "repeat count");
    cv_cmd->add_flag("--no-stratify", cv_no_stratify, "plain shuffled folds");
    cv_cmd->add_option("--out", cv_out, "report JSON")->required();
    cv_cmd->add_option("--pooled-out", cv_pooled_out, "out-of-fold predictions CSV");

    // ---- calibrate ----
    std::string cal_data, cal_label, cal_pred, cal_thresholds =
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::string cal_out, cal_report;
    bool cal_preserve = false;
    auto* cal_cmd = app.add_subcommand("calibrate", "repair predictions to raise utility");
    cal_cmd->add_option("--data", cal_data, "CSV with predictions and labels")->required();
    cal_cmd->add_option("--label-col", cal_label, "label column")->required();
    cal_cmd->add_option("--pred-col", cal_pred, "prediction column")->required();
    cal_cmd->add_option("--thresholds", cal_thresholds, "comma-separated thresholds");
    cal_cmd->add_flag("--preserve-order", cal_preserve, "keep the input score ordering");
    cal_cmd->add_option("--out", cal_out, "repaired predictions CSV")->required();
    cal_cmd->add_option("--report", cal_report, "repair report JSON");

    // ---- synth ----
    std::string synth_data, synth_label, synth_out, synth_thresholds =
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    int synth_type = 1;
    double synth_r = 0.5, synth_auroc = 0.9;
    std::uint64_t synth_seed = 0;
    auto* synth_cmd = app.add_subcommand("synth", "synthetic prediction vectors");
    synth_cmd->add_option("--data", synth_data, "CSV with the label column")->required();
    synth_cmd->add_option("--label-col", synth_label, "label column")->required();
    synth_cmd->add_option("--type", synth_type, "1 = controlled correlation, 2 = boundary")
        ->check(CLI::IsMember({1, 2}));
    synth_cmd->add_option("--r", synth_r, "target correlation (type 1)");
    synth_cmd->add_option("--auroc", synth_auroc, "target AUROC (type 2)");
    synth_cmd->add_option("--thresholds", synth_thresholds, "thresholds (type 2)");
    synth_cmd->add_option("--seed", synth_seed, "random seed (type 1)");
    synth_cmd->add_option("--out", synth_out, "predictions CSV")->required();

    // ---- bounds ----
    double bounds_a0 = 0.5;
    std::string bounds_thresholds = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::string bounds_out;
    int bounds_points = 1001;
    auto* bounds_cmd = app.add_subcommand("bounds", "utility/discrimination envelope table");
    bounds_cmd->add_option("--a0", bounds_a0, "prevalence in (0,1)")->required();
    bounds_cmd->add_option("--thresholds", bounds_thresholds, "comma-separated thresholds");
    bounds_cmd->add_option("--points", bounds_points, "sample count over [0,1]");
    bounds_cmd->add_option("--out", bounds_out, "CSV: auroc,aunbc_upper,aunbc_lower")
        ->required();

    // ---- dca ----
    std::string dca_data, dca_label, dca_pred, dca_thresholds =
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::string dca_prefix;
    auto* dca_cmd = app.add_subcommand("dca", "ROC, calibration, and decision-curve CSVs");
    dca_cmd->add_option("--data", dca_data, "CSV with predictions and labels")->required();
    dca_cmd->add_option("--label-col", dca_label, "label column")->required();
    dca_cmd->add_option("--pred-col", dca_pred, "prediction column")->required();
    dca_cmd->add_option("--thresholds", dca_thresholds, "comma-separated thresholds");
    dca_cmd->add_option("--out-prefix", dca_prefix, "writes <prefix>_roc.csv etc.")
        ->required();

    // ---- export-milp ----
    TrainOptions milp_opt;
    std::string milp_out;
    double milp_gamma = 0.0;
    bool milp_gamma_set = false;
    auto* milp_cmd = app.add_subcommand("export-milp", "LP-format export of the training MILP");
    add_data_flags(milp_cmd, milp_opt);
    add_solver_flags(milp_cmd, milp_opt);
    milp_cmd->add_option("--gamma", milp_gamma, "strict-separation margin")
        ->each([&milp_gamma_set](const std::string&) { milp_gamma_set = true; });
    milp_cmd->add_option("--out", milp_out, "output LP file")->required();

    // ---- scorecard ----
    std::string card_model, card_binarize, card_out;
    auto* card_cmd = app.add_subcommand("scorecard", "human-readable points and band tables");
    card_cmd->add_option("--model", card_model, "model JSON")->required();
    card_cmd->add_option("--binarize", card_binarize, "JSON binarization rules");
    card_cmd->add_option("--out", card_out, "output text file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (train_ml->parsed()) {
        const IngestResult ingest =
            ingest_csv(train_opt.data_path, train_opt.label_col,
                       load_spec_or_default(train_opt.binarize_path));
        if (ingest.dropped_rows > 0) {
            std::cerr << "dropped " << ingest.dropped_rows << " rows with missing values\n";
        }
        const ThresholdGrid grid = make_grid(train_opt.thresholds, train_opt.weights);
        const SolverConfig config = make_config(train_opt, ingest.dataset);
        TrainResult result = train_opt.solver == "exact"
                                 ? exact_enumerate(ingest.dataset, grid, config)
                                 : sa_train(ingest.dataset, grid, config);
        auto [model, assignment] = calibrate_risk_levels(std::move(result.model),
                                                         ingest.dataset);
        if (!assignment.clamped_bins.empty()) {
            std::cerr << "warning: " << assignment.clamped_bins.size()
                      << " bins clamped during risk-level assignment\n";
        }
        save_model(train_out, model, config, train_opt.solver);
        std::cout << "loss " << result.loss << ", model size ";
        long long nnz = 0;
        for (long long v : model.coefficients) nnz += (v != 0);
        std::cout << nnz << ", evaluations " << result.evaluations << "\n";
        return 0;
    }

    if (predict_cmd->parsed()) {
        const LoadedModel loaded = load_model(predict_model);
        const CsvTable table = read_csv(predict_data);
        const BinarizationSpec spec = load_spec_or_default(predict_binarize);
        // Reuse the ingest path by treating one column as the label when
        // given; otherwise synthesize a zero label column.
        std::ofstream out = open_output(predict_out);
        out << "score,risk\n";
        if (!predict_label.empty()) {
            const IngestResult ingest = ingest_table(table, predict_label, spec);
            for (std::size_t j = 0; j < ingest.dataset.n_rows(); ++j) {
                const Prediction p = predict(loaded.model, ingest.dataset.row(j));
                out << p.score << "," << p.risk << "\n";
            }
        } else {
            CsvTable with_label = table;
            with_label.header.push_back("__label__");
            for (auto& row : with_label.rows) row.push_back("0");
            const IngestResult ingest = ingest_table(with_label, "__label__", spec);
            for (std::size_t j = 0; j < ingest.dataset.n_rows(); ++j) {
                const Prediction p = predict(loaded.model, ingest.dataset.row(j));
                out << p.score << "," << p.risk << "\n";
            }
        }
        return 0;
    }

    if (eval_cmd->parsed()) {
        const PredictionsFile file = read_predictions(eval_data, eval_pred, eval_label);
        const ThresholdGrid grid = make_grid(eval_thresholds, eval_weights);
        const std::string report =
            metric_report_json(PredictionVector(file.predictions), file.labels, grid);
        if (eval_out.empty()) {
            std::cout << report;
        } else {
            open_output(eval_out) << report;
        }
        return 0;
    }

    if (cv_cmd->parsed()) {
        const IngestResult ingest = ingest_csv(cv_opt.data_path, cv_opt.label_col,
                                               load_spec_or_default(cv_opt.binarize_path));
        if (ingest.dropped_rows > 0) {
            std::cerr << "dropped " << ingest.dropped_rows << " rows with missing values\n";
        }
        const ThresholdGrid grid = make_grid(cv_opt.thresholds, cv_opt.weights);
        const SolverConfig config = make_config(cv_opt, ingest.dataset);
        CvPlan plan;
        plan.folds = cv_folds;
        plan.repeats = cv_repeats;
        plan.seed = cv_opt.seed;
        plan.stratified = !cv_no_stratify;
        const SolverChoice choice = cv_opt.solver == "exact" ? SolverChoice::Exact
                                                             : SolverChoice::SimulatedAnnealing;
        const CvReport report = run_cv(ingest.dataset, grid, config, plan, choice);
        open_output(cv_out) << cv_report_to_json(report, ingest.dataset, grid, config, choice);
        if (!cv_pooled_out.empty()) {
            std::ofstream pooled = open_output(cv_pooled_out);
            pooled << "repeat,row,label,prediction\n";
            for (const auto& p : report.pooled) {
                pooled << p.repeat << "," << p.row << "," << p.label << "," << p.prediction
                       << "\n";
            }
        }
        return 0;
    }

    if (cal_cmd->parsed()) {
        const PredictionsFile file = read_predictions(cal_data, cal_pred, cal_label);
        const ThresholdGrid grid = make_grid(cal_thresholds, "default");
        auto [repaired, report] = improve_aunbc(PredictionVector(file.predictions),
                                                file.labels, grid, cal_preserve);
        std::ofstream out = open_output(cal_out);
        out << "prediction\n";
        for (std::size_t j = 0; j < repaired.size(); ++j) out << repaired[j] << "\n";
        nlohmann::json rep;
        rep["aunbc_before"] = report.aunbc_before;
        rep["aunbc_after"] = report.aunbc_after;
        rep["order_preserved"] = report.order_preserved;
        rep["moved_bins"] = nlohmann::json::array();
        for (const auto& [bin, dir] : report.moved_bins) {
            rep["moved_bins"].push_back(
                {{"bin", bin}, {"direction", dir == MoveDirection::Up ? "up" : "down"}});
        }
        const std::string text = rep.dump(2) + "\n";
        if (cal_report.empty()) {
            std::cout << text;
        } else {
            open_output(cal_report) << text;
        }
        return 0;
    }

    if (synth_cmd->parsed()) {
        const CsvTable table = read_csv(synth_data);
        const std::size_t label_idx = table.column_index(synth_label);
        std::vector<int> labels;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const double v = std::stod(table.rows[r][label_idx]);
            if (v != 0.0 && v != 1.0) {
                throw DataError("non-binary label at row " + std::to_string(r));
            }
            labels.push_back(static_cast<int>(v));
        }
        PredictionVector preds = [&] {
            if (synth_type == 1) {
                RngStream rng(synth_seed);
                return synth_correlated(labels, synth_r, rng);
            }
            return synth_boundary(labels, synth_auroc,
                                  ThresholdGrid(parse_double_list(synth_thresholds)));
        }();
        std::ofstream out = open_output(synth_out);
        out << "prediction\n";
        for (std::size_t j = 0; j < preds.size(); ++j) out << preds[j] << "\n";
        return 0;
    }

    if (bounds_cmd->parsed()) {
        if (bounds_points < 2) throw ConfigError("--points must be at least 2");
        std::ofstream out = open_output(bounds_out);
        emit_envelope_csv(bounds_a0, ThresholdGrid(parse_double_list(bounds_thresholds)),
                          bounds_points, out);
        return 0;
    }

    if (dca_cmd->parsed()) {
        const PredictionsFile file = read_predictions(dca_data, dca_pred, dca_label);
        const ThresholdGrid grid = make_grid(dca_thresholds, "default");
        std::ofstream roc = open_output(dca_prefix + "_roc.csv");
        std::ofstream calibration = open_output(dca_prefix + "_calibration.csv");
        std::ofstream decision = open_output(dca_prefix + "_decision.csv");
        emit_curves(PredictionVector(file.predictions), file.labels, grid, roc, calibration,
                    decision);
        return 0;
    }

    if (milp_cmd->parsed()) {
        const IngestResult ingest = ingest_csv(milp_opt.data_path, milp_opt.label_col,
                                               load_spec_or_default(milp_opt.binarize_path));
        const ThresholdGrid grid = make_grid(milp_opt.thresholds, milp_opt.weights);
        const SolverConfig config = make_config(milp_opt, ingest.dataset);
        const std::optional<double> gamma =
            milp_gamma_set ? std::optional<double>(milp_gamma) : std::nullopt;
        const MilpExport milp = milp_export(ingest.dataset, grid, config, gamma);
        open_output(milp_out) << write_lp(milp);
        std::cout << milp.variables.size() << " variables, " << milp.constraints.size()
                  << " constraints\n";
        return 0;
    }

    if (card_cmd->parsed()) {
        const LoadedModel loaded = load_model(card_model);
        const BinarizationSpec spec = load_spec_or_default(card_binarize);
        const std::string text = render_scorecard(loaded.model, spec);
        if (card_out.empty()) {
            std::cout << text;
        } else {
            open_output(card_out) << text;
        }
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
