#include "riskscore/cv.hpp"

#include <cmath>
#include <cstring>
#include <future>
#include <numeric>

#include <json.hpp>

#include "riskscore/calibration.hpp"
#include "riskscore/metrics.hpp"
#include "riskscore/rng.hpp"
#include "riskscore/solver.hpp"

namespace riskscore {

namespace {

void shuffle_indices(std::vector<std::size_t>& idx, RngStream& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(i));
        std::swap(idx[i - 1], idx[j]);
    }
}

BinaryDataset subset(const BinaryDataset& data, const std::vector<std::size_t>& rows) {
    std::vector<double> features;
    features.reserve(rows.size() * data.n_cols());
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t j : rows) {
        const auto row = data.row(j);
        features.insert(features.end(), row.begin(), row.end());
        labels.push_back(data.label(j));
    }
    return validate_dataset(std::move(features), data.n_cols(), std::move(labels),
                            data.feature_names());
}

SplitMetrics evaluate_split(const ScoreModel& model, const BinaryDataset& data) {
    const PredictionVector preds = predict_all(model, data);
    const ConfusionCurve curve = confusion_at_thresholds(preds, data.labels(), model.grid);
    SplitMetrics metrics;
    metrics.auroc = auroc_binned(curve);
    metrics.aunbc = aunbc(curve, model.grid);
    metrics.ece = ece(bin_stats(preds, data.labels(), model.grid), curve.n);
    return metrics;
}

SummaryStat summarize(const std::vector<double>& values) {
    SummaryStat s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }
    return s;
}

struct FoldOutput {
    FoldResult result;
    std::vector<PooledPrediction> pooled;
};

FoldOutput run_fold(const BinaryDataset& data, const ThresholdGrid& grid,
                    const SolverConfig& config, SolverChoice solver,
                    const std::vector<int>& assignment, int repeat, int fold) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        if (assignment[j] == fold) {
            test_rows.push_back(j);
        } else {
            train_rows.push_back(j);
        }
    }
    const BinaryDataset train = subset(data, train_rows);
    const BinaryDataset test = subset(data, test_rows);
    if (train.n_pos() == 0 || train.n_neg() == 0) {
        throw DataError("training fold " + std::to_string(fold) + " has a single class");
    }

    SolverConfig fold_config = config;
    fold_config.seed = RngStream::splitmix64(config.seed +
                                             0x9E3779B97F4A7C15ULL *
                                                 static_cast<std::uint64_t>(
                                                     repeat * 1000 + fold + 1));
    TrainResult trained = solver == SolverChoice::Exact
                              ? exact_enumerate(train, grid, fold_config)
                              : sa_train(train, grid, fold_config);
    auto [model, assignment_info] = calibrate_risk_levels(std::move(trained.model), train);

    FoldOutput out;
    out.result.repeat = repeat;
    out.result.fold = fold;
    out.result.loss = trained.loss;
    out.result.clamped_bins = static_cast<int>(assignment_info.clamped_bins.size());
    out.result.model_size = 0;
    for (long long v : model.coefficients) out.result.model_size += (v != 0);
    out.result.train = evaluate_split(model, train);
    out.result.test = evaluate_split(model, test);

    out.pooled.reserve(test_rows.size());
    for (std::size_t j : test_rows) {
        const double risk = predict(model, data.row(j)).risk;
        out.pooled.push_back(
            {repeat, static_cast<int>(j), data.label(j), risk});
    }
    return out;
}

}  // namespace

void CvPlan::check() const {
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (repeats < 1) throw ConfigError("cross-validation needs at least 1 repeat");
}

std::vector<int> make_folds(const std::vector<int>& labels, const CvPlan& plan, int repeat) {
    plan.check();
    if (labels.size() < static_cast<std::size_t>(plan.folds)) {
        throw DataError("fewer samples than folds");
    }
    RngStream rng = RngStream::derived(plan.seed, static_cast<std::uint64_t>(repeat));
    std::vector<int> assignment(labels.size(), -1);
    if (plan.stratified) {
        std::vector<std::size_t> pos, neg;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            (labels[j] == 1 ? pos : neg).push_back(j);
        }
        shuffle_indices(pos, rng);
        shuffle_indices(neg, rng);
        int next = 0;
        for (std::size_t j : pos) {
            assignment[j] = next;
            next = (next + 1) % plan.folds;
        }
        // Negatives continue the deal so fold sizes stay balanced overall.
        for (std::size_t j : neg) {
            assignment[j] = next;
            next = (next + 1) % plan.folds;
        }
    } else {
        std::vector<std::size_t> idx(labels.size());
        std::iota(idx.begin(), idx.end(), 0);
        shuffle_indices(idx, rng);
        int next = 0;
        for (std::size_t j : idx) {
            assignment[j] = next;
            next = (next + 1) % plan.folds;
        }
    }
    return assignment;
}

CvReport run_cv(const BinaryDataset& data, const ThresholdGrid& grid,
                const SolverConfig& config, const CvPlan& plan, SolverChoice solver) {
    plan.check();
    config.check(data.n_cols());

    CvReport report;
    report.plan = plan;

    std::vector<std::future<FoldOutput>> futures;
    std::vector<std::vector<int>> assignments;
    assignments.reserve(static_cast<std::size_t>(plan.repeats));
    for (int repeat = 0; repeat < plan.repeats; ++repeat) {
        assignments.push_back(make_folds(data.labels(), plan, repeat));
    }
    for (int repeat = 0; repeat < plan.repeats; ++repeat) {
        for (int fold = 0; fold < plan.folds; ++fold) {
            futures.push_back(std::async(std::launch::async, run_fold, std::cref(data),
                                         std::cref(grid), std::cref(config), solver,
                                         std::cref(assignments[static_cast<std::size_t>(
                                             repeat)]),
                                         repeat, fold));
        }
    }

    std::vector<double> train_auroc, train_aunbc, train_ece;
    std::vector<double> test_auroc, test_aunbc, test_ece, sizes;
    for (auto& f : futures) {
        FoldOutput out = f.get();
        train_auroc.push_back(out.result.train.auroc);
        train_aunbc.push_back(out.result.train.aunbc);
        train_ece.push_back(out.result.train.ece);
        test_auroc.push_back(out.result.test.auroc);
        test_aunbc.push_back(out.result.test.aunbc);
        test_ece.push_back(out.result.test.ece);
        sizes.push_back(out.result.model_size);
        report.folds.push_back(out.result);
        report.pooled.insert(report.pooled.end(), out.pooled.begin(), out.pooled.end());
    }

    report.aggregate.train_auroc = summarize(train_auroc);
    report.aggregate.train_aunbc = summarize(train_aunbc);
    report.aggregate.train_ece = summarize(train_ece);
    report.aggregate.test_auroc = summarize(test_auroc);
    report.aggregate.test_aunbc = summarize(test_aunbc);
    report.aggregate.test_ece = summarize(test_ece);
    report.aggregate.model_size = summarize(sizes);
    return report;
}

std::uint64_t dataset_fingerprint(const BinaryDataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* bytes, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(bytes);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        const int y = data.label(j);
        mix(&y, sizeof(y));
        const auto row = data.row(j);
        mix(row.data(), row.size() * sizeof(double));
    }
    for (const auto& name : data.feature_names()) mix(name.data(), name.size());
    return h;
}

std::string cv_report_to_json(const CvReport& report, const BinaryDataset& data,
                              const ThresholdGrid& grid, const SolverConfig& config,
                              SolverChoice solver) {
    nlohmann::json doc;
    doc["plan"] = {{"folds", report.plan.folds},
                   {"repeats", report.plan.repeats},
                   {"seed", report.plan.seed},
                   {"stratified", report.plan.stratified}};
    auto stat = [](const SummaryStat& s) {
        return nlohmann::json{{"mean", s.mean}, {"stddev", s.stddev}};
    };
    doc["aggregate"] = {{"train", {{"auroc", stat(report.aggregate.train_auroc)},
                                   {"aunbc", stat(report.aggregate.train_aunbc)},
                                   {"ece", stat(report.aggregate.train_ece)}}},
                        {"test", {{"auroc", stat(report.aggregate.test_auroc)},
                                  {"aunbc", stat(report.aggregate.test_aunbc)},
                                  {"ece", stat(report.aggregate.test_ece)}}},
                        {"model_size", stat(report.aggregate.model_size)}};
    doc["folds"] = nlohmann::json::array();
    for (const auto& f : report.folds) {
        doc["folds"].push_back(
            {{"repeat", f.repeat},
             {"fold", f.fold},
             {"loss", f.loss},
             {"model_size", f.model_size},
             {"clamped_bins", f.clamped_bins},
             {"train", {{"auroc", f.train.auroc}, {"aunbc", f.train.aunbc}, {"ece", f.train.ece}}},
             {"test", {{"auroc", f.test.auroc}, {"aunbc", f.test.aunbc}, {"ece", f.test.ece}}}});
    }
    doc["provenance"] = {
        {"solver", solver == SolverChoice::Exact ? "exact" : "sa"},
        {"seed", config.seed},
        {"c0", config.c0},
        {"t_max", config.t_max},
        {"restarts", config.restarts},
        {"sa_initial_temp", config.sa_initial_temp},
        {"sa_cooling_rate", config.sa_cooling_rate},
        {"sa_min_temp", config.sa_min_temp},
        {"sa_iters_per_temp", config.sa_iters_per_temp},
        {"thresholds", grid.inner()},
        {"weights", grid.weights()},
        {"dataset_fingerprint", dataset_fingerprint(data)},
        {"n", data.n_rows()},
        {"p", data.n_cols()}};
    return doc.dump(2) + "\n";
}

}  // namespace riskscore
