#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskscore {

// Bad input data (malformed CSV, non-binary labels, ...). CLI exit code 1.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration (invalid grid, bounds, flags, ...). CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Ordered decision thresholds p_0 < p_1 < ... < p_M < p_{M+1} with
/// per-threshold weights w_0..w_M. The sentinels p_0 = 0 and p_{M+1} = 1
/// are implied and not stored. The default weighting w_i = p_{i+1} - p_i
/// makes the weighted sum of net benefits equal the area under the
/// net-benefit curve.
class ThresholdGrid {
public:
    // Default (spacing) weights.
    explicit ThresholdGrid(std::vector<double> inner_thresholds);
    // Custom weights; must be nonnegative and sum to 1 within 1e-12.
    ThresholdGrid(std::vector<double> inner_thresholds, std::vector<double> weights);

    int inner_count() const { return static_cast<int>(inner_.size()); }  // M
    int bin_count() const { return inner_count() + 1; }                  // M+1

    // p_i for i in [0, M+1], including both sentinels.
    double threshold(int i) const;
    // w_i for i in [0, M].
    double weight(int i) const { return weights_.at(static_cast<std::size_t>(i)); }
    // p_{i+1} - p_i for i in [0, M].
    double spacing(int i) const { return threshold(i + 1) - threshold(i); }

    const std::vector<double>& inner() const { return inner_; }
    const std::vector<double>& weights() const { return weights_; }

    // Index i of the bin [p_i, p_{i+1}) containing `score`; the top bin is
    // closed at 1 so a score of exactly 1 belongs to bin M.
    int bin_of(double score) const;

    bool operator==(const ThresholdGrid&) const = default;

private:
    std::vector<double> inner_;
    std::vector<double> weights_;
};

/// Feature matrix with binary labels; the training/evaluation substrate.
/// Immutable after construction.
class BinaryDataset {
public:
    std::size_t n_rows() const { return labels_.size(); }
    std::size_t n_cols() const { return n_cols_; }
    long long n_pos() const { return n_pos_; }
    long long n_neg() const { return n_neg_; }

    std::span<const double> row(std::size_t j) const {
        return {features_.data() + j * n_cols_, n_cols_};
    }
    double value(std::size_t j, std::size_t k) const { return features_[j * n_cols_ + k]; }
    int label(std::size_t j) const { return labels_[j]; }

    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& feature_names() const { return names_; }

    friend BinaryDataset validate_dataset(std::vector<double> features, std::size_t n_cols,
                                          std::vector<int> labels,
                                          std::vector<std::string> names);

private:
    BinaryDataset() = default;
    std::vector<double> features_;  // row-major N x P
    std::size_t n_cols_ = 0;
    std::vector<int> labels_;
    std::vector<std::string> names_;
    long long n_pos_ = 0;
    long long n_neg_ = 0;
};

// Validates dimensions, label values, and feature finiteness; derives
// positive/negative counts. Throws DataError with the offending row/column.
BinaryDataset validate_dataset(std::vector<double> features, std::size_t n_cols,
                               std::vector<int> labels, std::vector<std::string> names);

/// TP_i/FP_i counts at every grid threshold, i = 0..M+1. By convention
/// TP_{M+1} = FP_{M+1} = 0 regardless of scores equal to 1.
struct ConfusionCurve {
    std::vector<long long> tp;
    std::vector<long long> fp;
    long long n_pos = 0;
    long long n_neg = 0;
    long long n = 0;
};

/// Per-sample risk scores in [0,1] from any model.
class PredictionVector {
public:
    explicit PredictionVector(std::vector<double> scores);

    std::size_t size() const { return scores_.size(); }
    double operator[](std::size_t j) const { return scores_[j]; }
    const std::vector<double>& scores() const { return scores_; }

private:
    std::vector<double> scores_;
};

struct CoefficientBound {
    long long lo = 0;
    long long hi = 0;
};

/// Solver settings: sparsity penalty, per-feature coefficient boxes,
/// intercept cap, and the annealing schedule.
struct SolverConfig {
    double c0 = 1e-3;
    std::vector<CoefficientBound> lambda_bounds;  // P entries
    long long t_max = 100;
    double sa_initial_temp = 1e-3;
    double sa_cooling_rate = 1e-6;
    double sa_min_temp = 0.0;
    int sa_iters_per_temp = 10;
    std::uint64_t seed = 0;
    int restarts = 1;

    // Symmetric bounds [-cap, cap] for every feature.
    static std::vector<CoefficientBound> symmetric_bounds(std::size_t p, long long cap);

    void check(std::size_t n_features) const;  // throws ConfigError
};

/// Integer-coefficient scoring system: score = x . coefficients, banded by
/// monotone intercepts T_0 <= ... <= T_M into per-bin risk levels q_i.
struct ScoreModel {
    std::vector<long long> coefficients;  // length P
    std::vector<long long> intercepts;    // length M+1
    std::vector<double> risk_levels;      // length M+1, q_i in [p_i, p_{i+1})
    ThresholdGrid grid;
    std::vector<std::string> feature_names;

    void check() const;  // throws ConfigError on a broken invariant
};

}  // namespace riskscore
