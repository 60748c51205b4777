#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskscore/types.hpp"

namespace riskscore {

/// Cross-validation layout: folds x repeats with deterministic seeding;
/// stratified by default so small datasets keep both classes in every
/// training fold.
struct CvPlan {
    int folds = 10;
    int repeats = 1;
    std::uint64_t seed = 0;
    bool stratified = true;

    void check() const;
};

enum class SolverChoice { SimulatedAnnealing, Exact };

// Test-fold index per sample for one repeat. Stratified assignment deals
// shuffled positives and negatives round-robin, so per-fold positive counts
// differ by at most one.
std::vector<int> make_folds(const std::vector<int>& labels, const CvPlan& plan, int repeat);

struct SplitMetrics {
    double auroc = 0.0;
    double aunbc = 0.0;
    double ece = 0.0;
};

struct FoldResult {
    int repeat = 0;
    int fold = 0;
    SplitMetrics train;
    SplitMetrics test;
    int model_size = 0;    // nonzero coefficients, intercepts excluded
    int clamped_bins = 0;  // calibration clamps on the training fold
    double loss = 0.0;
};

struct SummaryStat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation over fold values
};

struct CvAggregate {
    SummaryStat train_auroc, train_aunbc, train_ece;
    SummaryStat test_auroc, test_aunbc, test_ece;
    SummaryStat model_size;
};

struct PooledPrediction {
    int repeat = 0;
    int row = 0;
    int label = 0;
    double prediction = 0.0;
};

struct CvReport {
    CvPlan plan;
    std::vector<FoldResult> folds;
    CvAggregate aggregate;
    std::vector<PooledPrediction> pooled;  // out-of-fold predictions
};

// Per repeat x fold: train on the complement, calibrate risk levels on the
// training predictions, evaluate both splits, and pool out-of-fold
// predictions for curve plotting.
CvReport run_cv(const BinaryDataset& data, const ThresholdGrid& grid,
                const SolverConfig& config, const CvPlan& plan, SolverChoice solver);

// Report JSON with provenance (config, seed, dataset fingerprint).
std::string cv_report_to_json(const CvReport& report, const BinaryDataset& data,
                              const ThresholdGrid& grid, const SolverConfig& config,
                              SolverChoice solver);

// FNV-1a fingerprint of the dataset contents, for report provenance.
std::uint64_t dataset_fingerprint(const BinaryDataset& data);

}  // namespace riskscore
