#pragma once

#include <span>
#include <vector>

#include "riskscore/types.hpp"

namespace riskscore {

/// Per-bin sample counts, positive counts, and mean predicted score for the
/// threshold bins [p_i, p_{i+1}), i = 0..M (top bin closed at 1).
/// mean_score is 0 for empty bins.
struct BinStats {
    std::vector<long long> count;      // N_i
    std::vector<long long> positives;  // O_i
    std::vector<double> mean_score;    // e_i
};

struct HlResult {
    double value = 0.0;
    int skipped_bins = 0;
    bool defined = true;  // false when every bin was skipped
};

// Single-threshold net benefit from raw counts:
//   tp/n - (fp/n) * p/(1-p).
// All metric code funnels through this so algebraically equal quantities
// compare bit-for-bit.
inline double net_benefit_counts(long long tp, long long fp, long long n, double p) {
    const double dn = static_cast<double>(n);
    return static_cast<double>(tp) / dn - (static_cast<double>(fp) / dn) * (p / (1.0 - p));
}

// TP_i/FP_i at every grid threshold with the closed comparison
// score >= p_i; indexes 0..M+1 with TP_{M+1} = FP_{M+1} = 0 by convention.
ConfusionCurve confusion_at_thresholds(const PredictionVector& preds,
                                       const std::vector<int>& labels,
                                       const ThresholdGrid& grid);

// Same counts computed from unbounded linear scores against explicit
// intercepts T_0..T_M (used by the solver and the learning-capacity check).
ConfusionCurve confusion_from_scores(std::span<const double> scores,
                                     const std::vector<int>& labels,
                                     std::span<const double> intercepts);

double net_benefit(const ConfusionCurve& curve, const ThresholdGrid& grid, int i);

// Area under the net-benefit curve: always weighted by threshold spacings,
// independently of the grid's configured weights.
double aunbc(const ConfusionCurve& curve, const ThresholdGrid& grid);

// Training objective: negative weighted net benefit plus the l0 penalty.
// With default (spacing) weights and c0 = 0 this is exactly -aunbc.
double weighted_objective(const ConfusionCurve& curve, const ThresholdGrid& grid,
                          long long num_nonzero, double c0);

// Grid-binned AUROC. Exact for piecewise-constant models; for continuous
// predictions it is the binned value on this grid, not the rank statistic.
double auroc_binned(const ConfusionCurve& curve);

BinStats bin_stats(const PredictionVector& preds, const std::vector<int>& labels,
                   const ThresholdGrid& grid);

// Expected calibration error over the grid bins; empty bins contribute 0.
double ece(const BinStats& stats, long long n);

// Hosmer-Lemeshow statistic with expected counts E_i = q_i * N_i. Bins with
// N_i = 0 or E_i outside (0, N_i) are skipped and counted; the result is
// flagged undefined when every bin was skipped.
HlResult hl_statistic(const BinStats& stats, std::span<const double> risk_levels, long long n);

}  // namespace riskscore
