#pragma once

#include <utility>
#include <vector>

#include "riskscore/metrics.hpp"
#include "riskscore/types.hpp"

namespace riskscore {

enum class MoveDirection { Down, Up };

/// Audit trail for a repair sweep.
struct RepairReport {
    std::vector<std::pair<int, MoveDirection>> moved_bins;
    double aunbc_before = 0.0;
    double aunbc_after = 0.0;
    bool order_preserved = false;
    int sweeps = 1;
};

// Single left-to-right sweep over bins i = 0..M: a bin whose positive count
// falls below N_i * p_i moves to p_{i-1}, a bin whose positive count exceeds
// N_i * p_{i+1} moves to p_{i+1}; TP/FP are recomputed from the
// already-modified predictions at each step. With preserve_order the
// original scores re-enter as a 1% tiebreaker, capped at 1.
std::pair<PredictionVector, RepairReport> improve_aunbc(const PredictionVector& preds,
                                                        const std::vector<int>& labels,
                                                        const ThresholdGrid& grid,
                                                        bool preserve_order);

// Repeats plain sweeps until one triggers no move, then optionally applies
// the order-preserving step once at the end.
std::pair<PredictionVector, RepairReport> improve_aunbc_until_stable(
    const PredictionVector& preds, const std::vector<int>& labels, const ThresholdGrid& grid,
    bool preserve_order);

/// Risk levels q_0..q_M derived from per-bin event rates, plus which bins
/// needed clamping (rate outside the half-open bin) or merged upward (rate
/// exactly at the bin's upper threshold).
struct RiskAssignment {
    std::vector<double> risk_levels;
    std::vector<int> clamped_bins;
    std::vector<int> merged_bins;
};

// q_i = O_i/N_i for nonempty bins, bin midpoint for empty ones. A rate equal
// to p_{i+1} re-bins the samples upward as the calibration argument
// requires; rates outside [p_i, p_{i+1}) are clamped into
// [p_i, p_{i+1} - 1e-9] and flagged.
RiskAssignment assign_risk_levels(const BinStats& stats, const ThresholdGrid& grid);

// Model-level counterpart: derives band occupancy from the model's integer
// scores on the dataset, applies assign_risk_levels, and mirrors any upward
// merge on the intercepts (T_{i+1} <- T_i) so the model's predictions land
// in the bins that produced their risk levels.
std::pair<ScoreModel, RiskAssignment> calibrate_risk_levels(ScoreModel model,
                                                            const BinaryDataset& data);

}  // namespace riskscore
