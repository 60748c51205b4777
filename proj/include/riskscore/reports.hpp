#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "riskscore/csv.hpp"
#include "riskscore/types.hpp"

namespace riskscore {

// Evaluation report for an arbitrary prediction vector:
// {auroc, aunbc, ece, hl: {value, skipped_bins}, net_benefit: [...], objective}.
// The HL expected rates are the per-bin mean predicted scores.
std::string metric_report_json(const PredictionVector& preds, const std::vector<int>& labels,
                               const ThresholdGrid& grid);

// Points table (predictor x category x points) plus the band table mapping
// integer score ranges to risk percentages with one decimal.
std::string render_scorecard(const ScoreModel& model, const BinarizationSpec& spec);

// ROC points (threshold, fpr, tpr including both sentinels), calibration
// points (bin midpoint, mean predicted, observed rate), and the decision
// curve (threshold, model net benefit, treat-all, treat-none).
void emit_curves(const PredictionVector& preds, const std::vector<int>& labels,
                 const ThresholdGrid& grid, std::ostream& roc_out, std::ostream& calibration_out,
                 std::ostream& decision_out);

// Uniformly sampled envelope table: auroc, aunbc_upper, aunbc_lower.
void emit_envelope_csv(double a0, const ThresholdGrid& grid, int points, std::ostream& out);

}  // namespace riskscore
