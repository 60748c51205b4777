#include "riskscore/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "riskscore/solver.hpp"

namespace riskscore {

namespace {

struct LoopCounts {
    long long tp_lo, tp_hi, fp_lo, fp_hi;  // at p_i and p_{i+1}
};

// Raw closed comparisons, including at p_{M+1} = 1, exactly as the sweep
// reads its working predictions. This deliberately differs from the curve
// convention TP_{M+1} = 0: a score of exactly 1 cancels out of O_M/N_M here
// and is likewise excluded from the [p_M, 1) move indicator.
LoopCounts count_at(const std::vector<double>& w, const std::vector<int>& labels, double p_lo,
                    double p_hi) {
    LoopCounts c{0, 0, 0, 0};
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j] >= p_lo) {
            if (labels[j] == 1) {
                ++c.tp_lo;
            } else {
                ++c.fp_lo;
            }
        }
        if (w[j] >= p_hi) {
            if (labels[j] == 1) {
                ++c.tp_hi;
            } else {
                ++c.fp_hi;
            }
        }
    }
    return c;
}

// One sweep over the working scores; returns the moves it made.
std::vector<std::pair<int, MoveDirection>> sweep(std::vector<double>& w,
                                                 const std::vector<int>& labels,
                                                 const ThresholdGrid& grid) {
    std::vector<std::pair<int, MoveDirection>> moves;
    const int m = grid.inner_count();
    for (int i = 0; i <= m; ++i) {
        const double p_lo = grid.threshold(i);
        const double p_hi = grid.threshold(i + 1);
        const LoopCounts c = count_at(w, labels, p_lo, p_hi);
        const double o_i = static_cast<double>(c.tp_lo - c.tp_hi);
        const double n_i = static_cast<double>(c.tp_lo - c.tp_hi + c.fp_lo - c.fp_hi);
        if (o_i < n_i * p_lo) {
            // For i = 0 this condition can never hold (p_0 = 0, O_i >= 0).
            const double target = grid.threshold(i - 1);
            for (double& s : w) {
                if (s >= p_lo && s < p_hi) s = target;
            }
            moves.emplace_back(i, MoveDirection::Down);
        } else if (o_i > n_i * p_hi) {
            const double target = p_hi;
            for (double& s : w) {
                if (s >= p_lo && s < p_hi) s = target;
            }
            moves.emplace_back(i, MoveDirection::Up);
        }
    }
    return moves;
}

void apply_order_step(std::vector<double>& w, const std::vector<double>& original) {
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = std::min(w[j] + original[j] / 100.0, 1.0);
    }
}

}  // namespace

std::pair<PredictionVector, RepairReport> improve_aunbc(const PredictionVector& preds,
                                                        const std::vector<int>& labels,
                                                        const ThresholdGrid& grid,
                                                        bool preserve_order) {
    const double before = aunbc(confusion_at_thresholds(preds, labels, grid), grid);
    std::vector<double> w = preds.scores();
    RepairReport report;
    report.order_preserved = preserve_order;
    report.aunbc_before = before;
    report.moved_bins = sweep(w, labels, grid);
    if (preserve_order) apply_order_step(w, preds.scores());
    PredictionVector repaired(std::move(w));
    report.aunbc_after = aunbc(confusion_at_thresholds(repaired, labels, grid), grid);
    return {std::move(repaired), std::move(report)};
}

std::pair<PredictionVector, RepairReport> improve_aunbc_until_stable(
    const PredictionVector& preds, const std::vector<int>& labels, const ThresholdGrid& grid,
    bool preserve_order) {
    const double before = aunbc(confusion_at_thresholds(preds, labels, grid), grid);
    std::vector<double> w = preds.scores();
    RepairReport report;
    report.order_preserved = preserve_order;
    report.aunbc_before = before;
    report.sweeps = 0;
    while (true) {
        auto moves = sweep(w, labels, grid);
        ++report.sweeps;
        if (moves.empty()) break;
        report.moved_bins.insert(report.moved_bins.end(), moves.begin(), moves.end());
    }
    if (preserve_order) apply_order_step(w, preds.scores());
    PredictionVector repaired(std::move(w));
    report.aunbc_after = aunbc(confusion_at_thresholds(repaired, labels, grid), grid);
    return {std::move(repaired), std::move(report)};
}

RiskAssignment assign_risk_levels(const BinStats& stats, const ThresholdGrid& grid) {
    const int m = grid.inner_count();
    std::vector<long long> count = stats.count;
    std::vector<long long> positives = stats.positives;
    RiskAssignment out;
    out.risk_levels.assign(static_cast<std::size_t>(m) + 1, 0.0);

    for (int i = 0; i <= m; ++i) {
        const auto bi = static_cast<std::size_t>(i);
        const double p_lo = grid.threshold(i);
        const double p_hi = grid.threshold(i + 1);
        const double midpoint = (p_lo + p_hi) / 2.0;
        if (count[bi] == 0) {
            out.risk_levels[bi] = midpoint;
            continue;
        }
        const double rate =
            static_cast<double>(positives[bi]) / static_cast<double>(count[bi]);
        if (i < m && rate == p_hi) {
            // Event rate at the bin's upper threshold: those samples belong
            // one bin up; the vacated bin keeps its midpoint.
            count[bi + 1] += count[bi];
            positives[bi + 1] += positives[bi];
            count[bi] = 0;
            positives[bi] = 0;
            out.risk_levels[bi] = midpoint;
            out.merged_bins.push_back(i);
            continue;
        }
        if (rate >= p_lo && rate < p_hi) {
            out.risk_levels[bi] = rate;
        } else if (rate < p_lo) {
            out.risk_levels[bi] = p_lo;
            out.clamped_bins.push_back(i);
        } else {
            // Above or at the upper edge with nowhere to merge (top bin).
            out.risk_levels[bi] = p_hi - 1e-9;
            out.clamped_bins.push_back(i);
        }
    }
    return out;
}

std::pair<ScoreModel, RiskAssignment> calibrate_risk_levels(ScoreModel model,
                                                            const BinaryDataset& data) {
    const int m = model.grid.inner_count();
    BinStats bands;
    bands.count.assign(static_cast<std::size_t>(m) + 1, 0);
    bands.positives.assign(static_cast<std::size_t>(m) + 1, 0);
    bands.mean_score.assign(static_cast<std::size_t>(m) + 1, 0.0);
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        const double score = linear_score(model, data.row(j));
        const auto band = static_cast<std::size_t>(band_of_score(model, score));
        ++bands.count[band];
        if (data.label(j) == 1) ++bands.positives[band];
    }
    RiskAssignment assignment = assign_risk_levels(bands, model.grid);
    for (int i : assignment.merged_bins) {
        // Band i joined band i+1; lowering the boundary realizes that on
        // the model side and keeps the intercepts nondecreasing.
        model.intercepts[static_cast<std::size_t>(i) + 1] =
            model.intercepts[static_cast<std::size_t>(i)];
    }
    model.risk_levels = assignment.risk_levels;
    return {std::move(model), std::move(assignment)};
}

}  // namespace riskscore
