#include "riskscore/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace riskscore {

namespace {

void require_same_length(std::size_t preds, std::size_t labels) {
    if (preds != labels) {
        std::ostringstream msg;
        msg << "length mismatch: " << preds << " predictions vs " << labels << " labels";
        throw DataError(msg.str());
    }
}

// Weighted sum of per-threshold net benefits; net_benefit_counts carries
// the 1/N.
double weighted_nb_sum(const ConfusionCurve& curve, const ThresholdGrid& grid,
                       bool spacing_weights) {
    double acc = 0.0;
    for (int i = 0; i <= grid.inner_count(); ++i) {
        const double w = spacing_weights ? grid.spacing(i) : grid.weight(i);
        acc += w * net_benefit_counts(curve.tp[static_cast<std::size_t>(i)],
                                      curve.fp[static_cast<std::size_t>(i)], curve.n,
                                      grid.threshold(i));
    }
    return acc;
}

}  // namespace

ConfusionCurve confusion_at_thresholds(const PredictionVector& preds,
                                       const std::vector<int>& labels,
                                       const ThresholdGrid& grid) {
    require_same_length(preds.size(), labels.size());
    const int m = grid.inner_count();
    ConfusionCurve curve;
    curve.tp.assign(static_cast<std::size_t>(m) + 2, 0);
    curve.fp.assign(static_cast<std::size_t>(m) + 2, 0);
    curve.n = static_cast<long long>(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] == 1) {
            ++curve.n_pos;
        } else {
            ++curve.n_neg;
        }
    }
    // i = M+1 stays zero by convention even for scores equal to 1.
    for (int i = 0; i <= m; ++i) {
        const double p = grid.threshold(i);
        long long tp = 0, fp = 0;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (preds[j] >= p) {
                if (labels[j] == 1) {
                    ++tp;
                } else {
                    ++fp;
                }
            }
        }
        curve.tp[static_cast<std::size_t>(i)] = tp;
        curve.fp[static_cast<std::size_t>(i)] = fp;
    }
    return curve;
}

ConfusionCurve confusion_from_scores(std::span<const double> scores,
                                     const std::vector<int>& labels,
                                     std::span<const double> intercepts) {
    require_same_length(scores.size(), labels.size());
    ConfusionCurve curve;
    curve.tp.assign(intercepts.size() + 1, 0);
    curve.fp.assign(intercepts.size() + 1, 0);
    curve.n = static_cast<long long>(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] == 1) {
            ++curve.n_pos;
        } else {
            ++curve.n_neg;
        }
    }
    for (std::size_t i = 0; i < intercepts.size(); ++i) {
        long long tp = 0, fp = 0;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (scores[j] >= intercepts[i]) {
                if (labels[j] == 1) {
                    ++tp;
                } else {
                    ++fp;
                }
            }
        }
        curve.tp[i] = tp;
        curve.fp[i] = fp;
    }
    return curve;
}

double net_benefit(const ConfusionCurve& curve, const ThresholdGrid& grid, int i) {
    if (i < 0 || i > grid.inner_count()) {
        throw ConfigError("net benefit index out of range");
    }
    return net_benefit_counts(curve.tp[static_cast<std::size_t>(i)],
                              curve.fp[static_cast<std::size_t>(i)], curve.n, grid.threshold(i));
}

double aunbc(const ConfusionCurve& curve, const ThresholdGrid& grid) {
    return weighted_nb_sum(curve, grid, /*spacing_weights=*/true);
}

double weighted_objective(const ConfusionCurve& curve, const ThresholdGrid& grid,
                          long long num_nonzero, double c0) {
    return -weighted_nb_sum(curve, grid, /*spacing_weights=*/false) +
           c0 * static_cast<double>(num_nonzero);
}

double auroc_binned(const ConfusionCurve& curve) {
    if (curve.n_pos < 1 || curve.n_neg < 1) {
        throw DataError("degenerate labels: AUROC requires both classes");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < curve.tp.size(); ++i) {
        acc += static_cast<double>(curve.fp[i] - curve.fp[i + 1]) *
               static_cast<double>(curve.tp[i]);
    }
    return acc / (static_cast<double>(curve.n_pos) * static_cast<double>(curve.n_neg));
}

BinStats bin_stats(const PredictionVector& preds, const std::vector<int>& labels,
                   const ThresholdGrid& grid) {
    require_same_length(preds.size(), labels.size());
    const std::size_t bins = static_cast<std::size_t>(grid.bin_count());
    BinStats stats;
    stats.count.assign(bins, 0);
    stats.positives.assign(bins, 0);
    stats.mean_score.assign(bins, 0.0);
    for (std::size_t j = 0; j < preds.size(); ++j) {
        const auto b = static_cast<std::size_t>(grid.bin_of(preds[j]));
        ++stats.count[b];
        if (labels[j] == 1) ++stats.positives[b];
        // Running mean; exact for bins whose scores are all identical, which
        // is what makes training-set ECE come out as exactly zero for
        // piecewise-constant models.
        stats.mean_score[b] += (preds[j] - stats.mean_score[b]) /
                               static_cast<double>(stats.count[b]);
    }
    return stats;
}

double ece(const BinStats& stats, long long n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < stats.count.size(); ++i) {
        if (stats.count[i] == 0) continue;
        const double observed =
            static_cast<double>(stats.positives[i]) / static_cast<double>(stats.count[i]);
        acc += (static_cast<double>(stats.count[i]) / static_cast<double>(n)) *
               std::abs(observed - stats.mean_score[i]);
    }
    return acc;
}

HlResult hl_statistic(const BinStats& stats, std::span<const double> risk_levels, long long n) {
    long long total = 0;
    for (long long c : stats.count) total += c;
    if (total != n) throw DataError("bin counts do not sum to the sample count");
    if (risk_levels.size() != stats.count.size()) {
        throw DataError("risk level count does not match bin count");
    }
    HlResult result;
    int used = 0;
    for (std::size_t i = 0; i < stats.count.size(); ++i) {
        const double ni = static_cast<double>(stats.count[i]);
        if (stats.count[i] == 0) {
            ++result.skipped_bins;
            continue;
        }
        const double expected = risk_levels[i] * ni;
        if (!(expected > 0.0) || !(expected < ni)) {
            ++result.skipped_bins;
            continue;
        }
        const double diff = static_cast<double>(stats.positives[i]) - expected;
        result.value += diff * diff / (expected * (1.0 - expected / ni));
        ++used;
    }
    result.defined = used > 0;
    if (!result.defined) result.value = std::numeric_limits<double>::quiet_NaN();
    return result;
}

}  // namespace riskscore
