#include "riskscore/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "riskscore/bounds.hpp"
#include "riskscore/metrics.hpp"
#include "riskscore/solver.hpp"

namespace riskscore {

namespace {

std::string percent_one_decimal(double q) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", q * 100.0);
    return buf;
}

struct CategoryPoints {
    std::string label;
    long long points;
};

// Per-predictor category/point listing derived from the binarization rules.
// One-hot expansions are folded back under their source predictor.
struct PredictorCard {
    std::string name;
    std::vector<CategoryPoints> categories;
    long long min_points = 0;
    long long max_points = 0;
};

std::string cut_label(const std::vector<double>& cuts, std::size_t level) {
    std::ostringstream out;
    if (level == 0) {
        out << "<= " << cuts.front();
    } else if (level == cuts.size()) {
        out << "> " << cuts.back();
    } else {
        out << "> " << cuts[level - 1] << ", <= " << cuts[level];
    }
    return out.str();
}

std::vector<PredictorCard> build_cards(const ScoreModel& model, const BinarizationSpec& spec) {
    std::vector<PredictorCard> cards;
    std::size_t k = 0;
    const auto& names = model.feature_names;
    while (k < names.size()) {
        const std::string& full = names[k];
        const auto eq = full.find('=');
        const std::string base = eq == std::string::npos ? full : full.substr(0, eq);
        const FeatureRule* rule = spec.rule_for(base);

        PredictorCard card;
        card.name = base;
        if (rule != nullptr && rule->kind == RuleKind::OneHot && eq != std::string::npos) {
            // Consecutive one-hot columns of the same predictor.
            for (const auto& cat : rule->categories) {
                card.categories.push_back({cat, model.coefficients[k]});
                ++k;
            }
        } else if (rule != nullptr && rule->kind == RuleKind::Ordinal) {
            for (std::size_t level = 0; level < rule->categories.size(); ++level) {
                card.categories.push_back(
                    {rule->categories[level],
                     model.coefficients[k] * static_cast<long long>(level)});
            }
            ++k;
        } else if (rule != nullptr && rule->kind == RuleKind::Cuts) {
            for (std::size_t level = 0; level <= rule->cuts.size(); ++level) {
                card.categories.push_back(
                    {cut_label(rule->cuts, level),
                     model.coefficients[k] * static_cast<long long>(level)});
            }
            ++k;
        } else {
            // Pass-through: rendered per unit over the binary {0,1} range.
            card.categories.push_back({"absent (0)", 0});
            card.categories.push_back({"present (1)", model.coefficients[k]});
            ++k;
        }
        card.min_points = card.categories.front().points;
        card.max_points = card.categories.front().points;
        for (const auto& c : card.categories) {
            card.min_points = std::min(card.min_points, c.points);
            card.max_points = std::max(card.max_points, c.points);
        }
        cards.push_back(std::move(card));
    }
    return cards;
}

}  // namespace

std::string metric_report_json(const PredictionVector& preds, const std::vector<int>& labels,
                               const ThresholdGrid& grid) {
    const ConfusionCurve curve = confusion_at_thresholds(preds, labels, grid);
    const BinStats stats = bin_stats(preds, labels, grid);
    const HlResult hl = hl_statistic(stats, stats.mean_score, curve.n);

    nlohmann::json doc;
    doc["auroc"] = auroc_binned(curve);
    doc["aunbc"] = aunbc(curve, grid);
    doc["ece"] = ece(stats, curve.n);
    doc["hl"] = {{"value", hl.defined ? nlohmann::json(hl.value) : nlohmann::json()},
                 {"skipped_bins", hl.skipped_bins}};
    nlohmann::json nb = nlohmann::json::array();
    for (int i = 0; i <= grid.inner_count(); ++i) {
        nb.push_back(net_benefit(curve, grid, i));
    }
    doc["net_benefit"] = std::move(nb);
    doc["objective"] = weighted_objective(curve, grid, 0, 0.0);
    return doc.dump(2) + "\n";
}

std::string render_scorecard(const ScoreModel& model, const BinarizationSpec& spec) {
    model.check();
    const auto cards = build_cards(model, spec);
    long long total_min = 0, total_max = 0;
    std::size_t label_width = std::string("Total possible score").size();
    for (const auto& card : cards) {
        total_min += card.min_points;
        total_max += card.max_points;
        label_width = std::max(label_width, card.name.size());
        for (const auto& c : card.categories) {
            label_width = std::max(label_width, c.label.size() + 2);
        }
    }

    std::ostringstream out;
    out << "Predictor / category";
    out << std::string(label_width > 20 ? label_width - 20 : 0, ' ') << "  Points\n";
    const std::size_t rule_width = label_width + 8;
    out << std::string(rule_width, '-') << "\n";
    for (const auto& card : cards) {
        out << card.name << "\n";
        for (const auto& c : card.categories) {
            out << "  " << c.label << std::string(label_width - c.label.size() - 2, ' ')
                << "  " << c.points << "\n";
        }
    }
    out << std::string(rule_width, '-') << "\n";
    out << "Total possible score"
        << std::string(label_width - std::string("Total possible score").size(), ' ') << "  "
        << total_min << "-" << total_max << "\n\n";

    // Band table: integer score ranges against risk percentages. Bands come
    // from the intercepts; only bands intersecting the reachable range
    // appear, so a zero model collapses to a single band.
    out << "Total score    Predicted risk\n";
    out << "-----------------------------\n";
    const int m = model.grid.inner_count();
    for (int band = 0; band <= m; ++band) {
        // Reachable integer scores in this band.
        const long long band_lo =
            band == 0 ? total_min
                      : std::max(total_min, model.intercepts[static_cast<std::size_t>(band)]);
        const long long band_hi =
            band == m ? total_max
                      : std::min(total_max,
                                 model.intercepts[static_cast<std::size_t>(band) + 1] - 1);
        if (band_lo > band_hi) continue;
        std::ostringstream range;
        if (band_lo == band_hi) {
            range << band_lo;
        } else {
            range << band_lo << "-" << band_hi;
        }
        out << range.str() << std::string(range.str().size() < 15 ? 15 - range.str().size() : 1, ' ')
            << percent_one_decimal(model.risk_levels[static_cast<std::size_t>(band)]) << "\n";
    }
    return out.str();
}

void emit_curves(const PredictionVector& preds, const std::vector<int>& labels,
                 const ThresholdGrid& grid, std::ostream& roc_out, std::ostream& calibration_out,
                 std::ostream& decision_out) {
    const ConfusionCurve curve = confusion_at_thresholds(preds, labels, grid);
    if (curve.n_pos < 1 || curve.n_neg < 1) {
        throw DataError("degenerate labels: ROC requires both classes");
    }
    const int m = grid.inner_count();

    roc_out << "threshold,fpr,tpr\n";
    for (int i = 0; i <= m + 1; ++i) {
        const double fpr = static_cast<double>(curve.fp[static_cast<std::size_t>(i)]) /
                           static_cast<double>(curve.n_neg);
        const double tpr = static_cast<double>(curve.tp[static_cast<std::size_t>(i)]) /
                           static_cast<double>(curve.n_pos);
        roc_out << grid.threshold(i) << "," << fpr << "," << tpr << "\n";
    }

    const BinStats stats = bin_stats(preds, labels, grid);
    calibration_out << "bin_midpoint,mean_predicted,observed_rate,count\n";
    for (int i = 0; i <= m; ++i) {
        const auto bi = static_cast<std::size_t>(i);
        const double midpoint = (grid.threshold(i) + grid.threshold(i + 1)) / 2.0;
        const double observed =
            stats.count[bi] == 0
                ? 0.0
                : static_cast<double>(stats.positives[bi]) /
                      static_cast<double>(stats.count[bi]);
        calibration_out << midpoint << "," << stats.mean_score[bi] << "," << observed << ","
                        << stats.count[bi] << "\n";
    }

    const double a0 = static_cast<double>(curve.n_pos) / static_cast<double>(curve.n);
    decision_out << "threshold,net_benefit,treat_all,treat_none\n";
    for (int i = 0; i <= m; ++i) {
        const double p = grid.threshold(i);
        const double treat_all = a0 - (1.0 - a0) * p / (1.0 - p);
        decision_out << p << "," << net_benefit(curve, grid, i) << "," << treat_all << ",0\n";
    }
}

void emit_envelope_csv(double a0, const ThresholdGrid& grid, int points, std::ostream& out) {
    const EnvelopeQuery query(a0, grid);
    out << "auroc,aunbc_upper,aunbc_lower\n";
    for (int s = 0; s < points; ++s) {
        const double x = static_cast<double>(s) / static_cast<double>(points - 1);
        const auto [lower, upper] = aunbc_bounds(x, query);
        out << x << "," << upper << "," << lower << "\n";
    }
}

}  // namespace riskscore
