#include "riskscore/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskscore/bounds.hpp"

namespace riskscore {

namespace {

void require_both_classes(const std::vector<int>& labels) {
    long long pos = 0;
    for (int y : labels) pos += (y == 1);
    if (pos == 0 || pos == static_cast<long long>(labels.size())) {
        throw DataError("degenerate labels: both classes required");
    }
}

double population_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return std::sqrt(var);
}

// round half away from zero
long long round_count(double x) { return static_cast<long long>(std::llround(x)); }

}  // namespace

PredictionVector synth_correlated(const std::vector<int>& labels, double r, RngStream& rng) {
    const std::size_t n = labels.size();
    if (n < 3) throw DataError("N >= 3 required for controlled-correlation predictions");
    require_both_classes(labels);
    if (!(r >= -1.0 && r <= 1.0)) throw ConfigError("correlation r must lie in [-1,1]");

    // Standardize the outcome.
    std::vector<double> y(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += labels[j];
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = labels[j] - mean;
    const double sd_y = population_std(y);
    for (double& v : y) v /= sd_y;

    // Gaussian noise orthogonal to y, scaled to unit standard deviation.
    std::vector<double> z(n);
    for (;;) {
        for (std::size_t j = 0; j < n; ++j) z[j] = rng.normal();
        double zy = 0.0, yy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            zy += z[j] * y[j];
            yy += y[j] * y[j];
        }
        for (std::size_t j = 0; j < n; ++j) z[j] -= zy / yy * y[j];
        const double sd_z = population_std(z);
        if (sd_z > 0.0) {
            for (double& v : z) v /= sd_z;
            break;
        }
        // Degenerate draw (measure zero); redraw from the same stream.
    }

    std::vector<double> s(n);
    const double noise = std::sqrt(1.0 - r * r);
    for (std::size_t j = 0; j < n; ++j) s[j] = r * y[j] + noise * z[j];

    // Affine rescale to [0,1]; positive slope, so correlation is preserved.
    const double lo = *std::min_element(s.begin(), s.end());
    for (double& v : s) v -= lo;
    const double hi = *std::max_element(s.begin(), s.end());
    for (double& v : s) v /= hi;
    return PredictionVector(std::move(s));
}

PredictionVector synth_boundary(const std::vector<int>& labels, double g,
                                const ThresholdGrid& grid, BoundaryDesign* design_out) {
    require_both_classes(labels);
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("target AUROC must lie in [0,1]");
    const int m = grid.inner_count();
    if (m < 1) throw ConfigError("boundary construction requires at least one inner threshold");

    const auto n = static_cast<long long>(labels.size());
    long long n_pos = 0;
    for (int v : labels) n_pos += (v == 1);
    const double a0 = static_cast<double>(n_pos) / static_cast<double>(n);
    const double b0 = 1.0 - a0;

    // Score every candidate k by the maximal AUNBC attainable at AUROC g;
    // the branch decides whether the negative mass stays at b0 or shrinks.
    int best_k = 1;
    double best_f = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= m; ++k) {
        const double pk = grid.threshold(k);
        const double cum = p_cumulative(grid, k);
        double b1;
        if (g <= 1.0 - b0 * cum / ((1.0 - pk) * a0)) {
            b1 = b0;
        } else {
            b1 = std::sqrt((1.0 - pk) * a0 * b0 * (1.0 - g) / cum);
        }
        const double ak = b1 > 0.0 ? a0 - (1.0 - g) * a0 * b0 / b1 : a0;
        const double f = a0 * pk + ak * (1.0 - pk) - b1 * cum;
        if (f > best_f) {  // ties keep the smallest k
            best_f = f;
            best_k = k;
        }
    }

    // Re-derive the attaining masses for the chosen K.
    const double pk = grid.threshold(best_k);
    const double cum = p_cumulative(grid, best_k);
    double b1;
    if (g <= 1.0 - b0 * cum / ((1.0 - pk) * a0)) {
        b1 = b0;
    } else {
        b1 = std::sqrt((1.0 - pk) * a0 * b0 * (1.0 - g) / cum);
    }
    const double ak = b1 > 0.0 ? a0 - (1.0 - g) * a0 * b0 / b1 : a0;

    long long pos_at_one = round_count(static_cast<double>(n) * ak);
    pos_at_one = std::clamp(pos_at_one, 0LL, n_pos);
    long long neg_at_pk = round_count(static_cast<double>(n) * b1);
    neg_at_pk = std::clamp(neg_at_pk, 0LL, n - n_pos);

    // Negatives: the first neg_at_pk (in index order) sit at p_K, the rest
    // at 0 where they cost nothing. Positives: the first pos_at_one sit at
    // 1, the rest at p_{K-1}.
    std::vector<double> s(labels.size(), 0.0);
    const double p_below = grid.threshold(best_k - 1);
    long long placed_pos = 0, placed_neg = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] == 1) {
            s[j] = placed_pos < pos_at_one ? 1.0 : p_below;
            ++placed_pos;
        } else {
            s[j] = placed_neg < neg_at_pk ? pk : 0.0;
            ++placed_neg;
        }
    }
    if (design_out != nullptr) {
        design_out->k = best_k;
        design_out->positive_mass = ak;
        design_out->negative_mass = b1;
        design_out->positives_at_one = pos_at_one;
        design_out->negatives_at_pk = neg_at_pk;
    }
    return PredictionVector(std::move(s));
}

}  // namespace riskscore
