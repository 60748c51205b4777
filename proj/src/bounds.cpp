#include "riskscore/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace riskscore {

namespace {

void require_k(const ThresholdGrid& grid, int k) {
    if (k < 1 || k > grid.inner_count()) {
        throw ConfigError("envelope index k out of range 1..M");
    }
}

}  // namespace

double p_cumulative(const ThresholdGrid& grid, int k) {
    require_k(grid, k);
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) {
        const double p = grid.threshold(i);
        acc += grid.spacing(i) * p / (1.0 - p);
    }
    return acc;
}

double a_k(double x, double a0, const ThresholdGrid& grid, int k) {
    require_k(grid, k);
    const double pk = grid.threshold(k);
    const double cum = p_cumulative(grid, k);
    const double branch_point = 1.0 - (1.0 - a0) * cum / ((1.0 - pk) * a0);
    if (x <= branch_point) {
        return -a0 * (1.0 - pk) * (1.0 - x) + a0 - (1.0 - a0) * cum;
    }
    return a0 - 2.0 * std::sqrt(cum * (1.0 - pk) * a0 * (1.0 - a0) * (1.0 - x));
}

std::pair<double, double> aunbc_bounds(double auroc, const EnvelopeQuery& query) {
    const int m = query.grid.inner_count();
    if (m < 1) throw ConfigError("envelope requires at least one inner threshold");
    const double lower =
        query.a0 * query.grid.threshold(1) - (1.0 - query.a0) * p_cumulative(query.grid, m);
    double upper = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= m; ++k) {
        upper = std::max(upper, a_k(auroc, query.a0, query.grid, k));
    }
    return {lower, upper};
}

double b_k(double y, double a0, const ThresholdGrid& grid, int k) {
    require_k(grid, k);
    if (y > a0 + 1e-12) {
        throw std::domain_error("AUNBC above prevalence is outside the envelope domain");
    }
    const double pk = grid.threshold(k);
    const double cum = p_cumulative(grid, k);
    if (y <= a0 - 2.0 * (1.0 - a0) * cum) {
        return 1.0 - (a0 - y - (1.0 - a0) * cum) / (a0 * (1.0 - pk));
    }
    const double gap = a0 - y;
    return 1.0 - gap * gap / (4.0 * cum * (1.0 - pk) * a0 * (1.0 - a0));
}

double auroc_lower(double aunbc, const EnvelopeQuery& query) {
    const int m = query.grid.inner_count();
    if (m < 1) throw ConfigError("envelope requires at least one inner threshold");
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= m; ++k) {
        lo = std::min(lo, b_k(aunbc, query.a0, query.grid, k));
    }
    return std::max(lo, 0.0);
}

double generalization_margin(long long size_l, long long size_t0, double delta, long long n,
                             const ThresholdGrid& grid) {
    if (size_l < 1 || size_t0 < 1) throw ConfigError("hypothesis set sizes must be >= 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in (0,1]");
    if (n < 1) throw ConfigError("sample count must be >= 1");
    const double tail = std::sqrt((std::log(static_cast<double>(size_l)) +
                                   std::log(static_cast<double>(size_t0)) - std::log(delta)) /
                                  (2.0 * static_cast<double>(n)));
    double acc = 0.0;
    for (int i = 0; i <= grid.inner_count(); ++i) {
        acc += grid.weight(i) / (1.0 - grid.threshold(i)) * tail;
    }
    return acc;
}

}  // namespace riskscore
