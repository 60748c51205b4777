#pragma once

#include <utility>

#include "riskscore/types.hpp"

namespace riskscore {

/// Prevalence plus a threshold grid; the inputs the theoretical
/// discrimination/utility envelope depends on.
struct EnvelopeQuery {
    double a0;
    ThresholdGrid grid;

    EnvelopeQuery(double prevalence, ThresholdGrid g) : a0(prevalence), grid(std::move(g)) {
        if (!(a0 > 0.0 && a0 < 1.0)) {
            throw ConfigError("prevalence a0 must lie strictly inside (0,1)");
        }
    }
};

// P_k = sum_{i=1}^{k} (p_{i+1} - p_i) p_i / (1 - p_i) for 1 <= k <= M.
double p_cumulative(const ThresholdGrid& grid, int k);

// Piecewise upper-envelope component A_k: the largest AUNBC attainable at a
// given binned AUROC value x in [0,1].
double a_k(double x, double a0, const ThresholdGrid& grid, int k);

// AUNBC bounds at a given AUROC: the lower bound a0*p_1 - (1-a0)*P_M is
// constant in AUROC; the upper bound is max_k A_k(AUROC).
std::pair<double, double> aunbc_bounds(double auroc, const EnvelopeQuery& query);

// Inverse of A_k on matching branches: the smallest AUROC consistent with a
// given AUNBC value y. Values of y below the AUNBC lower bound evaluate by
// the linear branch; y above a0 is a domain violation.
double b_k(double y, double a0, const ThresholdGrid& grid, int k);

// max(min_k B_k(aunbc), 0): the AUROC lower bound implied by utility.
double auroc_lower(double aunbc, const EnvelopeQuery& query);

// Finite-sample margin between empirical and expected weighted negative net
// benefit: sum_i (w_i / (1 - p_i)) * sqrt((ln|L| + ln|T0| - ln delta) / (2n)).
double generalization_margin(long long size_l, long long size_t0, double delta, long long n,
                             const ThresholdGrid& grid);

}  // namespace riskscore
