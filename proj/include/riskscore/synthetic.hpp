#pragma once

#include <vector>

#include "riskscore/rng.hpp"
#include "riskscore/types.hpp"

namespace riskscore {

// Controlled-correlation predictions: standardized labels plus orthogonal
// Gaussian noise mixed as r*y + sqrt(1-r^2)*z, affinely rescaled to [0,1],
// so corr(scores, labels) equals r up to rounding. Requires both classes
// and N >= 3.
PredictionVector synth_correlated(const std::vector<int>& labels, double r, RngStream& rng);

/// The k index, masses, and score levels behind a boundary-attaining vector;
/// exposed for tests probing the construction.
struct BoundaryDesign {
    int k = 0;                    // chosen envelope index K
    double positive_mass = 0.0;   // a_K
    double negative_mass = 0.0;   // b_1
    long long positives_at_one = 0;
    long long negatives_at_pk = 0;
};

// Boundary-attaining predictions for a target AUROC g: evaluates the
// candidate maximal AUNBC for every k, picks the argmax K (smallest on
// ties), then realizes the attaining configuration: round(N*b_1) negatives
// at p_K (the rest at 0) and round(N*a_K) positives at 1 (the rest at
// p_{K-1}), both in index order.
PredictionVector synth_boundary(const std::vector<int>& labels, double g,
                                const ThresholdGrid& grid,
                                BoundaryDesign* design_out = nullptr);

}  // namespace riskscore
