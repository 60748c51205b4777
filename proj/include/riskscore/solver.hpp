#pragma once

#include <optional>
#include <span>
#include <vector>

#include "riskscore/types.hpp"

namespace riskscore {

struct Prediction {
    double score = 0.0;  // integer-valued for integer features
    double risk = 0.0;
};

// Raw linear score x . coefficients.
double linear_score(const ScoreModel& model, std::span<const double> row);

// Band index keyed to T_1..T_M: scores below T_1 map to band 0, scores at or
// above T_M to band M; T_0 does not partition the risk map.
int band_of_score(const ScoreModel& model, double score);

double risk_for_score(const ScoreModel& model, double score);

Prediction predict(const ScoreModel& model, std::span<const double> row);

// Model predictions for every row of a dataset.
PredictionVector predict_all(const ScoreModel& model, const BinaryDataset& data);

/// Greedy stage-wise intercept fit for fixed coefficients.
struct InterceptFit {
    std::vector<long long> intercepts;  // T_0..T_M, nondecreasing
    double loss = 0.0;                  // weighted objective incl. the l0 term
    std::vector<double> stage_net_benefit;  // unweighted NB^i per threshold
};

// Candidate intercepts are the floors of the linear scores plus one
// sentinel; each stage maximizes the unweighted net benefit at p_i over
// candidates at or above the previous stage's choice (ties -> smallest T).
// Weights enter once, in the loss line.
InterceptFit find_optimal_t(std::span<const double> scores, const std::vector<int>& labels,
                            const ThresholdGrid& grid, double c0, long long num_nonzero);

struct TrainResult {
    ScoreModel model;
    double loss = 0.0;
    std::vector<double> trace;     // best loss after each temperature level
    long long evaluations = 0;     // intercept-fit calls
};

// Simulated annealing over the coefficient box with linear cooling;
// restarts run independent chains on seeds derived from config.seed and the
// best (ties -> lexicographically smallest coefficients) wins. Risk levels
// in the returned model are bin midpoints; calibrate separately.
TrainResult sa_train(const BinaryDataset& data, const ThresholdGrid& grid,
                     const SolverConfig& config,
                     const std::optional<std::vector<long long>>& initial = std::nullopt);

// Scores every coefficient vector in the box with the same intercept rule
// as the annealer and returns the global minimizer over that family
// (ties -> lexicographically smallest).
TrainResult exact_enumerate(const BinaryDataset& data, const ThresholdGrid& grid,
                            const SolverConfig& config, std::uint64_t cap = 1'000'000);

struct RoundingDiagnostics {
    double gamma_min = 0.0;       // min_{i,j} |x_j.rho - t_i| / ||rho||_inf
    double x_norm_inf = 0.0;      // max_j ||x_j||_1
    long long t_needed = 0;       // ceil(cap * x_norm_inf)
    bool condition_holds = false; // cap > (x_norm_inf + 1) / (2 gamma_min)
};

struct RoundedModel {
    std::vector<long long> coefficients;
    std::vector<long long> intercepts;
    RoundingDiagnostics diagnostics;
};

// Nearest-integer rounding of a real-valued linear baseline onto the
// integer grid scaled by cap / ||rho||_inf. When the diagnostics confirm
// the margin condition, every sign(x_j.lambda - T_i) matches the baseline,
// so the weighted net benefit cannot drop.
RoundedModel round_real_model(std::span<const double> rho, std::span<const double> t,
                              const BinaryDataset& data, long long lambda_cap);

}  // namespace riskscore
