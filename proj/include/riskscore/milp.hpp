#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskscore/types.hpp"

namespace riskscore {

struct MilpTerm {
    std::string var;
    double coef = 0.0;
};

enum class RowSense { LessEqual, GreaterEqual };

struct MilpRow {
    std::string name;
    std::vector<MilpTerm> terms;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

enum class VarKind { Binary, Integer };

struct MilpVar {
    std::string name;
    VarKind kind = VarKind::Binary;
    long long lo = 0;
    long long hi = 1;
};

/// The mixed-integer formulation of the training problem: indicator
/// binaries phi_{i,j} per (threshold, sample), selection binaries alpha_k,
/// bounded integer coefficients lam_k, and monotone integer intercepts t_i,
/// tied together by per-sample big-M rows.
struct MilpExport {
    std::vector<MilpVar> variables;
    std::vector<MilpTerm> objective;  // minimized
    std::vector<MilpRow> constraints;
    std::vector<double> big_m;  // H_j per sample
    double gamma = 0.0;
    double c0 = 0.0;
    std::size_t positive_rows = 0;
    std::size_t negative_rows = 0;
    std::size_t link_rows = 0;
    std::size_t monotonicity_rows = 0;
};

// Builds the full formulation. gamma defaults to 0.5 when every feature
// value is an integer (any value in (0,1) separates integer score-intercept
// gaps); otherwise it must be supplied.
MilpExport milp_export(const BinaryDataset& data, const ThresholdGrid& grid,
                       const SolverConfig& config,
                       std::optional<double> gamma = std::nullopt);

// Renders LP file text (objective, rows, bounds, generals, binaries).
std::string write_lp(const MilpExport& milp);

struct VerifyResult {
    double milp_objective = 0.0;       // formulation objective at implied phi
    double recomputed_objective = 0.0; // weighted_objective from raw counts
    bool agrees = false;               // |difference| <= 1e-9
};

// Evaluates a candidate (lambda, T) both through the exported formulation
// (with the implied indicator values) and through the metric route, and
// checks the two objectives agree.
VerifyResult verify_solution(const BinaryDataset& data, const ThresholdGrid& grid,
                             const SolverConfig& config, std::span<const long long> lambda,
                             std::span<const long long> intercepts);

}  // namespace riskscore
