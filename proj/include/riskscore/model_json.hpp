#pragma once

#include <string>

#include "riskscore/types.hpp"

namespace riskscore {

// Fixed-field-order model document: version, feature_names, coefficients,
// intercepts, thresholds, weights, risk_levels, provenance. Integer fields
// are emitted without a decimal point.
std::string model_to_json(const ScoreModel& model, const SolverConfig& config,
                          const std::string& solver_name);

struct LoadedModel {
    ScoreModel model;
    SolverConfig config;
    std::string solver_name;
};

LoadedModel model_from_json(const std::string& text);

void save_model(const std::string& path, const ScoreModel& model, const SolverConfig& config,
                const std::string& solver_name);
LoadedModel load_model(const std::string& path);

}  // namespace riskscore
