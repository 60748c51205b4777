#include "riskscore/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace riskscore {

namespace {

std::vector<double> spacing_weights(const std::vector<double>& inner) {
    std::vector<double> w(inner.size() + 1);
    double prev = 0.0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        w[i] = inner[i] - prev;
        prev = inner[i];
    }
    w.back() = 1.0 - prev;
    return w;
}

}  // namespace

ThresholdGrid::ThresholdGrid(std::vector<double> inner_thresholds)
    : ThresholdGrid(std::move(inner_thresholds), {}) {}

ThresholdGrid::ThresholdGrid(std::vector<double> inner_thresholds, std::vector<double> weights)
    : inner_(std::move(inner_thresholds)), weights_(std::move(weights)) {
    double prev = 0.0;
    for (std::size_t i = 0; i < inner_.size(); ++i) {
        const double p = inner_[i];
        if (!std::isfinite(p) || p <= prev || p >= 1.0) {
            std::ostringstream msg;
            msg << "thresholds must be strictly increasing in (0,1); offending p_" << (i + 1)
                << " = " << p;
            throw ConfigError(msg.str());
        }
        prev = p;
    }
    if (weights_.empty()) {
        weights_ = spacing_weights(inner_);
    }
    if (weights_.size() != inner_.size() + 1) {
        throw ConfigError("weight vector must have one entry per threshold p_0..p_M");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0)) {
            std::ostringstream msg;
            msg << "weights must be nonnegative; offending w_" << i << " = " << weights_[i];
            throw ConfigError(msg.str());
        }
        sum += weights_[i];
    }
    // Rejected rather than renormalized so downstream metric values are
    // reproducible bit-for-bit.
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "weights must sum to 1 within 1e-12; got " << sum;
        throw ConfigError(msg.str());
    }
}

double ThresholdGrid::threshold(int i) const {
    if (i < 0 || i > inner_count() + 1) {
        throw ConfigError("threshold index out of range");
    }
    if (i == 0) return 0.0;
    if (i == inner_count() + 1) return 1.0;
    return inner_[static_cast<std::size_t>(i - 1)];
}

int ThresholdGrid::bin_of(double score) const {
    // Bins are closed below and open above; the top bin absorbs score == 1.
    // Counting inner thresholds <= score places boundary scores in the bin
    // opening at that threshold.
    auto it = std::upper_bound(inner_.begin(), inner_.end(), score);
    return static_cast<int>(it - inner_.begin());
}

BinaryDataset validate_dataset(std::vector<double> features, std::size_t n_cols,
                               std::vector<int> labels, std::vector<std::string> names) {
    const std::size_t n = labels.size();
    if (n == 0) throw DataError("N >= 1 required");
    if (n_cols == 0) throw DataError("P >= 1 required");
    if (features.size() != n * n_cols) {
        std::ostringstream msg;
        msg << "dimension mismatch: " << features.size() << " feature values for " << n
            << " rows x " << n_cols << " columns";
        throw DataError(msg.str());
    }
    if (!names.empty() && names.size() != n_cols) {
        throw DataError("dimension mismatch: feature name count does not match column count");
    }
    if (names.empty()) {
        for (std::size_t k = 0; k < n_cols; ++k) names.push_back("x" + std::to_string(k + 1));
    }

    BinaryDataset ds;
    for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] != 0 && labels[j] != 1) {
            std::ostringstream msg;
            msg << "non-binary label at row " << j;
            throw DataError(msg.str());
        }
        for (std::size_t k = 0; k < n_cols; ++k) {
            if (!std::isfinite(features[j * n_cols + k])) {
                std::ostringstream msg;
                msg << "non-finite feature value at row " << j << ", column " << k << " ("
                    << names[k] << ")";
                throw DataError(msg.str());
            }
        }
        if (labels[j] == 1) {
            ++ds.n_pos_;
        } else {
            ++ds.n_neg_;
        }
    }
    ds.features_ = std::move(features);
    ds.n_cols_ = n_cols;
    ds.labels_ = std::move(labels);
    ds.names_ = std::move(names);
    return ds;
}

PredictionVector::PredictionVector(std::vector<double> scores) : scores_(std::move(scores)) {
    for (std::size_t j = 0; j < scores_.size(); ++j) {
        if (!(scores_[j] >= 0.0 && scores_[j] <= 1.0)) {
            std::ostringstream msg;
            msg << "prediction outside [0,1] at row " << j << ": " << scores_[j];
            throw DataError(msg.str());
        }
    }
}

std::vector<CoefficientBound> SolverConfig::symmetric_bounds(std::size_t p, long long cap) {
    if (cap < 0) throw ConfigError("coefficient cap must be nonnegative");
    return std::vector<CoefficientBound>(p, CoefficientBound{-cap, cap});
}

void SolverConfig::check(std::size_t n_features) const {
    if (!(c0 >= 0.0)) throw ConfigError("c0 must be nonnegative");
    if (lambda_bounds.size() != n_features) {
        throw ConfigError("lambda_bounds must have one [lo,hi] pair per feature");
    }
    for (std::size_t k = 0; k < lambda_bounds.size(); ++k) {
        if (lambda_bounds[k].lo > lambda_bounds[k].hi) {
            std::ostringstream msg;
            msg << "lambda bound lo > hi for feature " << k;
            throw ConfigError(msg.str());
        }
    }
    if (t_max <= 0) throw ConfigError("t_max must be positive");
    if (!(sa_initial_temp >= 0.0) || !(sa_min_temp >= 0.0) || !(sa_cooling_rate >= 0.0)) {
        throw ConfigError("annealing temperatures and cooling rate must be nonnegative");
    }
    if (sa_min_temp > sa_initial_temp) {
        throw ConfigError("sa_min_temp must not exceed sa_initial_temp");
    }
    if (sa_iters_per_temp <= 0) throw ConfigError("sa_iters_per_temp must be positive");
    if (restarts <= 0) throw ConfigError("restarts must be positive");
}

void ScoreModel::check() const {
    const std::size_t bins = static_cast<std::size_t>(grid.bin_count());
    if (intercepts.size() != bins) {
        throw ConfigError("model must carry M+1 intercepts");
    }
    if (risk_levels.size() != bins) {
        throw ConfigError("model must carry M+1 risk levels");
    }
    if (!feature_names.empty() && feature_names.size() != coefficients.size()) {
        throw ConfigError("feature name count does not match coefficient count");
    }
    for (std::size_t i = 1; i < intercepts.size(); ++i) {
        if (intercepts[i - 1] > intercepts[i]) {
            throw ConfigError("intercepts must be nondecreasing");
        }
    }
    for (std::size_t i = 0; i < risk_levels.size(); ++i) {
        const double lo = grid.threshold(static_cast<int>(i));
        const double hi = grid.threshold(static_cast<int>(i) + 1);
        if (!(risk_levels[i] >= lo && risk_levels[i] < hi)) {
            std::ostringstream msg;
            msg << "risk level q_" << i << " = " << risk_levels[i] << " outside [" << lo << ", "
                << hi << ")";
            throw ConfigError(msg.str());
        }
    }
}

}  // namespace riskscore
