#include "riskscore/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "riskscore/metrics.hpp"
#include "riskscore/rng.hpp"

namespace riskscore {

namespace {

std::vector<double> midpoint_risks(const ThresholdGrid& grid) {
    std::vector<double> q(static_cast<std::size_t>(grid.bin_count()));
    for (int i = 0; i <= grid.inner_count(); ++i) {
        q[static_cast<std::size_t>(i)] = (grid.threshold(i) + grid.threshold(i + 1)) / 2.0;
    }
    return q;
}

long long nonzero_count(const std::vector<long long>& lambda) {
    long long c = 0;
    for (long long v : lambda) c += (v != 0);
    return c;
}

std::vector<double> score_all(const BinaryDataset& data,
                              const std::vector<long long>& lambda) {
    std::vector<double> scores(data.n_rows(), 0.0);
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        const auto row = data.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            s += row[k] * static_cast<double>(lambda[k]);
        }
        scores[j] = s;
    }
    return scores;
}

struct ChainResult {
    std::vector<long long> lambda;
    std::vector<long long> intercepts;
    double loss = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    long long evaluations = 0;
};

// Annealing chain with incremental score updates: a single-coordinate move
// shifts every score by delta * x_{j,i}.
ChainResult run_chain(const BinaryDataset& data, const ThresholdGrid& grid,
                      const SolverConfig& config, const std::vector<long long>& initial,
                      std::uint64_t chain_index) {
    const std::size_t p = data.n_cols();
    RngStream rng = RngStream::derived(config.seed, chain_index);

    std::vector<long long> lambda = initial;
    std::vector<double> scores = score_all(data, lambda);
    long long nnz = nonzero_count(lambda);

    InterceptFit fit = find_optimal_t(scores, data.labels(), grid, config.c0, nnz);
    double loss = fit.loss;

    ChainResult best;
    best.lambda = lambda;
    best.intercepts = fit.intercepts;
    best.loss = loss;
    best.evaluations = 1;

    std::vector<double> cand_scores(scores.size());
    std::vector<long long> intercepts = fit.intercepts;

    double t = config.sa_initial_temp;
    while (t > config.sa_min_temp) {
        for (int iter = 0; iter < config.sa_iters_per_temp; ++iter) {
            // Coordinate with at least two admissible values.
            std::size_t i;
            do {
                i = static_cast<std::size_t>(rng.uniform_int(p));
            } while (config.lambda_bounds[i].hi == config.lambda_bounds[i].lo);
            const auto [lo, hi] = config.lambda_bounds[i];

            // Uniform over the bound set minus the current value.
            const auto set_size = static_cast<std::uint64_t>(hi - lo + 1);
            long long new_val =
                lo + static_cast<long long>(rng.uniform_int(set_size - 1));
            if (new_val >= lambda[i]) ++new_val;

            const double delta = static_cast<double>(new_val - lambda[i]);
            for (std::size_t j = 0; j < scores.size(); ++j) {
                cand_scores[j] = scores[j] + delta * data.value(j, i);
            }
            const long long cand_nnz = nnz + (new_val != 0) - (lambda[i] != 0);
            InterceptFit cand =
                find_optimal_t(cand_scores, data.labels(), grid, config.c0, cand_nnz);
            ++best.evaluations;

            if (cand.loss < loss) {
                lambda[i] = new_val;
                scores.swap(cand_scores);
                nnz = cand_nnz;
                loss = cand.loss;
                intercepts = cand.intercepts;
                if (loss < best.loss) {
                    best.loss = loss;
                    best.lambda = lambda;
                    best.intercepts = intercepts;
                }
            } else if (rng.uniform() < std::exp((loss - cand.loss) / t)) {
                lambda[i] = new_val;
                scores.swap(cand_scores);
                nnz = cand_nnz;
                loss = cand.loss;
                intercepts = cand.intercepts;
            }
        }
        best.trace.push_back(best.loss);
        t -= config.sa_cooling_rate;
    }
    return best;
}

bool better_than(const ChainResult& a, const ChainResult& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return std::lexicographical_compare(a.lambda.begin(), a.lambda.end(), b.lambda.begin(),
                                        b.lambda.end());
}

TrainResult to_train_result(ChainResult chain, const BinaryDataset& data,
                            const ThresholdGrid& grid) {
    TrainResult result{ScoreModel{std::move(chain.lambda), std::move(chain.intercepts),
                                  midpoint_risks(grid), grid, data.feature_names()},
                       chain.loss, std::move(chain.trace), chain.evaluations};
    result.model.check();
    return result;
}

}  // namespace

double linear_score(const ScoreModel& model, std::span<const double> row) {
    if (row.size() != model.coefficients.size()) {
        throw DataError("feature row length does not match coefficient count");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        s += row[k] * static_cast<double>(model.coefficients[k]);
    }
    return s;
}

int band_of_score(const ScoreModel& model, double score) {
    const int m = model.grid.inner_count();
    int band = 0;
    for (int i = 1; i <= m; ++i) {
        if (score >= static_cast<double>(model.intercepts[static_cast<std::size_t>(i)])) {
            band = i;
        } else {
            break;
        }
    }
    return band;
}

double risk_for_score(const ScoreModel& model, double score) {
    return model.risk_levels[static_cast<std::size_t>(band_of_score(model, score))];
}

Prediction predict(const ScoreModel& model, std::span<const double> row) {
    const double score = linear_score(model, row);
    return Prediction{score, risk_for_score(model, score)};
}

PredictionVector predict_all(const ScoreModel& model, const BinaryDataset& data) {
    std::vector<double> risks(data.n_rows());
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        risks[j] = predict(model, data.row(j)).risk;
    }
    return PredictionVector(std::move(risks));
}

InterceptFit find_optimal_t(std::span<const double> scores, const std::vector<int>& labels,
                            const ThresholdGrid& grid, double c0, long long num_nonzero) {
    if (scores.empty()) throw DataError("empty scores");
    if (scores.size() != labels.size()) {
        throw DataError("length mismatch between scores and labels");
    }
    const auto n = static_cast<long long>(scores.size());
    const int m = grid.inner_count();

    // Candidate set: sorted unique floors plus one sentinel above the top.
    std::vector<long long> cand;
    cand.reserve(scores.size() + 1);
    for (double s : scores) {
        if (!std::isfinite(s)) throw DataError("non-finite linear score");
        cand.push_back(static_cast<long long>(std::floor(s)));
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    cand.push_back(cand.back() + 1);

    std::vector<double> pos, neg;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        if (labels[j] == 1) {
            pos.push_back(scores[j]);
        } else {
            neg.push_back(scores[j]);
        }
    }
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    // Counts of scores >= candidate, per class.
    std::vector<long long> tp_at(cand.size()), fp_at(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c) {
        const auto threshold = static_cast<double>(cand[c]);
        tp_at[c] = static_cast<long long>(
            pos.end() - std::lower_bound(pos.begin(), pos.end(), threshold));
        fp_at[c] = static_cast<long long>(
            neg.end() - std::lower_bound(neg.begin(), neg.end(), threshold));
    }

    InterceptFit fit;
    fit.intercepts.assign(static_cast<std::size_t>(m) + 1, 0);
    fit.stage_net_benefit.assign(static_cast<std::size_t>(m) + 1, 0.0);
    fit.intercepts[0] = cand.front();
    fit.stage_net_benefit[0] =
        net_benefit_counts(static_cast<long long>(pos.size()),
                           static_cast<long long>(neg.size()), n, grid.threshold(0));

    std::size_t start = 0;
    for (int i = 1; i <= m; ++i) {
        const double p = grid.threshold(i);
        double best_nb = -std::numeric_limits<double>::infinity();
        std::size_t best_c = start;
        for (std::size_t c = start; c < cand.size(); ++c) {
            const double nb = net_benefit_counts(tp_at[c], fp_at[c], n, p);
            if (nb > best_nb) {  // ties keep the smallest candidate
                best_nb = nb;
                best_c = c;
            }
        }
        fit.intercepts[static_cast<std::size_t>(i)] = cand[best_c];
        fit.stage_net_benefit[static_cast<std::size_t>(i)] = best_nb;
        start = best_c;
    }

    // Weights applied exactly once, here.
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        acc += grid.weight(i) * fit.stage_net_benefit[static_cast<std::size_t>(i)];
    }
    fit.loss = -acc + c0 * static_cast<double>(num_nonzero);
    return fit;
}

TrainResult sa_train(const BinaryDataset& data, const ThresholdGrid& grid,
                     const SolverConfig& config,
                     const std::optional<std::vector<long long>>& initial) {
    config.check(data.n_cols());

    bool any_movable = false;
    for (const auto& b : config.lambda_bounds) {
        if (b.hi > b.lo) {
            any_movable = true;
            break;
        }
    }
    if (!any_movable) {
        throw ConfigError("every coefficient bound set has a single value; no moves possible");
    }

    std::vector<long long> start(data.n_cols(), 0);
    if (initial.has_value()) {
        if (initial->size() != data.n_cols()) {
            throw ConfigError("initial coefficient vector length does not match feature count");
        }
        for (std::size_t k = 0; k < start.size(); ++k) {
            if ((*initial)[k] < config.lambda_bounds[k].lo ||
                (*initial)[k] > config.lambda_bounds[k].hi) {
                throw ConfigError("initial coefficient outside its bound set");
            }
        }
        start = *initial;
    } else {
        // Zero start, clamped into the box when 0 is not admissible.
        for (std::size_t k = 0; k < start.size(); ++k) {
            start[k] = std::clamp(0LL, config.lambda_bounds[k].lo, config.lambda_bounds[k].hi);
        }
    }

    std::vector<std::future<ChainResult>> futures;
    futures.reserve(static_cast<std::size_t>(config.restarts));
    for (int chain = 0; chain < config.restarts; ++chain) {
        futures.push_back(std::async(std::launch::async, run_chain, std::cref(data),
                                     std::cref(grid), std::cref(config), std::cref(start),
                                     static_cast<std::uint64_t>(chain)));
    }

    ChainResult best;
    long long total_evaluations = 0;
    bool have_best = false;
    for (auto& f : futures) {
        ChainResult r = f.get();
        total_evaluations += r.evaluations;
        if (!have_best || better_than(r, best)) {
            best = std::move(r);
            have_best = true;
        }
    }
    best.evaluations = total_evaluations;
    return to_train_result(std::move(best), data, grid);
}

TrainResult exact_enumerate(const BinaryDataset& data, const ThresholdGrid& grid,
                            const SolverConfig& config, std::uint64_t cap) {
    config.check(data.n_cols());
    const std::size_t p = data.n_cols();

    std::uint64_t combinations = 1;
    for (const auto& b : config.lambda_bounds) {
        const auto size = static_cast<std::uint64_t>(b.hi - b.lo + 1);
        if (combinations > cap / size) {
            throw ConfigError("enumeration cap exceeded for the configured coefficient box");
        }
        combinations *= size;
    }

    std::vector<long long> lambda(p);
    for (std::size_t k = 0; k < p; ++k) lambda[k] = config.lambda_bounds[k].lo;

    ChainResult best;
    // Lexicographic ascending order (last coordinate fastest), so a strict
    // improvement rule leaves the lexicographically smallest optimum.
    bool done = false;
    while (!done) {
        const std::vector<double> scores = score_all(data, lambda);
        InterceptFit fit =
            find_optimal_t(scores, data.labels(), grid, config.c0, nonzero_count(lambda));
        ++best.evaluations;
        if (fit.loss < best.loss) {
            best.loss = fit.loss;
            best.lambda = lambda;
            best.intercepts = fit.intercepts;
        }
        // Odometer increment.
        std::size_t k = p;
        while (k > 0) {
            --k;
            if (lambda[k] < config.lambda_bounds[k].hi) {
                ++lambda[k];
                break;
            }
            lambda[k] = config.lambda_bounds[k].lo;
            if (k == 0) done = true;
        }
    }
    best.trace.push_back(best.loss);
    return to_train_result(std::move(best), data, grid);
}

RoundedModel round_real_model(std::span<const double> rho, std::span<const double> t,
                              const BinaryDataset& data, long long lambda_cap) {
    if (rho.size() != data.n_cols()) {
        throw ConfigError("baseline coefficient count does not match feature count");
    }
    if (lambda_cap <= 0) throw ConfigError("lambda cap must be positive");
    double rho_inf = 0.0;
    for (double v : rho) rho_inf = std::max(rho_inf, std::abs(v));
    if (rho_inf == 0.0) throw ConfigError("baseline coefficient vector is zero");

    double score_cap = 0.0;
    std::vector<double> baseline_scores(data.n_rows(), 0.0);
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        const auto row = data.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) s += row[k] * rho[k];
        baseline_scores[j] = s;
        score_cap = std::max(score_cap, std::abs(s));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0 && t[i] < t[i - 1]) {
            throw ConfigError("baseline intercepts must be nondecreasing");
        }
        if (std::abs(t[i]) > score_cap) {
            throw ConfigError("baseline intercept outside the score range");
        }
    }

    const double scale = static_cast<double>(lambda_cap) / rho_inf;
    RoundedModel out;
    out.coefficients.reserve(rho.size());
    for (double v : rho) {
        out.coefficients.push_back(static_cast<long long>(std::floor(v * scale + 0.5)));
    }
    out.intercepts.reserve(t.size());
    for (double v : t) {
        out.intercepts.push_back(static_cast<long long>(std::floor(v * scale + 0.5)));
    }

    double gamma_min = std::numeric_limits<double>::infinity();
    double x_norm = 0.0;
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        const auto row = data.row(j);
        double l1 = 0.0;
        for (double v : row) l1 += std::abs(v);
        x_norm = std::max(x_norm, l1);
        for (double ti : t) {
            gamma_min = std::min(gamma_min, std::abs(baseline_scores[j] - ti) / rho_inf);
        }
    }
    out.diagnostics.gamma_min = gamma_min;
    out.diagnostics.x_norm_inf = x_norm;
    out.diagnostics.t_needed =
        static_cast<long long>(std::ceil(static_cast<double>(lambda_cap) * x_norm));
    out.diagnostics.condition_holds =
        gamma_min > 0.0 && static_cast<double>(lambda_cap) > (x_norm + 1.0) / (2.0 * gamma_min);
    return out;
}

}  // namespace riskscore
