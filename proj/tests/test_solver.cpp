#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "riskscore/calibration.hpp"
#include "riskscore/metrics.hpp"
#include "riskscore/rng.hpp"
#include "riskscore/solver.hpp"

using namespace riskscore;

namespace {

BinaryDataset tiny_dataset() {
    return validate_dataset({1, 2, 3, 4}, 1, {0, 0, 1, 1}, {"x"});
}

SolverConfig tiny_config(long long cap = 1) {
    SolverConfig config;
    config.c0 = 0.001;
    config.lambda_bounds = SolverConfig::symmetric_bounds(1, cap);
    config.t_max = 50;
    return config;
}

// Stage-by-stage reference scan, written independently of find_optimal_t:
// recompute counts by brute force for every candidate.
std::vector<long long> direct_scan(const std::vector<double>& scores,
                                   const std::vector<int>& labels,
                                   const ThresholdGrid& grid) {
    std::vector<long long> cand;
    for (double s : scores) cand.push_back(static_cast<long long>(std::floor(s)));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    cand.push_back(cand.back() + 1);

    std::vector<long long> out(static_cast<std::size_t>(grid.inner_count()) + 1);
    out[0] = cand.front();
    long long previous = out[0];
    for (int i = 1; i <= grid.inner_count(); ++i) {
        const double p = grid.threshold(i);
        double best = -std::numeric_limits<double>::infinity();
        long long best_t = 0;
        for (long long t : cand) {
            if (t < previous) continue;
            long long tp = 0, fp = 0;
            for (std::size_t j = 0; j < scores.size(); ++j) {
                if (scores[j] >= static_cast<double>(t)) {
                    (labels[j] == 1 ? tp : fp) += 1;
                }
            }
            const double nb = static_cast<double>(tp) / static_cast<double>(scores.size()) -
                              static_cast<double>(fp) / static_cast<double>(scores.size()) *
                                  p / (1.0 - p);
            if (nb > best) {
                best = nb;
                best_t = t;
            }
        }
        out[static_cast<std::size_t>(i)] = best_t;
        previous = best_t;
    }
    return out;
}

}  // namespace

TEST_CASE("intercept fit on the four-sample instance") {
    const ThresholdGrid grid({0.5});
    const std::vector<double> scores{1, 2, 3, 4};
    const std::vector<int> labels{0, 0, 1, 1};
    const auto fit = find_optimal_t(scores, labels, grid, 0.001, 1);
    CHECK(fit.intercepts == std::vector<long long>{1, 3});
    CHECK(fit.loss == doctest::Approx(-0.499));
    CHECK(fit.stage_net_benefit[0] == 0.5);  // prevalence, exact

    SUBCASE("empty scores are rejected") {
        CHECK_THROWS_AS(find_optimal_t({}, {}, grid, 0.0, 0), DataError);
    }
}

TEST_CASE("intercept fit with no positives parks thresholds above the scores") {
    const ThresholdGrid grid({0.3, 0.7});
    const std::vector<double> scores{0, 1, 5, 2};
    const std::vector<int> labels{0, 0, 0, 0};
    const auto fit = find_optimal_t(scores, labels, grid, 0.01, 2);
    CHECK(fit.loss == doctest::Approx(0.02));  // c0 * nnz only
    for (int i = 1; i <= 2; ++i) {
        CHECK(fit.intercepts[static_cast<std::size_t>(i)] == 6);  // sentinel above max
        CHECK(fit.stage_net_benefit[static_cast<std::size_t>(i)] == 0.0);
    }
}

TEST_CASE("constant scores degenerate to treat-all or treat-none") {
    const ThresholdGrid grid({0.3, 0.7});
    const std::vector<double> scores{2, 2, 2, 2};
    SUBCASE("mostly positive favors treat-all below the odds break-even") {
        const std::vector<int> labels{1, 1, 1, 0};
        const auto fit = find_optimal_t(scores, labels, grid, 0.0, 0);
        // p = 0.3: NB(everyone) = 0.75 - 0.25*(3/7) > 0 -> keep T = 2.
        CHECK(fit.intercepts[1] == 2);
        // p = 0.7: NB(everyone) = 0.75 - 0.25*(7/3) > 0 as well.
        CHECK(fit.intercepts[2] == 2);
    }
    SUBCASE("mostly negative favors treat-none") {
        const std::vector<int> labels{1, 0, 0, 0};
        const auto fit = find_optimal_t(scores, labels, grid, 0.0, 0);
        // p = 0.3: NB(everyone) = 0.25 - 0.75*(3/7) < 0 -> T = 3 (nobody).
        CHECK(fit.intercepts[1] == 3);
        CHECK(fit.intercepts[2] == 3);
    }
}

TEST_CASE("intercepts are nondecreasing and match the direct scan") {
    RngStream rng(61);
    const ThresholdGrid grid({0.25, 0.5, 0.75});
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t j = 0; j < n; ++j) {
            // mix integer and fractional scores, negatives included
            scores[j] = static_cast<double>(static_cast<long long>(rng.uniform_int(21)) - 10) +
                        (rng.uniform_int(2) == 0 ? 0.0 : rng.uniform());
            labels[j] = rng.uniform() < 0.5 ? 1 : 0;
        }
        const auto fit = find_optimal_t(scores, labels, grid, 0.001, 2);
        for (std::size_t i = 1; i < fit.intercepts.size(); ++i) {
            CHECK(fit.intercepts[i - 1] <= fit.intercepts[i]);
        }
        CHECK(fit.intercepts == direct_scan(scores, labels, grid));
    }
}

TEST_CASE("annealing solves the four-sample instance with reference settings") {
    const ThresholdGrid grid({0.5});
    const auto data = tiny_dataset();
    SolverConfig config = tiny_config(1);
    config.seed = 9;
    const auto result = sa_train(data, grid, config);
    CHECK(result.loss == doctest::Approx(-0.499));
    CHECK(result.model.coefficients == std::vector<long long>{1});
    CHECK(result.model.intercepts == std::vector<long long>{1, 3});
    CHECK(result.evaluations > 1000);

    SUBCASE("the returned loss is self-consistent") {
        std::vector<double> scores(data.n_rows());
        for (std::size_t j = 0; j < data.n_rows(); ++j) {
            scores[j] = linear_score(result.model, data.row(j));
        }
        std::vector<double> t_real(result.model.intercepts.begin(),
                                   result.model.intercepts.end());
        const auto curve = confusion_from_scores(scores, data.labels(), t_real);
        long long nnz = 0;
        for (long long v : result.model.coefficients) nnz += (v != 0);
        CHECK(std::abs(weighted_objective(curve, grid, nnz, config.c0) - result.loss) <=
              1e-12);
    }
}

TEST_CASE("annealing bookkeeping") {
    const ThresholdGrid grid({0.5});
    const auto data = tiny_dataset();
    SolverConfig config = tiny_config(2);
    config.seed = 77;
    config.restarts = 3;

    SUBCASE("same seed, same result") {
        const auto a = sa_train(data, grid, config);
        const auto b = sa_train(data, grid, config);
        CHECK(a.loss == b.loss);
        CHECK(a.model.coefficients == b.model.coefficients);
        CHECK(a.model.intercepts == b.model.intercepts);
        CHECK(a.trace == b.trace);
        CHECK(a.evaluations == b.evaluations);
    }
    SUBCASE("the final best never exceeds the initial loss") {
        const std::vector<long long> initial{0};
        std::vector<double> zeros(data.n_rows(), 0.0);
        const auto start_fit = find_optimal_t(zeros, data.labels(), grid, config.c0, 0);
        const auto result = sa_train(data, grid, config, initial);
        CHECK(result.loss <= start_fit.loss);
        CHECK(!result.trace.empty());
        // the per-temperature trace is monotone nonincreasing
        for (std::size_t i = 1; i < result.trace.size(); ++i) {
            CHECK(result.trace[i] <= result.trace[i - 1]);
        }
    }
    SUBCASE("singleton bound boxes cannot move") {
        config.lambda_bounds = {{2, 2}};
        CHECK_THROWS_AS(sa_train(data, grid, config), ConfigError);
    }
    SUBCASE("initial point outside the box is rejected") {
        CHECK_THROWS_AS(sa_train(data, grid, config, std::vector<long long>{5}), ConfigError);
    }
}

TEST_CASE("exhaustive enumeration") {
    const ThresholdGrid grid({0.5});
    const auto data = tiny_dataset();

    SUBCASE("three-point box") {
        const auto result = exact_enumerate(data, grid, tiny_config(1));
        CHECK(result.model.coefficients == std::vector<long long>{1});
        CHECK(result.loss == doctest::Approx(-0.499));
        CHECK(result.evaluations == 3);
    }
    SUBCASE("a huge sparsity penalty forces the zero model") {
        SolverConfig config = tiny_config(1);
        config.c0 = 10.0;
        const auto result = exact_enumerate(data, grid, config);
        CHECK(result.model.coefficients == std::vector<long long>{0});
        CHECK(result.loss == doctest::Approx(-0.25));
    }
    SUBCASE("negating the features negates the optimum") {
        // Score sets coincide under lambda -> -lambda, so the enumeration
        // lands on the mirrored coefficient with an identical loss.
        const auto mirrored = validate_dataset({-1, -2, -3, -4}, 1, {0, 0, 1, 1}, {"x"});
        const auto base = exact_enumerate(data, grid, tiny_config(1));
        const auto flip = exact_enumerate(mirrored, grid, tiny_config(1));
        CHECK(flip.model.coefficients[0] == -base.model.coefficients[0]);
        CHECK(flip.loss == base.loss);
        CHECK(flip.model.intercepts == base.model.intercepts);
    }
    SUBCASE("enumeration cap") {
        SolverConfig config = tiny_config(1);
        config.lambda_bounds = SolverConfig::symmetric_bounds(1, 600);
        CHECK_THROWS_AS(exact_enumerate(data, grid, config, 1000), ConfigError);
    }
}

TEST_CASE("annealing matches the oracle on random tiny instances") {
    RngStream rng(501);
    const ThresholdGrid grid({0.25, 0.5, 0.75});
    int matched = 0;
    const int instances = 10;
    for (int inst = 0; inst < instances; ++inst) {
        const std::size_t n = 8 + rng.uniform_int(15);
        const std::size_t p = 1 + rng.uniform_int(3);
        std::vector<double> features(n * p);
        std::vector<int> labels(n);
        for (std::size_t v = 0; v < features.size(); ++v) {
            features[v] = static_cast<double>(static_cast<long long>(rng.uniform_int(7)) - 3);
        }
        bool has_pos = false, has_neg = false;
        for (std::size_t j = 0; j < n; ++j) {
            labels[j] = rng.uniform() < 0.5 ? 1 : 0;
            (labels[j] == 1 ? has_pos : has_neg) = true;
        }
        if (!has_pos) labels[0] = 1;
        if (!has_neg) labels[1] = 0;
        const auto data = validate_dataset(features, p, labels, {});

        SolverConfig config;
        config.c0 = 0.001;
        config.lambda_bounds = SolverConfig::symmetric_bounds(p, 2);
        config.seed = 1000 + static_cast<std::uint64_t>(inst);
        config.restarts = 6;
        config.sa_initial_temp = 1e-3;
        config.sa_cooling_rate = 5e-6;  // 200 levels x 10 iters per chain

        const auto exact = exact_enumerate(data, grid, config);
        const auto annealed = sa_train(data, grid, config);
        CHECK(annealed.loss >= exact.loss - 1e-12);
        if (std::abs(annealed.loss - exact.loss) <= 1e-12) ++matched;
    }
    CHECK(matched >= instances - 1);
}

TEST_CASE("prediction through the risk map") {
    const ThresholdGrid grid({0.25, 0.5, 0.75});
    const ScoreModel model{{2, -1}, {0, 2, 4, 6}, {0.1, 0.3, 0.6, 0.8}, grid, {"a", "b"}};

    SUBCASE("band edges follow the closed lower rule") {
        CHECK(risk_for_score(model, 1.9) == 0.1);
        CHECK(risk_for_score(model, 2.0) == 0.3);   // T_1 boundary included
        CHECK(risk_for_score(model, 5.99) == 0.6);
        CHECK(risk_for_score(model, 6.0) == 0.8);   // score == T_M -> top band
        CHECK(risk_for_score(model, 100.0) == 0.8);
        CHECK(risk_for_score(model, -50.0) == 0.1);
    }
    SUBCASE("score is the plain dot product") {
        const std::vector<double> row{3, 2};
        const auto pred = predict(model, row);
        CHECK(pred.score == 4.0);
        CHECK(pred.risk == 0.6);
    }
    SUBCASE("row length must match") {
        const std::vector<double> row{1.0};
        CHECK_THROWS_AS(predict(model, row), DataError);
    }
}

TEST_CASE("rounding a real baseline") {
    SUBCASE("hand values") {
        const auto data = validate_dataset({1, 0, 0, 1}, 2, {0, 1}, {"a", "b"});
        const std::vector<double> rho{0.3, -0.7};
        const std::vector<double> t{-0.5, 0.1};
        const auto rounded = round_real_model(rho, t, data, 10);
        CHECK(rounded.coefficients == std::vector<long long>{4, -10});
    }
    SUBCASE("integer baselines at the cap are fixed points") {
        const auto data = validate_dataset({1, 0, 0, 1}, 2, {0, 1}, {"a", "b"});
        const std::vector<double> rho{3, -10};
        const std::vector<double> t{-2, 3};
        const auto rounded = round_real_model(rho, t, data, 10);
        CHECK(rounded.coefficients == std::vector<long long>{3, -10});
        CHECK(rounded.intercepts == std::vector<long long>{-2, 3});
    }
    SUBCASE("zero baselines are rejected") {
        const auto data = validate_dataset({1}, 1, {1}, {"a"});
        CHECK_THROWS_AS(round_real_model(std::vector<double>{0.0}, std::vector<double>{0.0},
                                         data, 5),
                        ConfigError);
    }
}

TEST_CASE("rounding preserves margins and net benefit under the capacity condition") {
    RngStream rng(88);
    const ThresholdGrid grid({0.3, 0.6});
    int verified = 0;
    for (int trial = 0; trial < 40 && verified < 25; ++trial) {
        const std::size_t n = 10 + rng.uniform_int(20);
        const std::size_t p = 1 + rng.uniform_int(3);
        std::vector<double> features(n * p);
        std::vector<int> labels(n);
        for (auto& v : features) {
            v = static_cast<double>(static_cast<long long>(rng.uniform_int(9)) - 4);
        }
        for (auto& y : labels) y = rng.uniform() < 0.5 ? 1 : 0;
        const auto data = validate_dataset(features, p, labels, {});

        std::vector<double> rho(p);
        for (auto& v : rho) v = -1.0 + 2.0 * rng.uniform();
        double rho_inf = 0.0;
        for (double v : rho) rho_inf = std::max(rho_inf, std::abs(v));
        if (rho_inf == 0.0) continue;

        std::vector<double> scores(n);
        double score_cap = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) s += data.value(j, k) * rho[k];
            scores[j] = s;
            score_cap = std::max(score_cap, std::abs(s));
        }
        if (score_cap == 0.0) continue;
        std::vector<double> t{-0.9 * score_cap, 0.0, 0.4 * score_cap};
        // keep a real margin, otherwise the capacity condition blows up
        double gamma = std::numeric_limits<double>::infinity();
        for (double s : scores) {
            for (double ti : t) gamma = std::min(gamma, std::abs(s - ti) / rho_inf);
        }
        if (gamma < 0.02) continue;

        double x_norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double l1 = 0.0;
            for (std::size_t k = 0; k < p; ++k) l1 += std::abs(data.value(j, k));
            x_norm = std::max(x_norm, l1);
        }
        const auto cap =
            static_cast<long long>(std::ceil((x_norm + 1.0) / (2.0 * gamma))) + 1;
        const auto rounded = round_real_model(rho, t, data, cap);
        REQUIRE(rounded.diagnostics.condition_holds);
        CHECK(rounded.diagnostics.gamma_min == doctest::Approx(gamma));
        CHECK(rounded.diagnostics.x_norm_inf == x_norm);

        // sign agreement at every (threshold, sample) pair
        for (std::size_t j = 0; j < n; ++j) {
            double int_score = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                int_score += data.value(j, k) *
                             static_cast<double>(rounded.coefficients[k]);
            }
            for (std::size_t i = 0; i < t.size(); ++i) {
                const bool base_above = scores[j] >= t[i];
                const bool int_above =
                    int_score >= static_cast<double>(rounded.intercepts[i]);
                CHECK(base_above == int_above);
            }
        }

        // weighted net benefit does not drop (c0 = 0)
        const auto base_curve = confusion_from_scores(scores, data.labels(), t);
        std::vector<double> t_int(rounded.intercepts.begin(), rounded.intercepts.end());
        std::vector<double> int_scores(n);
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                s += data.value(j, k) * static_cast<double>(rounded.coefficients[k]);
            }
            int_scores[j] = s;
        }
        const auto int_curve = confusion_from_scores(int_scores, data.labels(), t_int);
        CHECK(weighted_objective(int_curve, grid, 0, 0.0) <=
              weighted_objective(base_curve, grid, 0, 0.0) + 1e-12);
        ++verified;
    }
    CHECK(verified >= 25);
}
