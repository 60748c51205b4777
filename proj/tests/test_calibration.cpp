#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "riskscore/calibration.hpp"
#include "riskscore/metrics.hpp"
#include "riskscore/rng.hpp"
#include "riskscore/solver.hpp"

using namespace riskscore;

namespace {

ThresholdGrid tenths() {
    return ThresholdGrid({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
}

struct RandomCase {
    std::vector<double> preds;
    std::vector<int> labels;
};

RandomCase random_case(RngStream& rng, std::size_t n) {
    RandomCase c;
    c.preds.resize(n);
    c.labels.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        c.preds[j] = rng.uniform();
        c.labels[j] = rng.uniform() < c.preds[j] ? 1 : 0;  // roughly calibrated base rate
    }
    return c;
}

double aunbc_of(const PredictionVector& preds, const std::vector<int>& labels,
                const ThresholdGrid& grid) {
    return aunbc(confusion_at_thresholds(preds, labels, grid), grid);
}

}  // namespace

TEST_CASE("repair moves an overconfident bin down") {
    const ThresholdGrid grid({0.5});
    const PredictionVector preds({0.6, 0.6, 0.6});
    const std::vector<int> labels{0, 0, 1};
    auto [repaired, report] = improve_aunbc(preds, labels, grid, false);
    CHECK(report.aunbc_before == doctest::Approx(0.0));
    CHECK(report.aunbc_after == doctest::Approx(1.0 / 6.0));
    REQUIRE(report.moved_bins.size() == 1);
    CHECK(report.moved_bins[0].first == 1);
    CHECK(report.moved_bins[0].second == MoveDirection::Down);
    for (std::size_t j = 0; j < repaired.size(); ++j) CHECK(repaired[j] == 0.0);
}

TEST_CASE("moderately calibrated predictions are untouched") {
    const ThresholdGrid grid({0.5});
    // bin 0 rate 0.25 in [0, 0.5), bin 1 rate 0.5 in [0.5, 1]: no trigger.
    const PredictionVector preds({0.2, 0.2, 0.2, 0.2, 0.7, 0.7});
    const std::vector<int> labels{1, 0, 0, 0, 1, 0};
    auto [repaired, report] = improve_aunbc(preds, labels, grid, false);
    CHECK(report.moved_bins.empty());
    CHECK(repaired.scores() == preds.scores());
    CHECK(report.aunbc_after == report.aunbc_before);

    SUBCASE("binned AUROC is untouched too") {
        const auto before = auroc_binned(confusion_at_thresholds(preds, labels, grid));
        const auto after = auroc_binned(confusion_at_thresholds(repaired, labels, grid));
        CHECK(before == after);
    }
}

TEST_CASE("bin zero can never move down") {
    RngStream rng(5);
    const auto grid = tenths();
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_case(rng, 5 + rng.uniform_int(60));
        auto [repaired, report] = improve_aunbc(PredictionVector(c.preds), c.labels, grid,
                                                false);
        for (const auto& [bin, dir] : report.moved_bins) {
            if (bin == 0) CHECK(dir == MoveDirection::Up);
        }
    }
}

TEST_CASE("repair never lowers the area under the net-benefit curve") {
    RngStream rng(8);
    const auto grid = tenths();
    int strict = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto c = random_case(rng, 10 + rng.uniform_int(80));
        const PredictionVector input(c.preds);

        auto [plain, plain_report] = improve_aunbc(input, c.labels, grid, false);
        CHECK(plain_report.aunbc_after >= plain_report.aunbc_before - 1e-12);
        if (!plain_report.moved_bins.empty()) {
            CHECK(plain_report.aunbc_after > plain_report.aunbc_before);
            ++strict;
        }

        auto [ordered, ordered_report] = improve_aunbc(input, c.labels, grid, true);
        CHECK(ordered_report.aunbc_after >= ordered_report.aunbc_before - 1e-12);
    }
    CHECK(strict > 50);  // the generator must actually exercise moves
}

TEST_CASE("order preservation keeps strict input orderings") {
    RngStream rng(13);
    const auto grid = tenths();
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_case(rng, 5 + rng.uniform_int(40));
        auto [repaired, report] = improve_aunbc(PredictionVector(c.preds), c.labels, grid,
                                                true);
        for (std::size_t a = 0; a < c.preds.size(); ++a) {
            for (std::size_t b = 0; b < c.preds.size(); ++b) {
                if (c.preds[a] < c.preds[b]) {
                    // The 1% tiebreaker saturates at 1; pairs capped there
                    // may tie, every other pair must stay strictly ordered.
                    if (repaired[a] == 1.0 && repaired[b] == 1.0) continue;
                    CHECK(repaired[a] < repaired[b]);
                }
            }
        }
    }
}

TEST_CASE("sweeps without down-moves are idempotent") {
    RngStream rng(21);
    const auto grid = tenths();
    int verified = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = random_case(rng, 10 + rng.uniform_int(60));
        auto [once, first] = improve_aunbc(PredictionVector(c.preds), c.labels, grid, false);
        const bool any_down =
            std::any_of(first.moved_bins.begin(), first.moved_bins.end(),
                        [](const auto& m) { return m.second == MoveDirection::Down; });
        if (any_down) continue;  // down-moves may cascade into earlier bins
        auto [twice, second] = improve_aunbc(once, c.labels, grid, false);
        CHECK(second.moved_bins.empty());
        CHECK(twice.scores() == once.scores());
        ++verified;
    }
    CHECK(verified > 50);
}

TEST_CASE("repeat-until-stable reaches a fixed point") {
    RngStream rng(34);
    const auto grid = tenths();
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_case(rng, 10 + rng.uniform_int(60));
        auto [stable, report] = improve_aunbc_until_stable(PredictionVector(c.preds), c.labels,
                                                           grid, false);
        auto [again, after] = improve_aunbc(stable, c.labels, grid, false);
        CHECK(after.moved_bins.empty());
        CHECK(report.aunbc_after >= report.aunbc_before - 1e-12);
    }
}

TEST_CASE("risk level assignment") {
    SUBCASE("plain rates and midpoints") {
        const ThresholdGrid grid({0.1, 0.2, 0.3, 0.4});
        BinStats stats;
        stats.count = {0, 20, 0, 0, 0};
        stats.positives = {0, 3, 0, 0, 0};
        stats.mean_score = {0, 0.15, 0, 0, 0};
        const auto assignment = assign_risk_levels(stats, grid);
        CHECK(assignment.risk_levels[1] == doctest::Approx(0.15));
        CHECK(assignment.risk_levels[0] == doctest::Approx(0.05));  // empty: midpoint
        CHECK(assignment.risk_levels[2] == doctest::Approx(0.25));
        CHECK(assignment.clamped_bins.empty());
        CHECK(assignment.merged_bins.empty());
    }
    SUBCASE("rate at the upper threshold merges upward") {
        const ThresholdGrid grid({0.2, 0.4});
        BinStats stats;
        stats.count = {5, 5, 2};
        stats.positives = {1, 1, 2};  // bin 0 rate = 0.2 exactly
        stats.mean_score = {0.1, 0.3, 0.9};
        const auto assignment = assign_risk_levels(stats, grid);
        CHECK(assignment.merged_bins == std::vector<int>{0});
        CHECK(assignment.risk_levels[0] == doctest::Approx(0.1));  // vacated midpoint
        CHECK(assignment.risk_levels[1] == doctest::Approx(0.2));  // (1+1)/(5+5)
        // top bin is all positives: clamped just below 1 and flagged
        CHECK(assignment.risk_levels[2] == doctest::Approx(1.0 - 1e-9));
        CHECK(assignment.clamped_bins == std::vector<int>{2});
    }
    SUBCASE("merges cascade upward") {
        const ThresholdGrid grid({0.2, 0.4});
        BinStats stats;
        stats.count = {5, 5, 10};
        stats.positives = {1, 3, 9};  // 0.2 exactly, then merged (1+3)/10 = 0.4 exactly
        stats.mean_score = {0.1, 0.3, 0.7};
        const auto assignment = assign_risk_levels(stats, grid);
        CHECK(assignment.merged_bins == std::vector<int>{0, 1});
        CHECK(assignment.risk_levels[2] == doctest::Approx(13.0 / 20.0));
        CHECK(assignment.clamped_bins.empty());
    }
    SUBCASE("rates outside the bin clamp and flag") {
        const ThresholdGrid grid({0.2, 0.4});
        BinStats stats;
        stats.count = {5, 5, 5};
        stats.positives = {3, 0, 1};  // 0.6 in [0, 0.2); 0 in [0.2, 0.4); 0.2 in [0.4, 1]
        stats.mean_score = {0.1, 0.3, 0.7};
        const auto assignment = assign_risk_levels(stats, grid);
        CHECK(assignment.risk_levels[0] == doctest::Approx(0.2 - 1e-9));
        CHECK(assignment.risk_levels[1] == doctest::Approx(0.2));
        CHECK(assignment.risk_levels[2] == doctest::Approx(0.4));
        CHECK(assignment.clamped_bins == std::vector<int>{0, 1, 2});
    }
    SUBCASE("a rate of zero in the bottom bin needs no clamp") {
        const ThresholdGrid grid({0.2});
        BinStats stats;
        stats.count = {4, 1};
        stats.positives = {0, 1};
        stats.mean_score = {0.1, 0.9};
        const auto assignment = assign_risk_levels(stats, grid);
        CHECK(assignment.risk_levels[0] == 0.0);
        CHECK(assignment.clamped_bins == std::vector<int>{1});  // top bin all positive
    }
}

TEST_CASE("model calibration yields exactly zero training error") {
    // Hand-built model whose bands are occupied with interior rates.
    const ThresholdGrid grid({0.25, 0.5, 0.75});
    ScoreModel model{{1}, {0, 2, 4, 6}, {0.1, 0.3, 0.6, 0.8}, grid, {"x"}};
    // scores: band 0 gets x in {0,1}, band 1 x in {2,3}, band 2 x in {4,5}.
    std::vector<double> xs{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4};
    std::vector<int> ys{0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0};
    // band 0: 8 samples 1 positive (rate 1/8 in [0, 0.25)); band 1: 4 samples
    // 1 positive (0.25 ok); band 2: 4 samples 2 positives (0.5 ok); band 3 empty.
    const auto data = validate_dataset(xs, 1, ys, {"x"});
    auto [calibrated, assignment] = calibrate_risk_levels(model, data);
    CHECK(assignment.clamped_bins.empty());
    CHECK(calibrated.risk_levels[0] == doctest::Approx(0.125));
    CHECK(calibrated.risk_levels[1] == doctest::Approx(0.25));
    CHECK(calibrated.risk_levels[2] == doctest::Approx(0.5));

    const PredictionVector preds = predict_all(calibrated, data);
    const auto stats = bin_stats(preds, data.labels(), grid);
    CHECK(ece(stats, static_cast<long long>(data.n_rows())) == 0.0);  // exact
}

TEST_CASE("model calibration mirrors merges on the intercepts") {
    const ThresholdGrid grid({0.25, 0.5});
    ScoreModel model{{1}, {0, 2, 4}, {0.1, 0.3, 0.7}, grid, {"x"}};
    // band 0: 4 samples 1 positive -> rate 0.25 == p_1, merges into band 1.
    std::vector<double> xs{0, 0, 0, 0, 2, 2, 4, 4};
    std::vector<int> ys{1, 0, 0, 0, 1, 0, 1, 0};
    const auto data = validate_dataset(xs, 1, ys, {"x"});
    auto [calibrated, assignment] = calibrate_risk_levels(model, data);
    CHECK(assignment.merged_bins == std::vector<int>{0});
    CHECK(calibrated.intercepts[1] == 0);  // lowered onto T_0
    // merged band rate: (1 + 1) / (4 + 2) = 1/3 inside [0.25, 0.5)
    CHECK(calibrated.risk_levels[1] == doctest::Approx(1.0 / 3.0));

    const PredictionVector preds = predict_all(calibrated, data);
    const auto stats = bin_stats(preds, data.labels(), grid);
    CHECK(ece(stats, 8) == 0.0);
    CHECK(assignment.clamped_bins.empty());
}

TEST_CASE("repaired vectors then calibrated give near-zero error") {
    // End-to-end: repair raises utility, rate assignment then zeroes the
    // calibration gap measured on the grid.
    RngStream rng(55);
    const auto grid = tenths();
    const auto c = random_case(rng, 400);
    auto [repaired, report] = improve_aunbc(PredictionVector(c.preds), c.labels, grid, true);
    const double err = ece(bin_stats(repaired, c.labels, grid),
                           static_cast<long long>(c.labels.size()));
    CHECK(err <= 0.05);
    CHECK(report.aunbc_after >= report.aunbc_before - 1e-12);
}
