#include "riskscore/milp.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "riskscore/metrics.hpp"

namespace riskscore {

namespace {

bool all_features_integer(const BinaryDataset& data) {
    for (std::size_t j = 0; j < data.n_rows(); ++j) {
        for (double v : data.row(j)) {
            if (v != std::floor(v)) return false;
        }
    }
    return true;
}

std::string phi_name(int i, std::size_t j) {
    return "phi_" + std::to_string(i) + "_" + std::to_string(j + 1);
}

std::string format_coef(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void append_terms(std::ostringstream& out, const std::vector<MilpTerm>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        if (t.coef == 0.0) continue;
        const double mag = std::abs(t.coef);
        if (first) {
            out << (t.coef < 0 ? "- " : "");
            first = false;
        } else {
            out << (t.coef < 0 ? " - " : " + ");
        }
        if (mag == 1.0) {
            out << t.var;
        } else {
            out << format_coef(mag) << " " << t.var;
        }
    }
    if (first) out << "0 " << terms.front().var;  // all-zero row, keep it syntactically valid
}

}  // namespace

MilpExport milp_export(const BinaryDataset& data, const ThresholdGrid& grid,
                       const SolverConfig& config, std::optional<double> gamma) {
    config.check(data.n_cols());
    const int m = grid.inner_count();
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();

    MilpExport milp;
    milp.c0 = config.c0;
    if (gamma.has_value()) {
        if (!(*gamma > 0.0)) throw ConfigError("gamma must be positive");
        milp.gamma = *gamma;
    } else if (all_features_integer(data)) {
        milp.gamma = 0.5;
    } else {
        throw ConfigError("non-integer features: an explicit gamma is required");
    }

    long long max_cap = 0;
    for (const auto& b : config.lambda_bounds) {
        max_cap = std::max(max_cap, std::max(std::llabs(b.lo), std::llabs(b.hi)));
    }

    // H_j = gamma + ||x_j||_1 * max_k Lambda_k + t_max dominates every
    // admissible gamma + x_j.lambda - T_i.
    milp.big_m.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double l1 = 0.0;
        for (double v : data.row(j)) l1 += std::abs(v);
        milp.big_m[j] = milp.gamma + l1 * static_cast<double>(max_cap) +
                        static_cast<double>(config.t_max);
    }

    // Variables: phi binaries, alpha binaries, integer coefficients and
    // intercepts. Count (M+1)N + 2P + (M+1).
    for (int i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            milp.variables.push_back({phi_name(i, j), VarKind::Binary, 0, 1});
        }
    }
    for (std::size_t k = 0; k < p; ++k) {
        milp.variables.push_back({"alpha_" + std::to_string(k + 1), VarKind::Binary, 0, 1});
    }
    for (std::size_t k = 0; k < p; ++k) {
        milp.variables.push_back({"lam_" + std::to_string(k + 1), VarKind::Integer,
                                  config.lambda_bounds[k].lo, config.lambda_bounds[k].hi});
    }
    for (int i = 0; i <= m; ++i) {
        milp.variables.push_back(
            {"t_" + std::to_string(i), VarKind::Integer, -config.t_max, config.t_max});
    }

    // Objective: reward captured positives, charge captured negatives at the
    // threshold odds, and penalize selected coefficients.
    const auto dn = static_cast<double>(n);
    for (int i = 0; i <= m; ++i) {
        const double p_i = grid.threshold(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double coef = data.label(j) == 1
                                    ? -grid.weight(i) / dn
                                    : grid.weight(i) * p_i / (1.0 - p_i) / dn;
            if (coef != 0.0) milp.objective.push_back({phi_name(i, j), coef});
        }
    }
    for (std::size_t k = 0; k < p; ++k) {
        if (config.c0 != 0.0) {
            milp.objective.push_back({"alpha_" + std::to_string(k + 1), config.c0});
        }
    }

    // Both big-M families share one left-hand side:
    //   positives: H_j (1 - phi) >= t_i - x_j.lam   <=>  H phi + t - x.lam <= H_j
    //   negatives: H_j phi >= gamma + x_j.lam - t_i <=>  H phi + t - x.lam >= gamma
    for (int i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            MilpRow row;
            row.terms.push_back({phi_name(i, j), milp.big_m[j]});
            row.terms.push_back({"t_" + std::to_string(i), 1.0});
            for (std::size_t k = 0; k < p; ++k) {
                const double x = data.value(j, k);
                if (x != 0.0) row.terms.push_back({"lam_" + std::to_string(k + 1), -x});
            }
            if (data.label(j) == 1) {
                row.name = "pos_" + std::to_string(i) + "_" + std::to_string(j + 1);
                row.sense = RowSense::LessEqual;
                row.rhs = milp.big_m[j];
                ++milp.positive_rows;
            } else {
                row.name = "neg_" + std::to_string(i) + "_" + std::to_string(j + 1);
                row.sense = RowSense::GreaterEqual;
                row.rhs = milp.gamma;
                ++milp.negative_rows;
            }
            milp.constraints.push_back(std::move(row));
        }
    }

    // Indicator links lo_k alpha_k <= lam_k <= hi_k alpha_k.
    for (std::size_t k = 0; k < p; ++k) {
        const std::string lam = "lam_" + std::to_string(k + 1);
        const std::string alpha = "alpha_" + std::to_string(k + 1);
        MilpRow lo_row{"link_lo_" + std::to_string(k + 1),
                       {{lam, 1.0},
                        {alpha, -static_cast<double>(config.lambda_bounds[k].lo)}},
                       RowSense::GreaterEqual,
                       0.0};
        MilpRow hi_row{"link_hi_" + std::to_string(k + 1),
                       {{lam, 1.0},
                        {alpha, -static_cast<double>(config.lambda_bounds[k].hi)}},
                       RowSense::LessEqual,
                       0.0};
        milp.constraints.push_back(std::move(lo_row));
        milp.constraints.push_back(std::move(hi_row));
        milp.link_rows += 2;
    }

    // Monotone intercepts t_i <= t_{i+1}.
    for (int i = 0; i < m; ++i) {
        milp.constraints.push_back({"mono_" + std::to_string(i),
                                    {{"t_" + std::to_string(i), 1.0},
                                     {"t_" + std::to_string(i + 1), -1.0}},
                                    RowSense::LessEqual,
                                    0.0});
        ++milp.monotonicity_rows;
    }
    return milp;
}

std::string write_lp(const MilpExport& milp) {
    std::ostringstream out;
    out << "\\ sparse integer risk scoring: weighted net benefit maximization\n";
    out << "\\ gamma = " << format_coef(milp.gamma) << ", c0 = " << format_coef(milp.c0)
        << "\n";
    out << "Minimize\n obj: ";
    append_terms(out, milp.objective);
    out << "\nSubject To\n";
    for (const auto& row : milp.constraints) {
        out << " " << row.name << ": ";
        append_terms(out, row.terms);
        out << (row.sense == RowSense::LessEqual ? " <= " : " >= ") << format_coef(row.rhs)
            << "\n";
    }
    out << "Bounds\n";
    for (const auto& var : milp.variables) {
        if (var.kind == VarKind::Integer) {
            out << " " << var.lo << " <= " << var.name << " <= " << var.hi << "\n";
        }
    }
    out << "Generals\n";
    for (const auto& var : milp.variables) {
        if (var.kind == VarKind::Integer) out << " " << var.name << "\n";
    }
    out << "Binaries\n";
    for (const auto& var : milp.variables) {
        if (var.kind == VarKind::Binary) out << " " << var.name << "\n";
    }
    out << "End\n";
    return out.str();
}

VerifyResult verify_solution(const BinaryDataset& data, const ThresholdGrid& grid,
                             const SolverConfig& config, std::span<const long long> lambda,
                             std::span<const long long> intercepts) {
    if (lambda.size() != data.n_cols()) {
        throw ConfigError("coefficient count does not match feature count");
    }
    if (intercepts.size() != static_cast<std::size_t>(grid.bin_count())) {
        throw ConfigError("intercept count does not match threshold count");
    }
    const std::size_t n = data.n_rows();
    const auto dn = static_cast<double>(n);

    std::vector<double> scores(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto row = data.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            s += row[k] * static_cast<double>(lambda[k]);
        }
        scores[j] = s;
    }

    long long nnz = 0;
    for (long long v : lambda) nnz += (v != 0);

    // Formulation route: phi_{i,j} = I(x_j.lambda >= T_i).
    VerifyResult result;
    for (int i = 0; i <= grid.inner_count(); ++i) {
        const double p_i = grid.threshold(i);
        const auto threshold = static_cast<double>(intercepts[static_cast<std::size_t>(i)]);
        for (std::size_t j = 0; j < n; ++j) {
            if (scores[j] < threshold) continue;
            if (data.label(j) == 1) {
                result.milp_objective -= grid.weight(i) / dn;
            } else {
                result.milp_objective += grid.weight(i) * p_i / (1.0 - p_i) / dn;
            }
        }
    }
    result.milp_objective += config.c0 * static_cast<double>(nnz);

    // Metric route over the same thresholds.
    std::vector<double> t_real(intercepts.size());
    for (std::size_t i = 0; i < intercepts.size(); ++i) {
        t_real[i] = static_cast<double>(intercepts[i]);
    }
    const ConfusionCurve curve = confusion_from_scores(scores, data.labels(), t_real);
    result.recomputed_objective = weighted_objective(curve, grid, nnz, config.c0);

    result.agrees = std::abs(result.milp_objective - result.recomputed_objective) <= 1e-9;
    return result;
}

}  // namespace riskscore
