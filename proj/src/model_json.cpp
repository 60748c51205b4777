#include "riskscore/model_json.hpp"

#include <fstream>

#include <json.hpp>

namespace riskscore {

namespace {

nlohmann::ordered_json config_to_json(const SolverConfig& config,
                                      const std::string& solver_name) {
    nlohmann::ordered_json cfg;
    cfg["solver"] = solver_name;
    cfg["c0"] = config.c0;
    nlohmann::ordered_json lo = nlohmann::ordered_json::array();
    nlohmann::ordered_json hi = nlohmann::ordered_json::array();
    for (const auto& b : config.lambda_bounds) {
        lo.push_back(b.lo);
        hi.push_back(b.hi);
    }
    cfg["lambda_lo"] = std::move(lo);
    cfg["lambda_hi"] = std::move(hi);
    cfg["t_max"] = config.t_max;
    cfg["sa_initial_temp"] = config.sa_initial_temp;
    cfg["sa_cooling_rate"] = config.sa_cooling_rate;
    cfg["sa_min_temp"] = config.sa_min_temp;
    cfg["sa_iters_per_temp"] = config.sa_iters_per_temp;
    cfg["restarts"] = config.restarts;
    return cfg;
}

}  // namespace

std::string model_to_json(const ScoreModel& model, const SolverConfig& config,
                          const std::string& solver_name) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["feature_names"] = model.feature_names;
    doc["coefficients"] = model.coefficients;
    doc["intercepts"] = model.intercepts;
    doc["thresholds"] = model.grid.inner();
    doc["weights"] = model.grid.weights();
    doc["risk_levels"] = model.risk_levels;
    doc["provenance"] = {{"config", config_to_json(config, solver_name)},
                         {"seed", config.seed}};
    return doc.dump(2) + "\n";
}

LoadedModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model JSON parse failure: ") + e.what());
    }
    try {
        if (doc.at("version").get<int>() != 1) {
            throw DataError("unsupported model document version");
        }
        LoadedModel out{
            ScoreModel{doc.at("coefficients").get<std::vector<long long>>(),
                       doc.at("intercepts").get<std::vector<long long>>(),
                       doc.at("risk_levels").get<std::vector<double>>(),
                       ThresholdGrid(doc.at("thresholds").get<std::vector<double>>(),
                                     doc.at("weights").get<std::vector<double>>()),
                       doc.at("feature_names").get<std::vector<std::string>>()},
            SolverConfig{},
            "unknown"};
        const auto& prov = doc.at("provenance");
        const auto& cfg = prov.at("config");
        out.solver_name = cfg.at("solver").get<std::string>();
        out.config.c0 = cfg.at("c0").get<double>();
        const auto lo = cfg.at("lambda_lo").get<std::vector<long long>>();
        const auto hi = cfg.at("lambda_hi").get<std::vector<long long>>();
        if (lo.size() != hi.size()) throw DataError("lambda bound arrays differ in length");
        for (std::size_t k = 0; k < lo.size(); ++k) {
            out.config.lambda_bounds.push_back({lo[k], hi[k]});
        }
        out.config.t_max = cfg.at("t_max").get<long long>();
        out.config.sa_initial_temp = cfg.at("sa_initial_temp").get<double>();
        out.config.sa_cooling_rate = cfg.at("sa_cooling_rate").get<double>();
        out.config.sa_min_temp = cfg.at("sa_min_temp").get<double>();
        out.config.sa_iters_per_temp = cfg.at("sa_iters_per_temp").get<int>();
        out.config.restarts = cfg.at("restarts").get<int>();
        out.config.seed = prov.at("seed").get<std::uint64_t>();
        out.model.check();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model JSON missing or malformed field: ") + e.what());
    }
}

void save_model(const std::string& path, const ScoreModel& model, const SolverConfig& config,
                const std::string& solver_name) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << model_to_json(model, config, solver_name);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace riskscore
