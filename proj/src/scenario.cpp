#include "relmatch/scenario.hpp"

#include <fstream>

#include "relmatch/errors.hpp"

namespace relmatch {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw InputError(path + ": " + msg);
}

const json& need(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double num(const json& j, const std::string& path, const std::string& key) {
    const json& v = need(j, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& path, const std::string& key, double fallback) {
    if (!j.is_object() || j.find(key) == j.end()) return fallback;
    return num(j, path, key);
}

std::string text(const json& j, const std::string& path, const std::string& key) {
    const json& v = need(j, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

ScalarFun parse_scalar_fun(const json& j, const std::string& path) {
    std::string type = text(j, path, "type");
    if (type == "identity") return scalar_identity();
    if (type == "linear") {
        return scalar_linear(num_or(j, path, "intercept", 0.0), num(j, path, "slope"));
    }
    if (type == "power") {
        return scalar_power(num_or(j, path, "coef", 1.0), num(j, path, "exponent"));
    }
    if (type == "hinge") return scalar_hinge(num(j, path, "kink"), num(j, path, "slope"));
    fail(path + ".type", "unknown scalar function '" + type + "'");
}

ProductionFunction parse_production(const json& j, const std::string& path) {
    std::string type = text(j, path, "type");
    if (type == "additive") {
        return make_additive(parse_scalar_fun(need(j, path, "k"), path + ".k"));
    }
    if (type == "binary") {
        return make_binary(num_or(j, path, "low", 0.0), num_or(j, path, "high", 1.0),
                           num(j, path, "f_ll"), num(j, path, "f_hl"), num(j, path, "f_hh"));
    }
    if (type == "multiplicative") {
        return make_multiplicative(num_or(j, path, "level", 0.0), num(j, path, "exponent"));
    }
    if (type == "tabulated") {
        const json& grid = need(j, path, "grid");
        const json& values = need(j, path, "values");
        if (!grid.is_array() || !values.is_array()) {
            fail(path, "tabulated production needs 'grid' and 'values' arrays");
        }
        std::vector<double> g = grid.get<std::vector<double>>();
        std::vector<std::vector<double>> v = values.get<std::vector<std::vector<double>>>();
        return make_tabulated(std::move(g), std::move(v));
    }
    fail(path + ".type", "unknown production type '" + type + "'");
}

TraitDistribution parse_traits(const json& j, const std::string& path) {
    std::string type = text(j, path, "type");
    if (type == "product") {
        return TraitDistribution::product(parse_marginal(need(j, path, "skill"), path + ".skill"),
                                          parse_marginal(need(j, path, "concern"),
                                                         path + ".concern"));
    }
    if (type == "gaussian_copula") {
        return TraitDistribution::gaussian_copula(
            parse_marginal(need(j, path, "skill"), path + ".skill"),
            parse_marginal(need(j, path, "concern"), path + ".concern"), num(j, path, "rho"));
    }
    if (type == "lognormal_joint") {
        return TraitDistribution::log_normal_joint(num(j, path, "delta1"), num(j, path, "delta2"),
                                                   num(j, path, "omega11"),
                                                   num(j, path, "omega12"),
                                                   num(j, path, "omega22"));
    }
    if (type == "binary_skill") {
        return TraitDistribution::binary_skill(
            num_or(j, path, "low", 0.0), num_or(j, path, "high", 1.0),
            parse_marginal(need(j, path, "g_low"), path + ".g_low"),
            parse_marginal(need(j, path, "g_high"), path + ".g_high"),
            num_or(j, path, "p", 0.5));
    }
    if (type == "empirical_joint") {
        const json& rows = need(j, path, "workers");
        if (!rows.is_array()) fail(path + ".workers", "expected an array of [x1, x2] pairs");
        std::vector<WorkerType> workers;
        workers.reserve(rows.size());
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != 2) {
                fail(path + ".workers", "each worker must be an [x1, x2] pair");
            }
            workers.push_back({row[0].get<double>(), row[1].get<double>()});
        }
        return TraitDistribution::empirical_joint(std::move(workers));
    }
    fail(path + ".type", "unknown traits type '" + type + "'");
}

}  // namespace

Marginal parse_marginal(const nlohmann::json& j, const std::string& path) {
    std::string type = text(j, path, "type");
    if (type == "uniform") return Marginal::uniform(num(j, path, "a"), num(j, path, "b"));
    if (type == "lognormal") {
        return Marginal::log_normal(num(j, path, "location"), num(j, path, "scale_sq"),
                                    num_or(j, path, "scale", 1.0), num_or(j, path, "shift", 0.0));
    }
    if (type == "discrete") {
        const json& atoms = need(j, path, "atoms");
        const json& weights = need(j, path, "weights");
        return Marginal::discrete(atoms.get<std::vector<double>>(),
                                  weights.get<std::vector<double>>());
    }
    if (type == "empirical") {
        return Marginal::empirical(need(j, path, "values").get<std::vector<double>>());
    }
    fail(path + ".type", "unknown marginal type '" + type + "'");
}

Scenario parse_scenario(const nlohmann::json& j) {
    Scenario s{Economy{parse_production(need(j, "scenario", "production"), "production"),
                       parse_traits(need(j, "scenario", "traits"), "traits")},
               AnalysisParams{}, j};
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        const std::string path = "analysis";
        if (a.contains("n")) {
            double n = num(a, path, "n");
            if (n < 1) fail("analysis.n", "must be at least 1");
            s.analysis.n = static_cast<std::size_t>(n);
        }
        if (a.contains("seed")) s.analysis.seed = static_cast<std::uint64_t>(num(a, path, "seed"));
        if (a.contains("alpha_low")) {
            s.analysis.alpha_low = num(a, path, "alpha_low");
            if (s.analysis.alpha_low < 0.0 || s.analysis.alpha_low > 1.0) {
                fail("analysis.alpha_low", "must lie in [0,1]");
            }
        }
        if (a.contains("outsourcing_cost")) {
            s.analysis.outsourcing_cost = num(a, path, "outsourcing_cost");
            if (*s.analysis.outsourcing_cost < 0.0) {
                fail("analysis.outsourcing_cost", "must be nonnegative");
            }
        }
        if (a.contains("sbtc")) {
            const json& sb = a.at("sbtc");
            std::string type = text(sb, "analysis.sbtc", "type");
            if (type == "pair") {
                s.analysis.sbtc = sbtc_from_pair(num(sb, "analysis.sbtc", "s_low"),
                                                 num(sb, "analysis.sbtc", "s_high"));
            } else {
                s.analysis.sbtc = sbtc_from_function(parse_scalar_fun(sb, "analysis.sbtc"));
            }
        }
        if (a.contains("sweep_steps")) {
            double steps = num(a, path, "sweep_steps");
            if (steps < 2) fail("analysis.sweep_steps", "must be at least 2");
            s.analysis.sweep_steps = static_cast<std::size_t>(steps);
        }
        if (a.contains("oracle_sizes")) {
            const json& sizes = a.at("oracle_sizes");
            if (!sizes.is_array()) fail("analysis.oracle_sizes", "expected an array");
            s.analysis.oracle_sizes.clear();
            for (const auto& v : sizes) {
                auto n = static_cast<std::size_t>(v.get<double>());
                if (n < 2 || n % 2 != 0 || n > 22) {
                    fail("analysis.oracle_sizes", "entries must be even, between 2 and 22");
                }
                s.analysis.oracle_sizes.push_back(n);
            }
        }
        if (a.contains("oracle_seeds")) {
            s.analysis.oracle_seeds = static_cast<std::size_t>(num(a, path, "oracle_seeds"));
            if (s.analysis.oracle_seeds == 0) fail("analysis.oracle_seeds", "must be positive");
        }
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(j);
}

}  // namespace relmatch
