#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relmatch/sorting.hpp"

namespace relmatch {

struct AnalysisParams {
    std::size_t n = 100000;
    std::uint64_t seed = 20240901;
    double alpha_low = 0.5;
    std::optional<double> outsourcing_cost;
    std::optional<SBTCShift> sbtc;
    std::size_t sweep_steps = 21;
    std::vector<std::size_t> oracle_sizes = {8, 12};
    std::size_t oracle_seeds = 20;
};

struct Scenario {
    Economy economy;
    AnalysisParams analysis;
    nlohmann::json echo;  // normalized input, reproduced in manifests
};

// Parses and validates a scenario; errors carry the offending field path.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);

Marginal parse_marginal(const nlohmann::json& j, const std::string& path);

}  // namespace relmatch
