#pragma once

#include <functional>
#include <vector>

#include "relmatch/sorting.hpp"

namespace relmatch {

struct OutsourcingScenario {
    Economy economy;         // binary production + binary-skill traits
    double cost = 0.0;       // outsourcing cost c >= 0
    double alpha_low = 0.5;  // bargaining weight of low-skill workers
};

enum class OutsourcingRegime { no_outsourcing, mixed };

struct OutsourcingEquilibrium {
    OutsourcingRegime regime = OutsourcingRegime::mixed;
    double y_o = 0.0;  // share of teams that outsource
    double cost = 0.0;
    double alpha_low = 0.5;
    double s_f = 0.0;
    // Wages; in the no-outsourcing regime w_o_* are unused and w_n_* carry
    // the baseline cross-match wages.
    double w_o_high = 0.0;
    double w_o_low = 0.0;
    double w_n_high = 0.0;
    double w_n_low = 0.0;
    double t_high_at_cut = 0.0;  // T_high(y_o)
    double t_low_at_cut = 0.0;   // T_low(y_o)
    // Payoffs as functions of the worker's concern.
    std::function<double(const WorkerType&)> payoff_outsourcing;
    std::function<double(const WorkerType&)> payoff_non_outsourcing;
    // Membership: low-skill outsourced iff x2 > T_low(y_o) - 0.5; high-skill
    // outsourcing iff x2 < T_high(y_o) - 0.5.
    std::function<bool(const WorkerType&)> outsources;
    // Baseline (no-outsourcing) sorting solution, used when c > s_F.
    std::optional<SortingSolution> baseline;
};

OutsourcingEquilibrium solve_outsourcing(const OutsourcingScenario& scn);

struct InequalityDecomposition {
    double wfwi = 0.0;   // within-firm wage variance component
    double bfwi = 0.0;   // between-firm wage variance component
    double var_w = 0.0;  // total wage variance
    double ratio = 0.0;  // BFWI / WFWI
    double var_w_direct = 0.0;  // cross-check from the four wage atoms
};

InequalityDecomposition inequality_decomposition(const OutsourcingEquilibrium& eqm);

struct SweepPoint {
    double theta = 0.0;
    OutsourcingRegime regime = OutsourcingRegime::mixed;
    double y_o = 0.0;
    double w_o_high = 0.0;
    double w_o_low = 0.0;
    double w_n_high = 0.0;
    double w_n_low = 0.0;
    double wfwi = 0.0;
    double bfwi = 0.0;
    double var_w = 0.0;
    double ratio = 0.0;
};

// Evaluates equilibria along the technology blend
// F(theta) = F + theta * (S(a) + S(b)) for theta on a uniform grid.
std::vector<SweepPoint> sbtc_sweep(const OutsourcingScenario& scn, const SBTCShift& shift,
                                   std::size_t steps);

struct Prop6ConditionReport {
    bool passes = false;
    double max_derivative = 0.0;
    double threshold = 0.0;  // 4*sqrt(3)/9
    bool boundary_blowup = false;
};

// Numerically checks d/dy ln G_low^{-1}(y) <= 4 sqrt(3)/9 on an interior
// grid; a vanishing quantile at y=0 is flagged separately since the bound
// cannot hold up to the boundary there.
Prop6ConditionReport check_prop6_condition(const Marginal& g_low, std::size_t grid = 512);

}  // namespace relmatch
