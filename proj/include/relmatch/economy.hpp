#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace relmatch {

// A worker: skill x1 (real value, or the numeric label of {low, high} in
// binary economies) and the strength of relative concerns x2.
// Requires concern > -0.5 so utility increases in the own wage.
struct WorkerType {
    double skill = 0.0;
    double concern = 0.0;
};

inline double concern_weight(double concern) { return 1.0 / (1.0 + 2.0 * concern); }

// Scalar function bundled with its derivative; used for the additive
// production kernel K and for skill-biased shifts S.
struct ScalarFun {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::string desc;
};

ScalarFun scalar_identity();
ScalarFun scalar_linear(double intercept, double slope);
ScalarFun scalar_power(double coef, double exponent);  // coef * x^exponent
ScalarFun scalar_sum(const ScalarFun& a, const ScalarFun& b);
// slope * max(0, x - kink); kinked derivative, used for trickle-down tests.
ScalarFun scalar_hinge(double kink, double slope);

struct AdditiveProduction {
    ScalarFun k;  // F(a,b) = K(a) + K(b)
};

struct BinaryProduction {
    double low = 0.0;
    double high = 1.0;
    double f_ll = 0.0;
    double f_hl = 0.0;
    double f_hh = 0.0;
};

struct MultiplicativeProduction {
    double level = 0.0;     // A
    double exponent = 1.0;  // c, nonzero; F(a,b) = A + ((ab)^c - 1)/c
};

// Symmetric table on a skill grid, bilinear between nodes, no extrapolation.
struct TabulatedProduction {
    std::vector<double> grid;                 // strictly increasing
    std::vector<std::vector<double>> values;  // values[i][j] = F(grid[i], grid[j])
};

struct ProductionFunction;

// Base production plus an own-skill additive shift S on each argument.
// Closed under repeated shifting; lets SBTC act on any variant.
struct ShiftedProduction {
    std::shared_ptr<const ProductionFunction> base;
    ScalarFun shift;
};

struct ProductionFunction {
    std::variant<AdditiveProduction, BinaryProduction, MultiplicativeProduction,
                 TabulatedProduction, ShiftedProduction>
        repr;
};

ProductionFunction make_additive(ScalarFun k);
ProductionFunction make_binary(double low, double high, double f_ll, double f_hl, double f_hh);
ProductionFunction make_multiplicative(double level, double exponent);
ProductionFunction make_tabulated(std::vector<double> grid,
                                  std::vector<std::vector<double>> values);

const BinaryProduction* as_binary(const ProductionFunction& f);
const AdditiveProduction* as_additive(const ProductionFunction& f);
const MultiplicativeProduction* as_multiplicative(const ProductionFunction& f);

// Team output F(a, b); symmetric and increasing in each argument.
double produce(const ProductionFunction& f, double a, double b);

// Eq-style utility: own wage plus concern-weighted wage gap.
double utility(double w_own, double w_co, double concern);

// The monotone per-type rescaling that makes utility transferable.
double rescale_utility(double u, double concern);

// Match surplus of the transferable-utility representation:
// F(x1_j, x1_k) * (1/(1+2 x2_j) + 1/(1+2 x2_k)).
double tu_surplus(const ProductionFunction& f, const WorkerType& j, const WorkerType& k);

// Highest utility worker k can obtain with co-worker j when j is promised u.
double frontier_psi(const ProductionFunction& f, const WorkerType& j, const WorkerType& k,
                    double u);

// Skill-biased technological shift: an increasing own-skill bonus.
struct SBTCShift {
    // Functional form (for additive / tabulated / general production).
    ScalarFun s;
    // Binary form: bonus per skill label, s_high > s_low.
    bool is_binary_pair = false;
    double s_low = 0.0;
    double s_high = 0.0;
};

SBTCShift sbtc_from_function(ScalarFun s);
SBTCShift sbtc_from_pair(double s_low, double s_high);

// F'(a,b) = F(a,b) + S(a) + S(b). Binary pairs apply componentwise; other
// variants wrap the base function (additive folds S into K).
ProductionFunction apply_sbtc(const ProductionFunction& f, const SBTCShift& s);

// Given within-firm concern x2 and global-status concern x3, the concern
// level x2~ whose baseline rescaled utility matches the global-status model
// for every wage pair: 1 + 2*x2~ = (1+2*x2)/(1+2*x3).
double reduce_global_status(double x2, double x3);

// Rescaled utility in the global-status model (net of the economy-wide
// average-production term, which sorting cannot affect).
double rescaled_halo_utility(double w_own, double w_co, double x2, double x3);

struct BinaryDescriptors {
    double a_f = 0.0;  // (F_hh - F_hl) / (F_hl - F_ll); >1 supermodular
    double s_f = 0.0;  // F_hl - (F_hh + F_ll)/2; surplus lost by self-matching
};

BinaryDescriptors binary_descriptors(const ProductionFunction& f);

}  // namespace relmatch
