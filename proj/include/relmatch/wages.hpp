#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "relmatch/sorting.hpp"

namespace relmatch {

struct PayoffWage {
    double payoff = 0.0;  // u*
    double wage = 0.0;    // w*
};

// Equilibrium wage/payoff functions plus the self-match and benchmark
// references needed for the inequality comparisons.
struct WageSchedule {
    SortingClass cls = SortingClass::additive;
    double alpha_low = 0.5;  // bargaining weight of low-skill workers where wages are not unique
    std::function<double(const WorkerType&)> wage;
    std::function<double(const WorkerType&)> payoff;
    std::function<double(double)> selfmatch;  // w_S(x1)
    std::function<double(double)> benchmark;  // w_B(x1), equal to u_B(x1)
};

// Both workers of a self-matched pair take half the output.
double selfmatch_wage(const ProductionFunction& f, double x1);

// Prop.-style quadrature of the payoff/wage integrals along the concern
// path from the self-match locus; works for every supported class.
PayoffWage payoff_wage_general(const Economy& econ, const SortingSolution& sol,
                               const WorkerType& x);

// Closed forms.
PayoffWage payoff_wage_additive(const Economy& econ, const WorkerType& x);
PayoffWage payoff_wage_binary(const Economy& econ, const SortingSolution& sol, const WorkerType& x,
                              double alpha_low = 0.5);
// The matched-output path is a power of (1+2s) in the multiplicative class,
// so the payoff integrals have explicit antiderivatives.
PayoffWage payoff_wage_multiplicative(const Economy& econ, const SortingSolution& sol,
                                      const WorkerType& x);

// Inverts the utility identity u = (1+2*x2) w - x2 F at the matched output.
double wage_from_utility(double u, const WorkerType& x, double f_match_output);

// Wage in the benchmark economy (all concerns zero). Unique except in the
// binary submodular case, where alpha_low selects the bargaining split.
double benchmark_wage(const Economy& econ, double x1, double alpha_low = 0.5);

// Full schedule for an economy: closed-form wage/payoff plus references.
WageSchedule make_wage_schedule(const Economy& econ, const SortingSolution& sol,
                                double alpha_low = 0.5);

struct TruthTellingReport {
    double truthful_value = 0.0;
    double best_value = 0.0;
    double best_announcement = 0.0;
    double gap = 0.0;  // best - truthful, >= 0
    bool truthful_optimal = false;
};

// Checks that announcing the true concern maximises
// (1+2*x2) w*(x1, a) - x2 F(x1, mu1*(x1, a)) over announcements a.
TruthTellingReport truthtelling_check(const Economy& econ, const SortingSolution& sol,
                                      const WageSchedule& schedule, const WorkerType& x,
                                      const std::vector<double>& candidate_concerns,
                                      double tol = 1e-9);

}  // namespace relmatch
