#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "relmatch/sorting.hpp"
#include "relmatch/wages.hpp"

namespace relmatch {

// A sampled even-size population with its pairwise TU surplus matrix.
struct DiscreteInstance {
    std::vector<WorkerType> workers;
    std::vector<std::vector<double>> surplus;  // symmetric, zero diagonal unused
};

enum class MatchMethod { enumerate, bitmask_dp, greedy_rank };

struct MatchingResult {
    std::vector<std::size_t> partner;  // involutive permutation, no fixed points
    double total_surplus = 0.0;
    MatchMethod method = MatchMethod::bitmask_dp;
};

DiscreteInstance build_instance(const Economy& econ, std::size_t n, std::uint64_t seed);
DiscreteInstance instance_from_workers(const Economy& econ, std::vector<WorkerType> workers);

// Globally optimal perfect matching by dynamic programming over subsets
// (n <= 22; O(2^n * n) time, O(2^n) memory).
MatchingResult match_exact(const DiscreteInstance& inst);

// Exhaustive enumeration cross-check (n <= 12).
MatchingResult match_enumerate(const DiscreteInstance& inst);

struct DualResult {
    std::vector<double> values;       // per-worker rescaled payoffs u~
    double max_violation = 0.0;       // residual infeasibility before the final lift
    double matched_equality_gap = 0;  // |u~_i + u~_j - surplus| on matched pairs after lift
    std::size_t sweeps = 0;
};

// Dual payoffs supporting an optimal matching: equality on matched pairs,
// feasibility u~_i + u~_j >= surplus(i,j) on all pairs. Solved as a linear
// feasibility problem in per-pair transfers by iterative projection
// (tolerance 1e-9), anchoring exact clone pairs at the equal split. An
// optional initial guess warm-starts large instances.
DualResult dual_payoffs(const DiscreteInstance& inst, const MatchingResult& result,
                        const std::vector<double>* initial = nullptr);

// The matching a closed-form solution induces on a finite sample:
// rank-nearest pairing that respects the solution's cross/self structure.
MatchingResult closed_form_matching(const Economy& econ, const SortingSolution& sol,
                                    const DiscreteInstance& inst);

struct OracleCompareReport {
    double oracle_surplus = 0.0;
    double closed_form_surplus = 0.0;
    double surplus_gap_rel = 0.0;  // (oracle - closed-form) / max(1, |oracle|)
    std::size_t pam_violations = 0;
    double dual_wage_sup_gap = 0.0;  // bucket means of dual-implied vs closed-form wages
    double dual_max_violation = 0.0;
    bool has_closed_form = false;
};

// Confronts the oracle matching with the closed form on the same sample:
// surplus gap, PAM-in-(x1, v1) violations of the oracle matching, and the
// distance between dual-implied and closed-form wages.
OracleCompareReport compare_oracle(const Economy& econ,
                                   const std::function<double(const WorkerType&)>& index,
                                   const SortingSolution* sol, const WageSchedule* schedule,
                                   const DiscreteInstance& inst, const MatchingResult& result);

}  // namespace relmatch
