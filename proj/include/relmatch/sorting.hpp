#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "relmatch/economy.hpp"
#include "relmatch/traits.hpp"

namespace relmatch {

// A production/trait pairing; the unit every solver operates on.
struct Economy {
    ProductionFunction production;
    TraitDistribution traits;
};

enum class SortingClass { additive, binary, multiplicative };

enum class BinaryRegime { interior, all_self, all_cross };

struct BinarySortingInfo {
    double ybar = 0.0;  // preference-rank cutoff; measure ybar of each skill self-matches
    BinaryRegime regime = BinaryRegime::interior;
    double a_f = 0.0;
    double s_f = 0.0;
    double cutoff_high = 0.0;  // G_high^{-1}(ybar); high-skill workers above it cross-match
    double cutoff_low = 0.0;   // G_low^{-1}(1-ybar); low-skill workers below it cross-match
};

struct MultiplicativeSortingInfo {
    double r = 0.0;        // sqrt(Var(v2_bar)/Var(ln x1))
    double mean_v2 = 0.0;  // mean of v2_bar = c ln x1 - ln(1+2 x2)
    double sd_v2 = 0.0;
};

// Closed-form equilibrium sorting: the match map (an involution), the
// skill-preference index v1, and the self-match locus where it exists.
struct SortingSolution {
    SortingClass cls = SortingClass::additive;
    std::function<WorkerType(const WorkerType&)> match;
    std::function<double(const WorkerType&)> index;  // v1, valued in [0,1]
    std::function<double(double)> selfmatch_locus;   // x2*(x1)
    bool has_selfmatch_locus = false;
    std::optional<BinarySortingInfo> binary;
    std::optional<MultiplicativeSortingInfo> multiplicative;
};

// Which closed-form class an economy belongs to, if any.
std::optional<SortingClass> detect_sorting_class(const Economy& econ);

// The skill-preference index v1 of worker x.
double skill_pref_index(const Economy& econ, const WorkerType& x);

SortingSolution solve_sorting(const Economy& econ);
SortingSolution solve_sorting_additive(const Economy& econ);
SortingSolution solve_sorting_binary(const Economy& econ);
SortingSolution solve_sorting_multiplicative(const Economy& econ);

struct SortingStats {
    double corr_skill = 0.0;       // Pearson corr of own and co-worker skill
    double self_match_frac = 0.0;  // share matched to their own type
    double feasibility_ks = 0.0;   // KS distance between matched and fresh marginals
    double feasibility_ks_critical_1pct = 0.0;
};

SortingStats sorting_stats(const SortingSolution& sol, const std::vector<WorkerType>& sample,
                           const std::vector<WorkerType>& fresh_sample);

struct CommonRankingReport {
    double max_rank_discrepancy = 0.0;
    std::size_t pairs_checked = 0;
};

// Empirical check of the common-rankings requirement: the rank of
// L(x; a', a) = (F(x1, a') - F(x1, a)) / (1 + 2 x2) must not depend on the
// skill pair (a', a). Reports the largest rank disagreement across pairs.
CommonRankingReport verify_assumption1(const ProductionFunction& f,
                                       const TraitDistribution& traits,
                                       const std::vector<std::pair<double, double>>& skill_pairs,
                                       std::size_t n, std::uint64_t seed);

}  // namespace relmatch
