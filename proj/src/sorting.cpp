#include "relmatch/sorting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"

namespace relmatch {

std::optional<SortingClass> detect_sorting_class(const Economy& econ) {
    if (as_additive(econ.production) != nullptr) {
        if (econ.traits.as_product() != nullptr || econ.traits.as_gaussian_copula() != nullptr ||
            econ.traits.as_log_normal_joint() != nullptr) {
            return SortingClass::additive;
        }
        return std::nullopt;
    }
    if (as_binary(econ.production) != nullptr && econ.traits.as_binary_skill() != nullptr) {
        return SortingClass::binary;
    }
    if (as_multiplicative(econ.production) != nullptr &&
        econ.traits.as_log_normal_joint() != nullptr) {
        return SortingClass::multiplicative;
    }
    return std::nullopt;
}

namespace {

double binary_index(const Economy& econ, const WorkerType& x) {
    const auto* b = as_binary(econ.production);
    const auto* d = econ.traits.as_binary_skill();
    double df_low = b->f_hl - b->f_ll;    // F(l,h) - F(l,l)
    double df_high = b->f_hh - b->f_hl;   // F(h,h) - F(h,l)
    double df_own = (x.skill == b->high) ? df_high : df_low;
    if (x.skill != b->high && x.skill != b->low) {
        throw InputError("skill_pref_index: skill must equal one of the binary labels");
    }
    double v = 0.0;
    v += 0.5 * (1.0 - d->g_low.cdf((x.concern + 0.5) * (df_low / df_own) - 0.5));
    v += 0.5 * (1.0 - d->g_high.cdf((x.concern + 0.5) * (df_high / df_own) - 0.5));
    return v;
}

MultiplicativeSortingInfo multiplicative_info(const Economy& econ) {
    const auto* mp = as_multiplicative(econ.production);
    const auto* j = econ.traits.as_log_normal_joint();
    double c = mp->exponent;
    double var_v2 = c * c * j->omega11 - 2.0 * c * j->omega12 + j->omega22;
    if (!(j->omega11 > 0.0)) throw NumericalError("multiplicative sorting: Var(ln x1) = 0");
    if (!(var_v2 > 0.0)) throw NumericalError("multiplicative sorting: Var(v2_bar) = 0");
    MultiplicativeSortingInfo info;
    info.mean_v2 = c * j->delta1 - j->delta2;
    info.sd_v2 = std::sqrt(var_v2);
    info.r = std::sqrt(var_v2 / j->omega11);
    return info;
}

}  // namespace

double skill_pref_index(const Economy& econ, const WorkerType& x) {
    auto cls = detect_sorting_class(econ);
    if (!cls.has_value()) {
        throw UnsupportedCaseError("skill_pref_index: economy outside the supported classes");
    }
    switch (*cls) {
        case SortingClass::additive:
            return 1.0 - econ.traits.concern_marginal().cdf(x.concern);
        case SortingClass::binary:
            return binary_index(econ, x);
        case SortingClass::multiplicative: {
            auto info = multiplicative_info(econ);
            const auto* mp = as_multiplicative(econ.production);
            double v2 = mp->exponent * std::log(x.skill) - std::log(1.0 + 2.0 * x.concern);
            return norm_cdf((v2 - info.mean_v2) / info.sd_v2);
        }
    }
    throw NumericalError("skill_pref_index: unreachable");
}

SortingSolution solve_sorting(const Economy& econ) {
    auto cls = detect_sorting_class(econ);
    if (!cls.has_value()) {
        throw UnsupportedCaseError("solve_sorting: economy outside the supported classes");
    }
    switch (*cls) {
        case SortingClass::additive:
            return solve_sorting_additive(econ);
        case SortingClass::binary:
            return solve_sorting_binary(econ);
        case SortingClass::multiplicative:
            return solve_sorting_multiplicative(econ);
    }
    throw NumericalError("solve_sorting: unreachable");
}

SortingSolution solve_sorting_additive(const Economy& econ) {
    if (as_additive(econ.production) == nullptr ||
        detect_sorting_class(econ) != SortingClass::additive) {
        throw UnsupportedCaseError("solve_sorting_additive: not an additive-class economy");
    }
    Marginal h1 = econ.traits.skill_marginal();
    Marginal h2 = econ.traits.concern_marginal();
    if (!h1.is_continuous() || !h2.is_continuous()) {
        throw InputError("solve_sorting_additive: marginals must be continuous and invertible");
    }
    bool comonotone = false;
    if (const auto* gc = econ.traits.as_gaussian_copula()) {
        comonotone = gc->rho >= 1.0 - 1e-14;
    }
    if (const auto* ln = econ.traits.as_log_normal_joint()) {
        comonotone = ln->omega12 >= std::sqrt(ln->omega11 * ln->omega22) * (1.0 - 1e-14);
    }

    SortingSolution sol;
    sol.cls = SortingClass::additive;
    sol.index = [h2](const WorkerType& x) { return 1.0 - h2.cdf(x.concern); };
    sol.match = [h1, h2](const WorkerType& x) -> WorkerType {
        return {h1.quantile(1.0 - h2.cdf(x.concern)), h2.quantile(1.0 - h1.cdf(x.skill))};
    };
    sol.has_selfmatch_locus = !comonotone;
    if (sol.has_selfmatch_locus) {
        sol.selfmatch_locus = [h1, h2](double x1) { return h2.quantile(1.0 - h1.cdf(x1)); };
    }
    return sol;
}

SortingSolution solve_sorting_binary(const Economy& econ) {
    const auto* b = as_binary(econ.production);
    const auto* d = econ.traits.as_binary_skill();
    if (b == nullptr || d == nullptr) {
        throw UnsupportedCaseError("solve_sorting_binary: needs binary production and traits");
    }
    BinaryDescriptors desc = binary_descriptors(econ.production);

    BinarySortingInfo info;
    info.a_f = desc.a_f;
    info.s_f = desc.s_f;
    // The ratio T_high/T_low is nondecreasing in y. Below its minimum the
    // complementarity is too weak to sustain any self-matching (ybar = 0);
    // above its maximum everyone self-matches (ybar = 1).
    auto ratio = [&](double y) { return t_high(*d, y) / t_low(*d, y); };
    // A relative guard absorbs rounding when a_F sits exactly on a corner of
    // the ratio's range.
    const double guard = 1e-12;
    if (desc.a_f <= ratio(0.0) * (1.0 + guard)) {
        info.ybar = 0.0;
        info.regime = BinaryRegime::all_cross;
    } else if (desc.a_f >= ratio(1.0) * (1.0 - guard)) {
        info.ybar = 1.0;
        info.regime = BinaryRegime::all_self;
    } else {
        info.ybar = bisect_nondecreasing(ratio, 0.0, 1.0, desc.a_f, 1e-12, 200);
        info.regime = BinaryRegime::interior;
    }
    info.cutoff_high = d->g_high.quantile(info.ybar);
    info.cutoff_low = d->g_low.quantile(1.0 - info.ybar);

    if (info.regime == BinaryRegime::interior &&
        (!d->g_low.is_continuous() || !d->g_high.is_continuous())) {
        throw UnsupportedCaseError(
            "solve_sorting_binary: interior cutoff needs continuous concern laws");
    }

    Economy econ_copy = econ;
    SortingSolution sol;
    sol.cls = SortingClass::binary;
    sol.index = [econ_copy](const WorkerType& x) { return binary_index(econ_copy, x); };
    BinarySkillTraits traits = *d;
    double high = d->high, low = d->low;
    sol.match = [traits, info, high, low](const WorkerType& x) -> WorkerType {
        bool is_high = x.skill == high;
        if (!is_high && x.skill != low) {
            throw InputError("binary match: skill must equal one of the binary labels");
        }
        bool crosses;
        if (info.regime == BinaryRegime::all_cross) {
            crosses = true;
        } else if (info.regime == BinaryRegime::all_self) {
            crosses = false;
        } else if (is_high) {
            crosses = x.concern > info.cutoff_high;  // ties self-match
        } else {
            crosses = x.concern < info.cutoff_low;
        }
        if (!crosses) return x;
        if (is_high) {
            return {low, traits.g_low.quantile(1.0 - traits.g_high.cdf(x.concern))};
        }
        return {high, traits.g_high.quantile(1.0 - traits.g_low.cdf(x.concern))};
    };
    // Any concern level on the self-matching side anchors payoffs; the
    // cutoff worker is the canonical representative.
    sol.has_selfmatch_locus = info.regime != BinaryRegime::all_cross;
    if (sol.has_selfmatch_locus) {
        sol.selfmatch_locus = [info, high](double x1) {
            return x1 == high ? info.cutoff_high : info.cutoff_low;
        };
    }
    sol.binary = info;
    return sol;
}

SortingSolution solve_sorting_multiplicative(const Economy& econ) {
    const auto* mp = as_multiplicative(econ.production);
    const auto* j = econ.traits.as_log_normal_joint();
    if (mp == nullptr || j == nullptr) {
        throw UnsupportedCaseError(
            "solve_sorting_multiplicative: needs multiplicative production and log-normal joint "
            "traits");
    }
    MultiplicativeSortingInfo info = multiplicative_info(econ);
    double c = mp->exponent;
    double r = info.r;
    double m = info.mean_v2;
    double d1 = j->delta1;
    double corr = (c * j->omega11 - j->omega12) / (std::sqrt(j->omega11) * info.sd_v2);

    SortingSolution sol;
    sol.cls = SortingClass::multiplicative;
    sol.index = [info, c](const WorkerType& x) {
        double v2 = c * std::log(x.skill) - std::log(1.0 + 2.0 * x.concern);
        return norm_cdf((v2 - info.mean_v2) / info.sd_v2);
    };
    sol.match = [c, r, m, d1](const WorkerType& x) -> WorkerType {
        double v2 = c * std::log(x.skill) - std::log(1.0 + 2.0 * x.concern);
        double ln_mu1 = d1 + (v2 - m) / r;
        double ln_one_plus = c * ln_mu1 - m - r * (std::log(x.skill) - d1);
        return {std::exp(ln_mu1), 0.5 * (std::exp(ln_one_plus) - 1.0)};
    };
    sol.has_selfmatch_locus = corr > -1.0 + 1e-12;
    if (sol.has_selfmatch_locus) {
        double d2 = j->delta2;
        sol.selfmatch_locus = [c, r, d1, d2](double x1) {
            return 0.5 * (std::exp((c - r) * (std::log(x1) - d1) + d2) - 1.0);
        };
    }
    sol.multiplicative = info;
    return sol;
}

SortingStats sorting_stats(const SortingSolution& sol, const std::vector<WorkerType>& sample,
                           const std::vector<WorkerType>& fresh_sample) {
    if (sample.empty() || fresh_sample.empty()) throw InputError("sorting_stats: empty sample");
    const std::size_t n = sample.size();
    std::vector<double> x1(n), mu1(n), mu2(n);
    std::size_t self_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        WorkerType co = sol.match(sample[i]);
        x1[i] = sample[i].skill;
        mu1[i] = co.skill;
        mu2[i] = co.concern;
        bool self = co.skill == sample[i].skill &&
                    std::abs(co.concern - sample[i].concern) <=
                        1e-9 * (1.0 + std::abs(sample[i].concern));
        if (self) ++self_count;
    }
    std::vector<double> f1(fresh_sample.size()), f2(fresh_sample.size());
    for (std::size_t i = 0; i < fresh_sample.size(); ++i) {
        f1[i] = fresh_sample[i].skill;
        f2[i] = fresh_sample[i].concern;
    }
    SortingStats stats;
    stats.corr_skill = pearson_corr(x1, mu1);
    stats.self_match_frac = static_cast<double>(self_count) / static_cast<double>(n);
    stats.feasibility_ks = std::max(ks_statistic(mu1, f1), ks_statistic(mu2, f2));
    stats.feasibility_ks_critical_1pct = ks_critical_value(n, fresh_sample.size(), 0.01);
    return stats;
}

CommonRankingReport verify_assumption1(const ProductionFunction& f,
                                       const TraitDistribution& traits,
                                       const std::vector<std::pair<double, double>>& skill_pairs,
                                       std::size_t n, std::uint64_t seed) {
    if (skill_pairs.size() < 2) {
        throw InputError("verify_assumption1: need at least two distinct skill pairs");
    }
    auto workers = traits.sample(n, seed);
    std::vector<std::vector<double>> ranks;
    ranks.reserve(skill_pairs.size());
    for (const auto& [hi, lo] : skill_pairs) {
        if (!(hi > lo)) throw InputError("verify_assumption1: skill pairs need first > second");
        std::vector<double> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            l[i] = (produce(f, workers[i].skill, hi) - produce(f, workers[i].skill, lo)) /
                   (1.0 + 2.0 * workers[i].concern);
        }
        std::vector<double> sorted = l;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> rank(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto ub = std::upper_bound(sorted.begin(), sorted.end(), l[i]);
            rank[i] = static_cast<double>(ub - sorted.begin()) / static_cast<double>(n);
        }
        ranks.push_back(std::move(rank));
    }
    CommonRankingReport rep;
    rep.pairs_checked = skill_pairs.size();
    for (std::size_t p = 1; p < ranks.size(); ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            rep.max_rank_discrepancy =
                std::max(rep.max_rank_discrepancy, std::abs(ranks[p][i] - ranks[0][i]));
        }
    }
    return rep;
}

}  // namespace relmatch
