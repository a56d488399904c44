#include <doctest.h>

#include <cmath>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"
#include "relmatch/sorting.hpp"

using namespace relmatch;

namespace {

Economy reference_binary() {
    return {make_binary(0.0, 1.0, 0.0, 2.0, 3.0),
            TraitDistribution::binary_skill(0.0, 1.0, Marginal::uniform(0.0, 1.0),
                                            Marginal::uniform(0.0, 1.0))};
}

Economy uniform_additive() {
    return {make_additive(scalar_identity()),
            TraitDistribution::product(Marginal::uniform(0.0, 1.0), Marginal::uniform(0.0, 1.0))};
}

Economy standard_multiplicative() {
    return {make_multiplicative(0.0, 1.0),
            TraitDistribution::log_normal_joint(0.0, 0.0, 1.0, 0.0, 1.0)};
}

}  // namespace

TEST_CASE("skill-preference index per class") {
    Economy add = uniform_additive();
    CHECK(skill_pref_index(add, {0.3, 0.5}) == doctest::Approx(0.5));
    CHECK(skill_pref_index(add, {0.3, 0.2}) == doctest::Approx(0.8));

    Economy bin = reference_binary();
    CHECK(skill_pref_index(bin, {1.0, 0.0}) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(skill_pref_index(bin, {1.0, 1.0 / 6.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(skill_pref_index(bin, {0.0, 5.0 / 6.0}) == doctest::Approx(0.5).epsilon(1e-12));

    Economy mult = standard_multiplicative();
    CHECK(skill_pref_index(mult, {1.0, 0.0}) == doctest::Approx(0.5));

    Economy unsupported{make_multiplicative(0.0, 1.0),
                        TraitDistribution::product(Marginal::uniform(0.5, 1.0),
                                                   Marginal::uniform(0.0, 1.0))};
    CHECK_THROWS_AS(skill_pref_index(unsupported, {0.7, 0.1}), UnsupportedCaseError);
}

TEST_CASE("index decreases in concern at fixed skill") {
    for (const Economy& econ :
         {reference_binary(), uniform_additive(), standard_multiplicative()}) {
        double skill = econ.traits.as_binary_skill() != nullptr ? 1.0 : 0.9;
        double prev = 2.0;
        for (int k = 0; k <= 50; ++k) {
            double x2 = -0.4 + 2.0 * k / 50.0;
            if (econ.traits.as_binary_skill() != nullptr && (x2 < 0.0 || x2 > 1.0)) continue;
            double v = skill_pref_index(econ, {skill, x2});
            CHECK(v <= prev + 1e-12);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
}

TEST_CASE("additive sorting closed form") {
    Economy econ = uniform_additive();
    SortingSolution sol = solve_sorting_additive(econ);
    WorkerType x{0.2, 0.9};
    WorkerType co = sol.match(x);
    CHECK(co.skill == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(co.concern == doctest::Approx(0.8).epsilon(1e-12));

    Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
        WorkerType w{rng.uniform01(), rng.uniform01()};
        CHECK(sol.match(w).skill == doctest::Approx(1.0 - w.concern).epsilon(1e-12));
        WorkerType back = sol.match(sol.match(w));
        CHECK(back.skill == doctest::Approx(w.skill).epsilon(1e-12));
        CHECK(back.concern == doctest::Approx(w.concern).epsilon(1e-12));
    }
    CHECK(sol.selfmatch_locus(0.3) == doctest::Approx(0.7));

    Economy disc{make_additive(scalar_identity()),
                 TraitDistribution::product(Marginal::discrete({0.0, 1.0}, {0.5, 0.5}),
                                            Marginal::uniform(0.0, 1.0))};
    CHECK_THROWS_AS(solve_sorting_additive(disc), InputError);
}

TEST_CASE("binary sorting cutoff and regimes") {
    Economy econ = reference_binary();
    SortingSolution sol = solve_sorting_binary(econ);
    REQUIRE(sol.binary.has_value());
    CHECK(sol.binary->ybar == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    CHECK(sol.binary->regime == BinaryRegime::interior);

    // Symmetric ratio: a_F = 1 puts the cutoff at one half.
    Economy sym{make_binary(0.0, 1.0, 0.0, 1.5, 3.0), econ.traits};
    CHECK(binary_descriptors(sym.production).a_f == doctest::Approx(1.0));
    CHECK(solve_sorting_binary(sym).binary->ybar == doctest::Approx(0.5).epsilon(1e-10));

    // a_F above the ratio's maximum: everyone self-matches.
    Economy corner{make_binary(0.0, 1.0, 0.0, 1.0, 5.0), econ.traits};
    CHECK(binary_descriptors(corner.production).a_f == doctest::Approx(4.0));
    SortingSolution corner_sol = solve_sorting_binary(corner);
    CHECK(corner_sol.binary->ybar == 1.0);
    CHECK(corner_sol.binary->regime == BinaryRegime::all_self);
    WorkerType strong{1.0, 0.99};
    CHECK(corner_sol.match(strong).skill == 1.0);
    CHECK(corner_sol.match(strong).concern == strong.concern);
}

TEST_CASE("binary match map is an involution with the expected structure") {
    Economy econ = reference_binary();
    SortingSolution sol = solve_sorting_binary(econ);
    Rng rng(33);
    for (int i = 0; i < 2000; ++i) {
        WorkerType w{rng.uniform01() < 0.5 ? 1.0 : 0.0, rng.uniform01()};
        WorkerType co = sol.match(w);
        WorkerType back = sol.match(co);
        CHECK(back.skill == w.skill);
        CHECK(back.concern == doctest::Approx(w.concern).epsilon(1e-12));
        bool crosses = co.skill != w.skill;
        if (w.skill == 1.0) {
            CHECK(crosses == (w.concern > sol.binary->cutoff_high));
            if (crosses) CHECK(co.concern <= sol.binary->cutoff_low + 1e-12);
        } else {
            CHECK(crosses == (w.concern < sol.binary->cutoff_low));
            if (crosses) CHECK(co.concern >= sol.binary->cutoff_high - 1e-12);
        }
    }
}

TEST_CASE("cutoff share rises with complementarity") {
    Economy econ = reference_binary();
    double prev = -1.0;
    for (double f_hh = 2.1; f_hh < 8.0; f_hh += 0.25) {
        Economy e{make_binary(0.0, 1.0, 0.0, 2.0, f_hh), econ.traits};
        double ybar = solve_sorting_binary(e).binary->ybar;
        CHECK(ybar >= prev - 1e-12);
        prev = ybar;
    }
}

TEST_CASE("multiplicative sorting closed form") {
    Economy econ = standard_multiplicative();
    SortingSolution sol = solve_sorting_multiplicative(econ);
    REQUIRE(sol.multiplicative.has_value());
    CHECK(sol.multiplicative->r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    WorkerType unit{1.0, 0.0};
    CHECK(sol.match(unit).skill == doctest::Approx(1.0));
    CHECK(sol.match(unit).concern == doctest::Approx(0.0));

    WorkerType e_worker{std::exp(1.0), 0.0};
    CHECK(sol.match(e_worker).skill ==
          doctest::Approx(std::exp(1.0 / std::sqrt(2.0))).epsilon(1e-12));

    auto sample = econ.traits.sample(10000, 77);
    double max_err = 0.0;
    for (const auto& w : sample) {
        WorkerType back = sol.match(sol.match(w));
        max_err = std::max(max_err, std::abs(back.skill - w.skill) / (1.0 + std::abs(w.skill)));
        max_err = std::max(max_err,
                           std::abs(back.concern - w.concern) / (1.0 + std::abs(w.concern)));
    }
    CHECK(max_err < 1e-9);

    // Self-match locus is a fixed point of the map.
    for (double x1 : {0.3, 1.0, 2.5}) {
        double x2 = sol.selfmatch_locus(x1);
        WorkerType w{x1, x2};
        CHECK(sol.match(w).skill == doctest::Approx(x1).epsilon(1e-12));
        CHECK(sol.match(w).concern == doctest::Approx(x2).epsilon(1e-11));
    }

    CHECK_THROWS_AS(
        solve_sorting_multiplicative(Economy{
            make_multiplicative(0.0, 1.0),
            TraitDistribution::log_normal_joint(0.0, 0.0, 1.0, 1.0, 1.0)}),
        NumericalError);
}

TEST_CASE("measure preservation and PAM in the index") {
    const std::size_t n = 100000;
    for (const Economy& econ :
         {uniform_additive(), reference_binary(), standard_multiplicative()}) {
        SortingSolution sol = solve_sorting(econ);
        auto sample = econ.traits.sample(n, 2024);
        auto fresh = econ.traits.sample(n, 4048);
        SortingStats stats = sorting_stats(sol, sample, fresh);
        CHECK(stats.feasibility_ks < stats.feasibility_ks_critical_1pct);

        // PAM between own skill and co-worker index on sampled pairs.
        std::size_t violations = 0;
        for (std::size_t i = 0; i + 1 < 4000; i += 2) {
            const WorkerType& a = sample[i];
            const WorkerType& b = sample[i + 1];
            if (std::abs(a.skill - b.skill) < 1e-12) continue;
            const WorkerType& hi = a.skill > b.skill ? a : b;
            const WorkerType& lo = a.skill > b.skill ? b : a;
            if (sol.index(sol.match(hi)) < sol.index(sol.match(lo)) - 1e-9) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("sorting stats on canonical scenarios") {
    // Comonotone traits force perfectly negative assortative skills.
    Economy nam{make_additive(scalar_identity()),
                TraitDistribution::gaussian_copula(Marginal::uniform(0.0, 1.0),
                                                   Marginal::uniform(0.0, 1.0), 1.0)};
    SortingSolution sol = solve_sorting_additive(nam);
    auto sample = nam.traits.sample(100000, 5);
    auto fresh = nam.traits.sample(100000, 6);
    SortingStats stats = sorting_stats(sol, sample, fresh);
    CHECK(stats.corr_skill == doctest::Approx(-1.0).epsilon(0.01));

    Economy bin = reference_binary();
    SortingSolution bin_sol = solve_sorting_binary(bin);
    auto bin_sample = bin.traits.sample(100000, 7);
    auto bin_fresh = bin.traits.sample(100000, 8);
    SortingStats bin_stats = sorting_stats(bin_sol, bin_sample, bin_fresh);
    CHECK(bin_stats.self_match_frac == doctest::Approx(1.0 / 6.0).epsilon(0.05));
    CHECK(bin_stats.feasibility_ks < bin_stats.feasibility_ks_critical_1pct);
}

TEST_CASE("common-rankings verification") {
    Economy add = uniform_additive();
    auto rep = verify_assumption1(add.production, add.traits, {{0.9, 0.4}, {0.7, 0.1}}, 4000, 3);
    CHECK(rep.max_rank_discrepancy == doctest::Approx(0.0));

    Economy mult = standard_multiplicative();
    rep = verify_assumption1(mult.production, mult.traits, {{2.0, 1.0}, {1.5, 0.7}}, 4000, 3);
    CHECK(rep.max_rank_discrepancy == doctest::Approx(0.0));

    // Tabulated interaction bump: rankings flip between skill pairs.
    auto bumpy = make_tabulated(
        {1.0, 1.5, 2.0},
        {{2.0625, 2.5, 3.0625}, {2.5, 3.0, 3.5}, {3.0625, 3.5, 4.0625}});
    auto traits = TraitDistribution::product(Marginal::uniform(1.0, 2.0),
                                             Marginal::uniform(0.0, 1.0));
    rep = verify_assumption1(bumpy, traits, {{2.0, 1.5}, {1.5, 1.0}}, 4000, 3);
    CHECK(rep.max_rank_discrepancy > 0.05);

    CHECK_THROWS_AS(verify_assumption1(bumpy, traits, {{2.0, 1.5}}, 100, 1), InputError);
}
