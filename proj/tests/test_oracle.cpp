#include <doctest.h>

#include <cmath>

#include "relmatch/errors.hpp"
#include "relmatch/oracle.hpp"

using namespace relmatch;

namespace {

Economy reference_binary() {
    return {make_binary(0.0, 1.0, 0.0, 2.0, 3.0),
            TraitDistribution::binary_skill(0.0, 1.0, Marginal::uniform(0.0, 1.0),
                                            Marginal::uniform(0.0, 1.0))};
}

// Stratified reference-economy sample: concern ranks straddle the cutoff
// 1/6 with even cross counts on both sides.
std::vector<WorkerType> stratified_binary_workers() {
    std::vector<WorkerType> w;
    for (double q : {0.05, 0.10, 0.30, 0.45, 0.60, 0.75}) w.push_back({1.0, q});
    for (double q : {0.20, 0.35, 0.50, 0.65, 0.90, 0.95}) w.push_back({0.0, q});
    return w;
}

}  // namespace

TEST_CASE("instances validate and fill the surplus matrix") {
    Economy econ = reference_binary();
    CHECK_THROWS_AS(build_instance(econ, 5, 1), InputError);
    CHECK_THROWS_AS(build_instance(econ, 0, 1), InputError);

    DiscreteInstance two = build_instance(econ, 2, 3);
    MatchingResult res = match_exact(two);
    CHECK(res.partner[0] == 1);
    CHECK(res.total_surplus ==
          doctest::Approx(tu_surplus(econ.production, two.workers[0], two.workers[1])));

    DiscreteInstance inst = build_instance(econ, 12, 3);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) {
            CHECK(inst.surplus[i][j] == inst.surplus[j][i]);
        }
    }

    // Clone pair surplus 2 F(x1,x1) / (1 + 2 x2).
    Economy add{make_additive(scalar_identity()),
                TraitDistribution::product(Marginal::uniform(0.0, 1.0),
                                           Marginal::uniform(0.0, 1.0))};
    DiscreteInstance clones =
        instance_from_workers(add, {{0.4, 0.25}, {0.4, 0.25}});
    CHECK(clones.surplus[0][1] == doctest::Approx(2.0 * 0.8 / 1.5));
}

TEST_CASE("constructed dominant pairing is found") {
    DiscreteInstance inst;
    inst.workers = {{0.0, 0.0}, {0.0, 0.1}, {0.0, 0.2}, {0.0, 0.3}};
    inst.surplus = {{0.0, 5.0, 4.0, 4.0},
                    {5.0, 0.0, 4.0, 4.0},
                    {4.0, 4.0, 0.0, 4.0},
                    {4.0, 4.0, 4.0, 0.0}};
    MatchingResult res = match_exact(inst);
    CHECK(res.partner[0] == 1);
    CHECK(res.partner[2] == 3);
    CHECK(res.total_surplus == doctest::Approx(9.0));
    MatchingResult en = match_enumerate(inst);
    CHECK(en.total_surplus == doctest::Approx(res.total_surplus).epsilon(1e-14));
    CHECK(en.partner == res.partner);
}

TEST_CASE("enumeration agrees with the subset DP") {
    for (Economy econ :
         {reference_binary(),
          Economy{make_additive(scalar_identity()),
                  TraitDistribution::product(Marginal::uniform(0.0, 1.0),
                                             Marginal::uniform(0.0, 1.0))},
          Economy{make_multiplicative(0.0, 1.0),
                  TraitDistribution::log_normal_joint(0.0, 0.0, 1.0, 0.0, 1.0)}}) {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            std::size_t n = 4 + 2 * (seed % 5);  // 4..12
            DiscreteInstance inst = build_instance(econ, n, split_seed(1234, seed));
            MatchingResult dp = match_exact(inst);
            MatchingResult en = match_enumerate(inst);
            CHECK(std::abs(dp.total_surplus - en.total_surplus) <=
                  1e-11 * (1.0 + std::abs(dp.total_surplus)));
            for (std::size_t i = 0; i < n; ++i) CHECK(dp.partner[dp.partner[i]] == i);
        }
    }
}

TEST_CASE("dual payoffs: clone anchoring, feasibility, strong duality") {
    Economy econ = reference_binary();
    // Concern pattern under which self-matching is optimal: the best cross
    // pair has (1+2*0.05)/(1+2*0.9) < a_F.
    DiscreteInstance clones = instance_from_workers(
        econ, {{1.0, 0.05}, {1.0, 0.05}, {0.0, 0.9}, {0.0, 0.9}});
    MatchingResult res = match_exact(clones);
    REQUIRE(res.partner[0] == 1);  // self-matching pattern
    DualResult dual = dual_payoffs(clones, res);
    // Clone pairs split equally: u~ = F(x1,x1) / (1 + 2 x2).
    for (std::size_t i = 0; i < 4; ++i) {
        double f_own = produce(econ.production, clones.workers[i].skill, clones.workers[i].skill);
        CHECK(dual.values[i] ==
              doctest::Approx(f_own / (1.0 + 2.0 * clones.workers[i].concern)).epsilon(1e-9));
    }

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        DiscreteInstance inst = build_instance(econ, 12, split_seed(777, seed));
        MatchingResult res12 = match_exact(inst);
        DualResult d = dual_payoffs(inst, res12);
        double total = 0.0;
        for (std::size_t i = 0; i < 12; ++i) {
            total += d.values[i];
            for (std::size_t j = i + 1; j < 12; ++j) {
                CHECK(d.values[i] + d.values[j] >= inst.surplus[i][j] - 1e-9);
            }
        }
        CHECK(total == doctest::Approx(res12.total_surplus).epsilon(1e-9));
        for (std::size_t i = 0; i < 12; ++i) {
            std::size_t j = res12.partner[i];
            CHECK(d.values[i] + d.values[j] ==
                  doctest::Approx(inst.surplus[i][j]).epsilon(1e-8));
        }
    }
}

TEST_CASE("stratified instances reproduce the closed-form pattern exactly") {
    Economy econ = reference_binary();
    SortingSolution sol = solve_sorting_binary(econ);
    DiscreteInstance inst = instance_from_workers(econ, stratified_binary_workers());
    MatchingResult dp = match_exact(inst);
    MatchingResult induced = closed_form_matching(econ, sol, inst);
    CHECK(std::abs(dp.total_surplus - induced.total_surplus) <=
          1e-12 * (1.0 + std::abs(dp.total_surplus)));
    // Pattern: ranks 0.05, 0.10 self-match; the four strongest highs cross.
    for (std::size_t i = 0; i < inst.workers.size(); ++i) {
        bool crosses_dp = inst.workers[dp.partner[i]].skill != inst.workers[i].skill;
        bool crosses_cf = inst.workers[induced.partner[i]].skill != inst.workers[i].skill;
        CHECK(crosses_dp == crosses_cf);
        if (inst.workers[i].skill == 1.0) {
            CHECK(crosses_dp == (inst.workers[i].concern > 1.0 / 6.0));
        }
    }
    WageSchedule sched = make_wage_schedule(econ, sol, 0.5);
    OracleCompareReport rep = compare_oracle(econ, sol.index, &sol, &sched, inst, dp);
    CHECK(rep.surplus_gap_rel == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.pam_violations == 0);
}

TEST_CASE("oracle dominates the induced matching; binary gap is zero") {
    Economy econ = reference_binary();
    SortingSolution sol = solve_sorting_binary(econ);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        DiscreteInstance inst = build_instance(econ, 12, split_seed(4242, seed));
        MatchingResult dp = match_exact(inst);
        MatchingResult induced = closed_form_matching(econ, sol, inst);
        CHECK(dp.total_surplus >= induced.total_surplus - 1e-11);
        CHECK(std::abs(dp.total_surplus - induced.total_surplus) <=
              1e-9 * (1.0 + std::abs(dp.total_surplus)));
    }
}

TEST_CASE("continuous-class oracle comparisons") {
    Economy add{make_additive(scalar_identity()),
                TraitDistribution::product(Marginal::uniform(0.0, 1.0),
                                           Marginal::uniform(0.0, 1.0))};
    SortingSolution sol = solve_sorting_additive(add);
    WageSchedule sched = make_wage_schedule(add, sol, 0.5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DiscreteInstance inst = build_instance(add, 20, split_seed(31337, seed));
        MatchingResult dp = match_exact(inst);
        OracleCompareReport rep = compare_oracle(add, sol.index, &sol, &sched, inst, dp);
        CHECK(rep.pam_violations == 0);
        CHECK(rep.surplus_gap_rel >= -1e-11);
    }
}

TEST_CASE("assumption-violating economy shows PAM violations") {
    auto bumpy = make_tabulated(
        {1.0, 1.5, 2.0},
        {{2.0625, 2.5, 3.0625}, {2.5, 3.0, 3.5}, {3.0625, 3.5, 4.0625}});
    Economy econ{bumpy, TraitDistribution::product(Marginal::uniform(1.0, 2.0),
                                                   Marginal::uniform(0.0, 4.0))};
    // Rank of L under the widest skill pair as the reference index.
    auto probe = econ.traits.sample(4000, 11);
    std::vector<double> ls(probe.size());
    for (std::size_t i = 0; i < probe.size(); ++i) {
        ls[i] = (produce(econ.production, probe[i].skill, 2.0) -
                 produce(econ.production, probe[i].skill, 1.0)) /
                (1.0 + 2.0 * probe[i].concern);
    }
    std::sort(ls.begin(), ls.end());
    auto index = [&](const WorkerType& x) {
        double l = (produce(econ.production, x.skill, 2.0) -
                    produce(econ.production, x.skill, 1.0)) /
                   (1.0 + 2.0 * x.concern);
        return static_cast<double>(std::upper_bound(ls.begin(), ls.end(), l) - ls.begin()) /
               static_cast<double>(ls.size());
    };
    std::size_t total_violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        DiscreteInstance inst = build_instance(econ, 12, split_seed(5150, seed));
        MatchingResult dp = match_exact(inst);
        OracleCompareReport rep = compare_oracle(econ, index, nullptr, nullptr, inst, dp);
        total_violations += rep.pam_violations;
    }
    CHECK(total_violations > 0);
}

TEST_CASE("large-sample dual wages approach the closed form") {
    Economy econ = reference_binary();
    SortingSolution sol = solve_sorting_binary(econ);
    WageSchedule sched = make_wage_schedule(econ, sol, 0.5);
    DiscreteInstance inst = build_instance(econ, 2000, 20240215);
    MatchingResult induced = closed_form_matching(econ, sol, inst);

    std::vector<double> init(inst.workers.size());
    for (std::size_t i = 0; i < inst.workers.size(); ++i) {
        init[i] = rescale_utility(sched.payoff(inst.workers[i]), inst.workers[i].concern);
    }
    DualResult dual = dual_payoffs(inst, induced, &init);
    CHECK(dual.max_violation <= 1e-4);

    // Mean implied payoff per (skill, concern decile) bucket vs closed form.
    double sup_gap = 0.0;
    std::vector<double> sums(20, 0.0);
    std::vector<std::size_t> counts(20, 0);
    std::vector<double> closed(20, 0.0);
    for (std::size_t i = 0; i < inst.workers.size(); ++i) {
        const WorkerType& w = inst.workers[i];
        auto decile = std::min<std::size_t>(9, static_cast<std::size_t>(w.concern * 10.0));
        std::size_t bkt = (w.skill == 1.0 ? 10 : 0) + decile;
        sums[bkt] += 0.5 * (1.0 + 2.0 * w.concern) * dual.values[i];
        closed[bkt] += sched.payoff(w);
        ++counts[bkt];
    }
    for (std::size_t b = 0; b < 20; ++b) {
        if (counts[b] == 0) continue;
        sup_gap = std::max(sup_gap, std::abs(sums[b] - closed[b]) /
                                        static_cast<double>(counts[b]));
    }
    CHECK(sup_gap < 1e-2);
}
