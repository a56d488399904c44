#include <doctest.h>

#include <cmath>

#include "relmatch/errors.hpp"
#include "relmatch/outsourcing.hpp"

using namespace relmatch;

namespace {

OutsourcingScenario reference_scenario(double cost, double alpha_low = 0.5) {
    Economy econ{make_binary(0.0, 1.0, 0.0, 2.0, 3.0),
                 TraitDistribution::binary_skill(0.0, 1.0, Marginal::uniform(0.0, 1.0),
                                                 Marginal::uniform(0.0, 1.0))};
    return {econ, cost, alpha_low};
}

}  // namespace

TEST_CASE("mixed-regime equilibrium of the reference scenario") {
    OutsourcingEquilibrium eqm = solve_outsourcing(reference_scenario(0.2));
    CHECK(eqm.regime == OutsourcingRegime::mixed);
    CHECK(eqm.y_o == doctest::Approx(11.0 / 30.0).epsilon(1e-9));
    CHECK(eqm.w_o_high == doctest::Approx(1.65).epsilon(1e-12));
    CHECK(eqm.w_o_low == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(eqm.w_n_high == doctest::Approx(1.375).epsilon(1e-10));
    CHECK(eqm.w_n_low == doctest::Approx(0.625).epsilon(1e-10));

    // Budget invariants.
    CHECK(eqm.w_o_high + eqm.w_o_low == doctest::Approx(2.0 - 0.2).epsilon(1e-12));
    CHECK(eqm.w_n_high + eqm.w_n_low == doctest::Approx(2.0).epsilon(1e-12));

    // Cost identity c = dw_n (T_low - T_high) at the interior cutoff.
    double dwn = eqm.w_n_high - eqm.w_n_low;
    CHECK(dwn * (eqm.t_low_at_cut - eqm.t_high_at_cut) == doctest::Approx(0.2).epsilon(1e-12));

    // Marginal teams are indifferent; inframarginal non-outsourcers strictly
    // prefer staying in one firm.
    for (double skill : {0.0, 1.0}) {
        double cut = skill == 1.0 ? eqm.t_high_at_cut - 0.5 : eqm.t_low_at_cut - 0.5;
        WorkerType marginal{skill, cut};
        CHECK(eqm.payoff_non_outsourcing(marginal) ==
              doctest::Approx(eqm.payoff_outsourcing(marginal)).epsilon(1e-12));
        double inside = skill == 1.0 ? cut + 0.2 : cut - 0.2;
        WorkerType strict{skill, inside};
        CHECK(eqm.payoff_non_outsourcing(strict) > eqm.payoff_outsourcing(strict));
        CHECK_FALSE(eqm.outsources(strict));
        double outside = skill == 1.0 ? cut - 0.2 : cut + 0.2;
        CHECK(eqm.outsources({skill, outside}));
    }
}

TEST_CASE("regime gate and the costless corner") {
    OutsourcingEquilibrium none = solve_outsourcing(reference_scenario(0.6));
    CHECK(none.regime == OutsourcingRegime::no_outsourcing);
    CHECK(none.baseline.has_value());
    CHECK(none.baseline->binary->ybar == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(none.w_n_high == doctest::Approx(1.375).epsilon(1e-9));
    CHECK_FALSE(none.outsources({1.0, 0.01}));

    OutsourcingEquilibrium free_split = solve_outsourcing(reference_scenario(0.0));
    CHECK(free_split.regime == OutsourcingRegime::mixed);
    CHECK(free_split.t_high_at_cut ==
          doctest::Approx(free_split.t_low_at_cut).epsilon(1e-10));

    // Boundary c = s_F still outsources (weak preference).
    OutsourcingEquilibrium boundary = solve_outsourcing(reference_scenario(0.5));
    CHECK(boundary.regime == OutsourcingRegime::mixed);
}

TEST_CASE("inequality decomposition closed forms") {
    // Post-shift reference economy: F = (0,3,5), c = 0.2, alpha = 0.5.
    OutsourcingScenario scn = reference_scenario(0.2);
    scn.economy.production = apply_sbtc(scn.economy.production, sbtc_from_pair(0.0, 1.0));
    OutsourcingEquilibrium eqm = solve_outsourcing(scn);
    CHECK(eqm.y_o == doctest::Approx(0.42).epsilon(1e-9));
    CHECK(eqm.w_n_high - eqm.w_n_low == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(eqm.w_o_high - eqm.w_o_low == doctest::Approx(2.5).epsilon(1e-12));

    InequalityDecomposition dec = inequality_decomposition(eqm);
    CHECK(dec.wfwi == doctest::Approx(0.2265625).epsilon(1e-8));
    CHECK(dec.bfwi == doctest::Approx(0.658686).epsilon(1e-6));
    CHECK(dec.var_w == doctest::Approx(0.8852485).epsilon(1e-7));
    CHECK(dec.var_w == doctest::Approx(dec.var_w_direct).epsilon(1e-12));

    // Costless outsourcing kills the output-difference term of BFWI.
    OutsourcingEquilibrium free_split = solve_outsourcing(reference_scenario(0.0));
    InequalityDecomposition free_dec = inequality_decomposition(free_split);
    double y = free_split.y_o;
    double dwo = free_split.w_o_high - free_split.w_o_low;
    CHECK(free_dec.bfwi == doctest::Approx(0.25 * y * dwo * dwo).epsilon(1e-12));

    // All-within-firm variance when nobody outsources.
    OutsourcingEquilibrium none = solve_outsourcing(reference_scenario(0.6));
    InequalityDecomposition none_dec = inequality_decomposition(none);
    double dwn = none.w_n_high - none.w_n_low;
    CHECK(none_dec.var_w == doctest::Approx(0.25 * dwn * dwn).epsilon(1e-12));
    CHECK(none_dec.bfwi == doctest::Approx(0.0));
}

TEST_CASE("technology sweep of the reference scenario") {
    auto series = sbtc_sweep(reference_scenario(0.2), sbtc_from_pair(0.0, 1.0), 21);
    REQUIRE(series.size() == 21);
    CHECK(series.front().y_o == doctest::Approx(11.0 / 30.0).epsilon(1e-9));
    CHECK(series.back().y_o == doctest::Approx(0.42).epsilon(1e-9));
    double prev_y = -1.0, prev_var = -1.0, prev_share = -1.0;
    for (const SweepPoint& p : series) {
        CHECK(p.regime == OutsourcingRegime::mixed);
        CHECK(p.y_o >= prev_y - 1e-9);
        CHECK(p.var_w >= prev_var - 1e-9);
        double share = p.bfwi / p.var_w;
        CHECK(share >= prev_share - 1e-9);
        prev_y = p.y_o;
        prev_var = p.var_w;
        prev_share = share;
    }
    // s_F is invariant along the blend: regimes can only change through the
    // cutoff corners, not through the viability gate.
    OutsourcingScenario shifted = reference_scenario(0.2);
    shifted.economy.production =
        apply_sbtc(shifted.economy.production, sbtc_from_pair(0.0, 0.37));
    CHECK(binary_descriptors(shifted.economy.production).s_f == doctest::Approx(0.5));

    CHECK_THROWS_AS(sbtc_sweep(reference_scenario(0.9), sbtc_from_pair(0.0, 1.0), 5),
                    UnsupportedCaseError);
}

TEST_CASE("prop6 derivative condition") {
    auto tight = check_prop6_condition(Marginal::uniform(0.9, 1.0));
    CHECK(tight.passes);
    CHECK(tight.max_derivative < 0.77);
    CHECK(tight.max_derivative == doctest::Approx(0.105).epsilon(0.1));

    auto unit = check_prop6_condition(Marginal::uniform(0.0, 1.0));
    CHECK_FALSE(unit.passes);
    CHECK(unit.boundary_blowup);

    auto shifted = check_prop6_condition(Marginal::uniform(1.0, 2.0));
    CHECK_FALSE(shifted.passes);
    CHECK_FALSE(shifted.boundary_blowup);
    CHECK(shifted.max_derivative == doctest::Approx(1.0).epsilon(0.02));
    CHECK(shifted.threshold == doctest::Approx(4.0 * std::sqrt(3.0) / 9.0));
}
