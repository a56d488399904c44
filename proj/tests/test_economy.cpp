#include <doctest.h>

#include <cmath>

#include "relmatch/economy.hpp"
#include "relmatch/errors.hpp"
#include "relmatch/rng.hpp"

using namespace relmatch;

namespace {
const ProductionFunction kReference = make_binary(0.0, 1.0, 0.0, 2.0, 3.0);
}

TEST_CASE("produce evaluates each representation") {
    CHECK(produce(kReference, 1.0, 0.0) == 2.0);
    CHECK(produce(kReference, 0.0, 1.0) == 2.0);
    CHECK(produce(make_multiplicative(1.0, 1.0), 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(produce(make_additive(scalar_identity()), 0.3, 0.7) == doctest::Approx(1.0));
    CHECK_THROWS_AS(produce(kReference, 0.5, 1.0), InputError);
    CHECK_THROWS_AS(produce(make_multiplicative(0.0, 2.0), -1.0, 1.0), InputError);
}

TEST_CASE("produce symmetry is bit-exact") {
    Rng rng(11);
    auto add = make_additive(scalar_power(1.3, 1.7));
    auto mult = make_multiplicative(0.5, -0.8);
    auto tab = make_tabulated({0.0, 1.0, 2.0},
                              {{0.0, 1.0, 2.0}, {1.0, 2.5, 4.0}, {2.0, 4.0, 6.5}});
    for (int i = 0; i < 200; ++i) {
        double a = rng.uniform(0.05, 2.0);
        double b = rng.uniform(0.05, 2.0);
        CHECK(produce(add, a, b) == produce(add, b, a));
        CHECK(produce(mult, a, b) == produce(mult, b, a));
        CHECK(produce(tab, a, b) == produce(tab, b, a));
    }
    CHECK_THROWS_AS(produce(tab, -0.1, 1.0), InputError);
    CHECK_THROWS_AS(produce(tab, 0.5, 2.3), InputError);
}

TEST_CASE("tabulated production validation") {
    CHECK_THROWS_AS(make_tabulated({0.0, 1.0}, {{0.0, 1.0}, {1.1, 2.0}}), InputError);
    CHECK_THROWS_AS(make_tabulated({0.0, 1.0}, {{0.0, 1.0}, {1.0, 0.5}}), InputError);
    CHECK_THROWS_AS(make_tabulated({1.0, 0.0}, {{0.0, 1.0}, {1.0, 2.0}}), InputError);
}

TEST_CASE("utility basics") {
    CHECK(utility(1.0, 1.0, 5.0) == 1.0);
    CHECK(utility(2.0, 1.0, 0.5) == 2.5);
    CHECK(utility(0.625, 1.375, 0.0) == 0.625);
}

TEST_CASE("tu_surplus values and symmetry") {
    ProductionFunction f2 = make_binary(0.0, 1.0, 1.0, 2.0, 4.0);
    WorkerType a{1.0, 0.0}, b{0.0, 0.0};
    CHECK(tu_surplus(f2, a, b) == doctest::Approx(4.0));

    WorkerType j{1.0, 1.0 / 6.0}, k{0.0, 5.0 / 6.0};
    CHECK(tu_surplus(kReference, j, k) == doctest::Approx(2.25).epsilon(1e-12));

    WorkerType h5{1.0, 0.5};
    CHECK(tu_surplus(kReference, h5, h5) == doctest::Approx(3.0));

    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        WorkerType u{rng.uniform01() > 0.5 ? 1.0 : 0.0, rng.uniform(-0.4, 2.0)};
        WorkerType v{rng.uniform01() > 0.5 ? 1.0 : 0.0, rng.uniform(-0.4, 2.0)};
        CHECK(tu_surplus(kReference, u, v) == tu_surplus(kReference, v, u));
    }
    CHECK_THROWS_AS(tu_surplus(kReference, WorkerType{1.0, -0.6}, k), InputError);
}

TEST_CASE("frontier values and TU consistency") {
    WorkerType j0{0.0, 0.0}, k0{1.0, 0.0};
    ProductionFunction f = kReference;
    CHECK(frontier_psi(f, j0, k0, 1.0) == doctest::Approx(1.0));
    CHECK(frontier_psi(f, j0, k0, 0.0) == doctest::Approx(2.0));
    WorkerType j{0.0, 5.0 / 6.0}, k{1.0, 1.0 / 6.0};
    CHECK(frontier_psi(f, j, k, 0.0) == doctest::Approx(1.5).epsilon(1e-12));

    // Rescaling the frontier must reproduce the TU surplus less the
    // co-worker's rescaled utility.
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        WorkerType a{rng.uniform01() > 0.5 ? 1.0 : 0.0, rng.uniform(-0.45, 2.5)};
        WorkerType b{rng.uniform01() > 0.5 ? 1.0 : 0.0, rng.uniform(-0.45, 2.5)};
        double u = rng.uniform(-2.0, 2.0);
        double lhs = rescale_utility(frontier_psi(f, a, b, u), b.concern);
        double rhs = tu_surplus(f, a, b) - rescale_utility(u, a.concern);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("skill-biased shifts") {
    ProductionFunction shifted = apply_sbtc(kReference, sbtc_from_pair(0.0, 1.0));
    const auto* b = as_binary(shifted);
    REQUIRE(b != nullptr);
    CHECK(b->f_ll == 0.0);
    CHECK(b->f_hl == 3.0);
    CHECK(b->f_hh == 5.0);
    CHECK(binary_descriptors(kReference).s_f == doctest::Approx(0.5));
    CHECK(binary_descriptors(shifted).s_f == doctest::Approx(0.5));  // invariant

    ProductionFunction add = make_additive(scalar_identity());
    ProductionFunction add2 = apply_sbtc(add, sbtc_from_function(scalar_linear(0.0, 0.5)));
    CHECK(produce(add2, 0.2, 0.4) == doctest::Approx(1.5 * 0.6));

    // Shifting a multiplicative function leaves the family but still prices.
    ProductionFunction mult = make_multiplicative(1.0, 1.0);
    ProductionFunction mult2 = apply_sbtc(mult, sbtc_from_function(scalar_linear(0.0, 1.0)));
    CHECK(produce(mult2, 2.0, 3.0) == doctest::Approx(produce(mult, 2.0, 3.0) + 5.0));
    CHECK_THROWS_AS(apply_sbtc(mult, sbtc_from_pair(0.0, 1.0)), InputError);
    CHECK_THROWS_AS(apply_sbtc(kReference, sbtc_from_pair(1.0, 0.5)), InputError);
}

TEST_CASE("global-status reduction") {
    CHECK(reduce_global_status(0.7, 0.0) == doctest::Approx(0.7));
    CHECK(reduce_global_status(0.7, 0.7) == doctest::Approx(0.0));
    CHECK(reduce_global_status(0.5, 0.25) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    // The reduced concern reproduces the rescaled global-status utility for
    // every wage pair.
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        double x2 = rng.uniform(-0.45, 2.0);
        double x3 = rng.uniform(-0.45, 2.0);
        double reduced = reduce_global_status(x2, x3);
        for (int g = 0; g < 5; ++g) {
            double w1 = rng.uniform(-1.0, 3.0);
            double w2 = rng.uniform(-1.0, 3.0);
            double halo = rescaled_halo_utility(w1, w2, x2, x3);
            double base = rescale_utility(utility(w1, w2, reduced), reduced);
            CHECK(halo == doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("binary descriptors") {
    auto d = binary_descriptors(kReference);
    CHECK(d.a_f == doctest::Approx(0.5));
    CHECK(d.s_f == doctest::Approx(0.5));
    auto super = binary_descriptors(make_binary(0.0, 1.0, 0.0, 1.0, 3.0));
    CHECK(super.a_f == doctest::Approx(2.0));
    CHECK(super.s_f == doctest::Approx(-0.5));
    auto modular = binary_descriptors(make_binary(0.0, 1.0, 0.0, 1.0, 2.0));
    CHECK(modular.a_f == doctest::Approx(1.0));
    CHECK(modular.s_f == doctest::Approx(0.0));
    CHECK_THROWS_AS(binary_descriptors(make_additive(scalar_identity())), InputError);
}
