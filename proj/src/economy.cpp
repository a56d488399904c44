#include "relmatch/economy.hpp"

#include <cmath>
#include <memory>

#include "relmatch/errors.hpp"

namespace relmatch {

ScalarFun scalar_identity() {
    return {[](double x) { return x; }, [](double) { return 1.0; }, "x"};
}

ScalarFun scalar_linear(double intercept, double slope) {
    return {[=](double x) { return intercept + slope * x; }, [=](double) { return slope; },
            std::to_string(intercept) + "+" + std::to_string(slope) + "*x"};
}

ScalarFun scalar_power(double coef, double exponent) {
    return {[=](double x) { return coef * std::pow(x, exponent); },
            [=](double x) { return coef * exponent * std::pow(x, exponent - 1.0); },
            std::to_string(coef) + "*x^" + std::to_string(exponent)};
}

ScalarFun scalar_sum(const ScalarFun& a, const ScalarFun& b) {
    auto av = a.value, bv = b.value;
    auto ad = a.deriv, bd = b.deriv;
    return {[av, bv](double x) { return av(x) + bv(x); },
            [ad, bd](double x) { return ad(x) + bd(x); }, a.desc + "+" + b.desc};
}

ScalarFun scalar_hinge(double kink, double slope) {
    return {[=](double x) { return x > kink ? slope * (x - kink) : 0.0; },
            [=](double x) { return x > kink ? slope : 0.0; },
            "hinge@" + std::to_string(kink)};
}

ProductionFunction make_additive(ScalarFun k) { return {AdditiveProduction{std::move(k)}}; }

ProductionFunction make_binary(double low, double high, double f_ll, double f_hl, double f_hh) {
    if (!(high > low)) throw InputError("binary production: requires high > low");
    if (!(f_hh > f_hl && f_hl > f_ll)) {
        throw InputError("binary production: requires F_hh > F_hl > F_ll");
    }
    return {BinaryProduction{low, high, f_ll, f_hl, f_hh}};
}

ProductionFunction make_multiplicative(double level, double exponent) {
    if (exponent == 0.0) throw InputError("multiplicative production: exponent c must be nonzero");
    return {MultiplicativeProduction{level, exponent}};
}

ProductionFunction make_tabulated(std::vector<double> grid,
                                  std::vector<std::vector<double>> values) {
    const std::size_t n = grid.size();
    if (n < 2) throw InputError("tabulated production: need at least a 2x2 grid");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw InputError("tabulated production: grid must be strictly increasing");
        }
    }
    if (values.size() != n) throw InputError("tabulated production: values shape mismatch");
    for (const auto& row : values) {
        if (row.size() != n) throw InputError("tabulated production: values shape mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (values[i][j] != values[j][i]) {
                throw InputError("tabulated production: table must be symmetric");
            }
        }
    }
    // Monotonicity along rows (columns follow by symmetry).
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            if (!(values[i][j] > values[i][j - 1])) {
                throw InputError("tabulated production: table must increase in each argument");
            }
        }
    }
    return {TabulatedProduction{std::move(grid), std::move(values)}};
}

const BinaryProduction* as_binary(const ProductionFunction& f) {
    return std::get_if<BinaryProduction>(&f.repr);
}
const AdditiveProduction* as_additive(const ProductionFunction& f) {
    return std::get_if<AdditiveProduction>(&f.repr);
}
const MultiplicativeProduction* as_multiplicative(const ProductionFunction& f) {
    return std::get_if<MultiplicativeProduction>(&f.repr);
}

namespace {

double binary_lookup(const BinaryProduction& b, double a, double c) {
    auto classify = [&](double s) {
        if (s == b.low) return 0;
        if (s == b.high) return 1;
        throw InputError("binary production: skill must equal the low or high label");
    };
    int i = classify(a), j = classify(c);
    if (i + j == 0) return b.f_ll;
    if (i + j == 1) return b.f_hl;
    return b.f_hh;
}

double tabulated_eval(const TabulatedProduction& t, double a, double c) {
    // Symmetric bilinear interpolation; extrapolation is rejected to keep
    // symmetry and monotonicity checkable.
    double lo = std::min(a, c), hi = std::max(a, c);
    if (lo < t.grid.front() || hi > t.grid.back()) {
        throw InputError("tabulated production: skill outside the tabulated grid");
    }
    auto cell = [&](double x) {
        auto it = std::upper_bound(t.grid.begin(), t.grid.end(), x);
        std::size_t j = static_cast<std::size_t>(it - t.grid.begin());
        if (j == 0) j = 1;
        if (j == t.grid.size()) j = t.grid.size() - 1;
        return j - 1;
    };
    std::size_t i0 = cell(lo), j0 = cell(hi);
    double tx = (lo - t.grid[i0]) / (t.grid[i0 + 1] - t.grid[i0]);
    double ty = (hi - t.grid[j0]) / (t.grid[j0 + 1] - t.grid[j0]);
    double v00 = t.values[i0][j0], v10 = t.values[i0 + 1][j0];
    double v01 = t.values[i0][j0 + 1], v11 = t.values[i0 + 1][j0 + 1];
    return (1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) + tx * ((1.0 - ty) * v10 + ty * v11);
}

}  // namespace

double produce(const ProductionFunction& f, double a, double b) {
    return std::visit(
        [&](const auto& repr) -> double {
            using T = std::decay_t<decltype(repr)>;
            if constexpr (std::is_same_v<T, AdditiveProduction>) {
                return repr.k.value(a) + repr.k.value(b);
            } else if constexpr (std::is_same_v<T, BinaryProduction>) {
                return binary_lookup(repr, a, b);
            } else if constexpr (std::is_same_v<T, MultiplicativeProduction>) {
                if (!(a > 0.0 && b > 0.0)) {
                    throw InputError("multiplicative production: skills must be positive");
                }
                return repr.level + (std::pow(a * b, repr.exponent) - 1.0) / repr.exponent;
            } else if constexpr (std::is_same_v<T, TabulatedProduction>) {
                return tabulated_eval(repr, a, b);
            } else {
                return produce(*repr.base, a, b) + repr.shift.value(a) + repr.shift.value(b);
            }
        },
        f.repr);
}

double utility(double w_own, double w_co, double concern) {
    return w_own + concern * (w_own - w_co);
}

double rescale_utility(double u, double concern) { return 2.0 * u / (1.0 + 2.0 * concern); }

double tu_surplus(const ProductionFunction& f, const WorkerType& j, const WorkerType& k) {
    if (!(j.concern > -0.5) || !(k.concern > -0.5)) {
        throw InputError("tu_surplus: concern must exceed -0.5");
    }
    return produce(f, k.skill, j.skill) * (concern_weight(k.concern) + concern_weight(j.concern));
}

double frontier_psi(const ProductionFunction& f, const WorkerType& j, const WorkerType& k,
                    double u) {
    double wk = concern_weight(k.concern);
    double wj = concern_weight(j.concern);
    return 0.5 / wk * (produce(f, k.skill, j.skill) * (wk + wj) - 2.0 * u * wj);
}

SBTCShift sbtc_from_function(ScalarFun s) {
    SBTCShift out;
    out.s = std::move(s);
    return out;
}

SBTCShift sbtc_from_pair(double s_low, double s_high) {
    if (!(s_high > s_low)) throw InputError("sbtc shift: requires S(high) > S(low)");
    SBTCShift out;
    out.is_binary_pair = true;
    out.s_low = s_low;
    out.s_high = s_high;
    return out;
}

ProductionFunction apply_sbtc(const ProductionFunction& f, const SBTCShift& s) {
    if (const auto* b = as_binary(f)) {
        double sl = s.s_low, sh = s.s_high;
        if (!s.is_binary_pair) {
            sl = s.s.value(b->low);
            sh = s.s.value(b->high);
        }
        if (!(sh > sl)) throw InputError("apply_sbtc: shift must increase in skill");
        return make_binary(b->low, b->high, b->f_ll + 2.0 * sl, b->f_hl + sl + sh,
                           b->f_hh + 2.0 * sh);
    }
    if (s.is_binary_pair) {
        throw InputError("apply_sbtc: binary shift pair requires binary production");
    }
    if (const auto* add = as_additive(f)) {
        return make_additive(scalar_sum(add->k, s.s));
    }
    if (const auto* tab = std::get_if<TabulatedProduction>(&f.repr)) {
        auto shifted = *tab;
        const std::size_t n = shifted.grid.size();
        for (std::size_t i = 1; i < n; ++i) {
            if (!(s.s.value(shifted.grid[i]) > s.s.value(shifted.grid[i - 1]))) {
                throw InputError("apply_sbtc: shift must increase in skill");
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                shifted.values[i][j] += s.s.value(shifted.grid[i]) + s.s.value(shifted.grid[j]);
            }
        }
        return make_tabulated(std::move(shifted.grid), std::move(shifted.values));
    }
    ShiftedProduction wrapped;
    wrapped.base = std::make_shared<ProductionFunction>(f);
    wrapped.shift = s.s;
    return {std::move(wrapped)};
}

double reduce_global_status(double x2, double x3) {
    if (!(x2 > -0.5) || !(x3 > -0.5)) {
        throw InputError("reduce_global_status: concerns must exceed -0.5");
    }
    return (x2 - x3) / (1.0 + 2.0 * x3);
}

double rescaled_halo_utility(double w_own, double w_co, double x2, double x3) {
    return w_own - w_co + (w_own + w_co) * (1.0 + 2.0 * x3) / (1.0 + 2.0 * x2);
}

BinaryDescriptors binary_descriptors(const ProductionFunction& f) {
    const auto* b = as_binary(f);
    if (b == nullptr) throw InputError("binary_descriptors: production is not binary");
    if (b->f_hl == b->f_ll) throw InputError("binary_descriptors: degenerate production");
    BinaryDescriptors d;
    d.a_f = (b->f_hh - b->f_hl) / (b->f_hl - b->f_ll);
    d.s_f = b->f_hl - 0.5 * (b->f_hh + b->f_ll);
    return d;
}

}  // namespace relmatch
