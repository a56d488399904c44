#include "relmatch/wages.hpp"

#include <algorithm>
#include <cmath>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"

namespace relmatch {

double selfmatch_wage(const ProductionFunction& f, double x1) {
    return 0.5 * produce(f, x1, x1);
}

namespace {

// Integrates J = int_a^b F(x1, mu1*(x1,s)) (1+2s)^-2 ds. When the interval
// approaches the s -> -0.5 pole, substitute t = ln(1+2s), which turns the
// weight into exp(-t)/2.
double matched_output_integral(const Economy& econ, const SortingSolution& sol, double x1,
                               double a, double b) {
    if (a == b) return 0.0;
    // Keep the path off the anchor endpoint so cutoff ties (resolved toward
    // self-matching) do not leak the self output into the cross segment.
    double eps = 1e-13 * (1.0 + std::abs(a));
    double a_eff = a + (b > a ? eps : -eps);
    auto g = [&](double s) {
        return produce(econ.production, x1, sol.match({x1, s}).skill);
    };
    if (std::min(1.0 + 2.0 * a, 1.0 + 2.0 * b) < 0.25) {
        auto integrand = [&](double t) {
            double s = 0.5 * (std::exp(t) - 1.0);
            return 0.5 * g(s) * std::exp(-t);
        };
        return adaptive_simpson(integrand, std::log(1.0 + 2.0 * a_eff),
                                std::log(1.0 + 2.0 * b), 1e-10);
    }
    auto integrand = [&](double s) {
        double w = 1.0 + 2.0 * s;
        return g(s) / (w * w);
    };
    return adaptive_simpson(integrand, a_eff, b, 1e-10);
}

}  // namespace

PayoffWage payoff_wage_general(const Economy& econ, const SortingSolution& sol,
                               const WorkerType& x) {
    if (!sol.has_selfmatch_locus) {
        throw UnsupportedCaseError(
            "payoff_wage_general: no self-match locus (perfectly negative assortative sorting); "
            "payoffs are pinned down only up to a bargaining split");
    }
    double own = produce(econ.production, x.skill, x.skill);
    double a = sol.selfmatch_locus(x.skill);
    double b = x.concern;
    if (a == b) return {0.5 * own, 0.5 * own};
    double g_a = produce(econ.production, x.skill, sol.match({x.skill, a}).skill);
    double g_b = produce(econ.production, x.skill, sol.match(x).skill);
    double j_int = matched_output_integral(econ, sol, x.skill, a, b);

    auto phi_w = [](double s) { return s / (1.0 + 2.0 * s); };
    // Integration by parts of int phi d g(s): the wage and payoff kernels
    // share the same remainder integral J.
    double wage = 0.5 * own + phi_w(b) * g_b - phi_w(a) * g_a - j_int;
    auto phi_u = [&](double s) { return (s - b) / (1.0 + 2.0 * s); };
    double payoff = 0.5 * own - phi_u(a) * g_a - (1.0 + 2.0 * b) * j_int;
    return {payoff, wage};
}

PayoffWage payoff_wage_additive(const Economy& econ, const WorkerType& x) {
    const auto* add = as_additive(econ.production);
    if (add == nullptr || detect_sorting_class(econ) != SortingClass::additive) {
        throw UnsupportedCaseError("payoff_wage_additive: not an additive-class economy");
    }
    Marginal h1 = econ.traits.skill_marginal();
    Marginal h2 = econ.traits.concern_marginal();
    auto ell = [&](double s) { return h2.quantile(1.0 - h1.cdf(s)); };
    double upper = h1.quantile(1.0 - h2.cdf(x.concern));  // L^{-1}(x2) = mu1*(x)
    double own = 0.5 * produce(econ.production, x.skill, x.skill);
    const auto& kprime = add->k.deriv;
    double wage_int = adaptive_simpson(
        [&](double s) {
            double l = ell(s);
            return l * kprime(s) / (1.0 + 2.0 * l);
        },
        x.skill, upper, 1e-10);
    double drag_int = adaptive_simpson(
        [&](double s) { return kprime(s) / (1.0 + 2.0 * ell(s)); }, x.skill, upper, 1e-10);
    return {own + wage_int - x.concern * drag_int, own + wage_int};
}

PayoffWage payoff_wage_binary(const Economy& econ, const SortingSolution& sol, const WorkerType& x,
                              double alpha_low) {
    const auto* b = as_binary(econ.production);
    const auto* d = econ.traits.as_binary_skill();
    if (b == nullptr || d == nullptr || !sol.binary.has_value()) {
        throw UnsupportedCaseError("payoff_wage_binary: not a binary-class economy");
    }
    const BinarySortingInfo& info = *sol.binary;
    if (info.regime == BinaryRegime::all_cross) {
        // No self-matching anywhere: wages are pinned down only up to a
        // bargaining split. The split must still deter self-match
        // deviations, (1+2x2) w - x2 F(h,l) >= F(x1,x1)/2 across each
        // concern support, which clamps the admissible range.
        double f_hl = b->f_hl;
        auto blocking_floor = [&](double f_own, const Marginal& g) {
            auto bound_at = [&](double x2) { return (0.5 * f_own + x2 * f_hl) / (1.0 + 2.0 * x2); };
            double lo = g.support_min();
            double hi = g.support_max();
            double at_hi = std::isfinite(hi) ? bound_at(hi) : 0.5 * f_hl;
            return std::max(bound_at(lo), at_hi);
        };
        double w_h_min = blocking_floor(b->f_hh, d->g_high);
        double w_l_min = blocking_floor(b->f_ll, d->g_low);
        double w_l_max = f_hl - w_h_min;
        double s_f = binary_descriptors(econ.production).s_f;
        double w_l = 0.5 * b->f_ll + alpha_low * s_f;
        if (w_l_min > w_l_max) {
            w_l = 0.5 * (w_l_min + w_l_max);  // boundary economy: a single point
        } else {
            w_l = std::clamp(w_l, w_l_min, w_l_max);
        }
        double w = x.skill == b->low ? w_l : f_hl - w_l;
        double u = utility(w, f_hl - w, x.concern);
        return {u, w};
    }
    WorkerType co = sol.match(x);
    double own = produce(econ.production, x.skill, x.skill);
    if (co.skill == x.skill) return {0.5 * own, 0.5 * own};
    bool is_high = x.skill == b->high;
    double t_own = is_high ? t_high(*d, info.ybar) : t_low(*d, info.ybar);
    double cross = produce(econ.production, co.skill, x.skill);
    double u = 0.5 * (own + (cross - own) * (1.0 - (1.0 + 2.0 * x.concern) / (2.0 * t_own)));
    double w = 0.5 * (own + (cross - own) * (1.0 - 1.0 / (2.0 * t_own)));
    return {u, w};
}

PayoffWage payoff_wage_multiplicative(const Economy& econ, const SortingSolution& sol,
                                      const WorkerType& x) {
    const auto* mp = as_multiplicative(econ.production);
    const auto* jt = econ.traits.as_log_normal_joint();
    if (mp == nullptr || jt == nullptr || !sol.multiplicative.has_value()) {
        throw UnsupportedCaseError("payoff_wage_multiplicative: not a multiplicative economy");
    }
    if (!sol.has_selfmatch_locus) {
        throw UnsupportedCaseError(
            "payoff_wage_multiplicative: no self-match locus (perfect NAM)");
    }
    double c = mp->exponent;
    double r = sol.multiplicative->r;
    double m = c * jt->delta1 - jt->delta2;
    double q = c / r;
    // Matched output along the concern path: F(x1, mu1*(x1,s)) =
    // (A - 1/c) + B * (1+2s)^(-q).
    double big_b = std::exp(c * (1.0 + q) * std::log(x.skill) + c * jt->delta1 - q * m) / c;
    double ta = 1.0 + 2.0 * sol.selfmatch_locus(x.skill);
    double tb = 1.0 + 2.0 * x.concern;
    double own = produce(econ.production, x.skill, x.skill);

    auto pow_ = [](double t, double e) { return std::exp(e * std::log(t)); };
    double iw, idrag;  // int s/(1+2s) dg and int 1/(1+2s) dg
    if (std::abs(q + 1.0) < 1e-9) {
        iw = 0.5 * big_b * ((tb - std::log(tb)) - (ta - std::log(ta)));
        idrag = big_b * (std::log(tb) - std::log(ta));
    } else {
        auto anti_w = [&](double t) {
            return 0.5 * big_b * (pow_(t, -q) - (q / (q + 1.0)) * pow_(t, -q - 1.0));
        };
        auto anti_drag = [&](double t) { return (q / (q + 1.0)) * big_b * pow_(t, -q - 1.0); };
        iw = anti_w(tb) - anti_w(ta);
        idrag = anti_drag(tb) - anti_drag(ta);
    }
    double wage = 0.5 * own + iw;
    double payoff = 0.5 * own + iw - x.concern * idrag;
    return {payoff, wage};
}

double wage_from_utility(double u, const WorkerType& x, double f_match_output) {
    double wgt = 1.0 + 2.0 * x.concern;
    return 0.5 * (2.0 * u / wgt + (1.0 - 1.0 / wgt) * f_match_output);
}

double benchmark_wage(const Economy& econ, double x1, double alpha_low) {
    if (!(alpha_low >= 0.0 && alpha_low <= 1.0)) {
        throw InputError("benchmark_wage: alpha_low outside [0,1]");
    }
    if (const auto* b = as_binary(econ.production)) {
        BinaryDescriptors desc = binary_descriptors(econ.production);
        if (desc.a_f >= 1.0) return selfmatch_wage(econ.production, x1);
        // Submodular: the benchmark sorting is fully cross-matched and the
        // NAM surplus 2F(h,l)-F(h,h)-F(l,l) is split by bargaining power.
        double surplus = 2.0 * b->f_hl - b->f_hh - b->f_ll;
        double alpha = (x1 == b->low) ? alpha_low : 1.0 - alpha_low;
        if (x1 != b->low && x1 != b->high) {
            throw InputError("benchmark_wage: skill must equal one of the binary labels");
        }
        return 0.5 * (produce(econ.production, x1, x1) + alpha * surplus);
    }
    if (as_additive(econ.production) != nullptr) {
        return selfmatch_wage(econ.production, x1);
    }
    if (const auto* mp = as_multiplicative(econ.production)) {
        if (mp->exponent > 0.0) return selfmatch_wage(econ.production, x1);
        const auto* j = econ.traits.as_log_normal_joint();
        if (j == nullptr) {
            throw UnsupportedCaseError(
                "benchmark_wage: submodular multiplicative benchmark needs log-normal skills");
        }
        // Benchmark sorting is ln mu = 2 delta1 - ln x1, so matched output
        // is constant and marginal-product pricing integrates to
        // w_B(x1) = F(...)/2 anchored at the symmetric point exp(delta1).
        double c = mp->exponent;
        double pair_output = mp->level + (std::exp(2.0 * c * j->delta1) - 1.0) / c;
        return 0.5 * pair_output +
               std::exp(2.0 * c * j->delta1) * (std::log(x1) - j->delta1);
    }
    throw UnsupportedCaseError("benchmark_wage: unsupported production class");
}

WageSchedule make_wage_schedule(const Economy& econ, const SortingSolution& sol,
                                double alpha_low) {
    WageSchedule sched;
    sched.cls = sol.cls;
    sched.alpha_low = alpha_low;
    Economy econ_copy = econ;
    sched.selfmatch = [econ_copy](double x1) { return selfmatch_wage(econ_copy.production, x1); };
    sched.benchmark = [econ_copy, alpha_low](double x1) {
        return benchmark_wage(econ_copy, x1, alpha_low);
    };
    switch (sol.cls) {
        case SortingClass::additive:
            sched.wage = [econ_copy](const WorkerType& x) {
                return payoff_wage_additive(econ_copy, x).wage;
            };
            sched.payoff = [econ_copy](const WorkerType& x) {
                return payoff_wage_additive(econ_copy, x).payoff;
            };
            break;
        case SortingClass::binary: {
            SortingSolution sol_copy = sol;
            sched.wage = [econ_copy, sol_copy, alpha_low](const WorkerType& x) {
                return payoff_wage_binary(econ_copy, sol_copy, x, alpha_low).wage;
            };
            sched.payoff = [econ_copy, sol_copy, alpha_low](const WorkerType& x) {
                return payoff_wage_binary(econ_copy, sol_copy, x, alpha_low).payoff;
            };
            break;
        }
        case SortingClass::multiplicative: {
            SortingSolution sol_copy = sol;
            sched.wage = [econ_copy, sol_copy](const WorkerType& x) {
                return payoff_wage_multiplicative(econ_copy, sol_copy, x).wage;
            };
            sched.payoff = [econ_copy, sol_copy](const WorkerType& x) {
                return payoff_wage_multiplicative(econ_copy, sol_copy, x).payoff;
            };
            break;
        }
    }
    return sched;
}

TruthTellingReport truthtelling_check(const Economy& econ, const SortingSolution& sol,
                                      const WageSchedule& schedule, const WorkerType& x,
                                      const std::vector<double>& candidate_concerns, double tol) {
    auto value_of = [&](double announced) {
        WorkerType pretend{x.skill, announced};
        double w = schedule.wage(pretend);
        double co_skill = sol.match(pretend).skill;
        return (1.0 + 2.0 * x.concern) * w -
               x.concern * produce(econ.production, x.skill, co_skill);
    };
    TruthTellingReport rep;
    rep.truthful_value = value_of(x.concern);
    rep.best_value = rep.truthful_value;
    rep.best_announcement = x.concern;
    for (double a : candidate_concerns) {
        double v = value_of(a);
        if (v > rep.best_value) {
            rep.best_value = v;
            rep.best_announcement = a;
        }
    }
    rep.gap = rep.best_value - rep.truthful_value;
    rep.truthful_optimal = rep.gap <= tol;
    return rep;
}

}  // namespace relmatch
