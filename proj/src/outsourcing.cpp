#include "relmatch/outsourcing.hpp"

#include <cmath>
#include <limits>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"
#include "relmatch/wages.hpp"

namespace relmatch {

OutsourcingEquilibrium solve_outsourcing(const OutsourcingScenario& scn) {
    const auto* b = as_binary(scn.economy.production);
    const auto* d = scn.economy.traits.as_binary_skill();
    if (b == nullptr || d == nullptr) {
        throw InputError("solve_outsourcing: needs binary production and binary-skill traits");
    }
    if (!(scn.cost >= 0.0)) throw InputError("solve_outsourcing: cost must be nonnegative");
    if (!(scn.alpha_low >= 0.0 && scn.alpha_low <= 1.0)) {
        throw InputError("solve_outsourcing: alpha_low outside [0,1]");
    }
    BinaryDescriptors desc = binary_descriptors(scn.economy.production);

    OutsourcingEquilibrium eqm;
    eqm.cost = scn.cost;
    eqm.alpha_low = scn.alpha_low;
    eqm.s_f = desc.s_f;

    if (scn.cost > desc.s_f) {
        // Self-matching beats outsourcing outright; the baseline equilibrium stands.
        eqm.regime = OutsourcingRegime::no_outsourcing;
        eqm.y_o = 0.0;
        SortingSolution baseline = solve_sorting_binary(scn.economy);
        WageSchedule sched = make_wage_schedule(scn.economy, baseline, scn.alpha_low);
        double ybar = baseline.binary->ybar;
        eqm.t_high_at_cut = t_high(*d, ybar);
        eqm.t_low_at_cut = t_low(*d, ybar);
        eqm.w_n_high = sched.wage({b->high, d->g_high.quantile(std::min(1.0, ybar + 1e-12))});
        eqm.w_n_low = sched.wage({b->low, d->g_low.quantile(std::max(0.0, 1.0 - ybar - 1e-12))});
        if (baseline.binary->regime == BinaryRegime::all_self) {
            // No cross teams at all; report the (off-path) cross wage split
            // implied by the bargaining weight.
            eqm.w_n_high = benchmark_wage(scn.economy, b->high, scn.alpha_low);
            eqm.w_n_low = benchmark_wage(scn.economy, b->low, scn.alpha_low);
        }
        eqm.payoff_non_outsourcing = [sched](const WorkerType& x) { return sched.payoff(x); };
        eqm.payoff_outsourcing = [](const WorkerType&) -> double {
            throw UnsupportedCaseError("no outsourcing teams in this regime");
        };
        eqm.outsources = [](const WorkerType&) { return false; };
        eqm.baseline = std::move(baseline);
        return eqm;
    }

    eqm.regime = OutsourcingRegime::mixed;
    double f_hl = b->f_hl;
    double target =
        1.0 - 2.0 * scn.cost / (f_hl - b->f_ll + 2.0 * scn.alpha_low * (scn.cost - desc.s_f));
    auto ratio = [&](double y) { return t_high(*d, y) / t_low(*d, y); };
    double clamped = std::min(ratio(1.0), std::max(ratio(0.0), target));
    eqm.y_o = bisect_nondecreasing(ratio, 0.0, 1.0, clamped, 1e-12, 200);
    eqm.t_high_at_cut = t_high(*d, eqm.y_o);
    eqm.t_low_at_cut = t_low(*d, eqm.y_o);

    double spread = desc.s_f - scn.cost;
    eqm.w_o_high = 0.5 * b->f_hh + (1.0 - scn.alpha_low) * spread;
    eqm.w_o_low = 0.5 * b->f_ll + scn.alpha_low * spread;
    eqm.w_n_high = 0.5 * f_hl + (2.0 * eqm.w_o_high - f_hl) / (4.0 * eqm.t_high_at_cut);
    eqm.w_n_low = 0.5 * f_hl + (2.0 * eqm.w_o_low - f_hl) / (4.0 * eqm.t_low_at_cut);

    double high_label = b->high;
    double w_o_high = eqm.w_o_high, w_o_low = eqm.w_o_low;
    double w_n_high = eqm.w_n_high, w_n_low = eqm.w_n_low;
    eqm.payoff_outsourcing = [=](const WorkerType& x) {
        return x.skill == high_label ? w_o_high : w_o_low;
    };
    eqm.payoff_non_outsourcing = [=](const WorkerType& x) {
        double own = x.skill == high_label ? w_n_high : w_n_low;
        double co = x.skill == high_label ? w_n_low : w_n_high;
        return utility(own, co, x.concern);
    };
    double cut_high = eqm.t_high_at_cut - 0.5;
    double cut_low = eqm.t_low_at_cut - 0.5;
    eqm.outsources = [=](const WorkerType& x) {
        return x.skill == high_label ? x.concern < cut_high : x.concern > cut_low;
    };
    return eqm;
}

InequalityDecomposition inequality_decomposition(const OutsourcingEquilibrium& eqm) {
    InequalityDecomposition out;
    double y = eqm.regime == OutsourcingRegime::mixed ? eqm.y_o : 0.0;
    double dwn = eqm.w_n_high - eqm.w_n_low;
    double dwo = eqm.w_o_high - eqm.w_o_low;
    double c = eqm.cost;
    if (eqm.regime == OutsourcingRegime::no_outsourcing) {
        dwo = 0.0;
        c = 0.0;
    }
    out.wfwi = 0.25 * (1.0 - y) * dwn * dwn;
    out.bfwi = 0.25 * (y * (1.0 - y) * c * c + y * dwo * dwo);
    out.var_w = out.wfwi + out.bfwi;
    out.ratio = out.wfwi > 0.0 ? out.bfwi / out.wfwi
                               : std::numeric_limits<double>::infinity();

    // Direct population variance over the four wage atoms.
    double w[4] = {eqm.w_n_high, eqm.w_n_low, eqm.w_o_high, eqm.w_o_low};
    double p[4] = {0.5 * (1.0 - y), 0.5 * (1.0 - y), 0.5 * y, 0.5 * y};
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        m += p[i] * w[i];
        m2 += p[i] * w[i] * w[i];
    }
    out.var_w_direct = m2 - m * m;
    return out;
}

std::vector<SweepPoint> sbtc_sweep(const OutsourcingScenario& scn, const SBTCShift& shift,
                                   std::size_t steps) {
    if (steps < 2) throw InputError("sbtc_sweep: need at least two sweep points");
    OutsourcingEquilibrium at_zero = solve_outsourcing(scn);
    if (at_zero.regime != OutsourcingRegime::mixed) {
        throw UnsupportedCaseError("sbtc_sweep: scenario is not in the mixed regime at theta=0");
    }
    const auto* b = as_binary(scn.economy.production);
    double s_low = shift.s_low, s_high = shift.s_high;
    if (!shift.is_binary_pair) {
        s_low = shift.s.value(b->low);
        s_high = shift.s.value(b->high);
    }
    if (!(s_high > s_low)) throw InputError("sbtc_sweep: shift must increase in skill");

    std::vector<SweepPoint> series;
    series.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        double theta = static_cast<double>(k) / static_cast<double>(steps - 1);
        OutsourcingScenario blended = scn;
        blended.economy.production =
            make_binary(b->low, b->high, b->f_ll + 2.0 * theta * s_low,
                        b->f_hl + theta * (s_low + s_high), b->f_hh + 2.0 * theta * s_high);
        OutsourcingEquilibrium eqm = solve_outsourcing(blended);
        InequalityDecomposition dec = inequality_decomposition(eqm);
        SweepPoint pt;
        pt.theta = theta;
        pt.regime = eqm.regime;
        pt.y_o = eqm.y_o;
        pt.w_o_high = eqm.w_o_high;
        pt.w_o_low = eqm.w_o_low;
        pt.w_n_high = eqm.w_n_high;
        pt.w_n_low = eqm.w_n_low;
        pt.wfwi = dec.wfwi;
        pt.bfwi = dec.bfwi;
        pt.var_w = dec.var_w;
        pt.ratio = dec.ratio;
        series.push_back(pt);
    }
    return series;
}

Prop6ConditionReport check_prop6_condition(const Marginal& g_low, std::size_t grid) {
    if (grid < 8) throw InputError("check_prop6_condition: grid too coarse");
    Prop6ConditionReport rep;
    rep.threshold = 4.0 * std::sqrt(3.0) / 9.0;
    rep.boundary_blowup = g_low.quantile(0.0) <= 0.0;
    double h = 1.0 / static_cast<double>(grid);
    for (std::size_t k = 1; k + 1 < grid; ++k) {
        double y = static_cast<double>(k) * h;
        double lo = g_low.quantile(y - 0.5 * h);
        double hi = g_low.quantile(y + 0.5 * h);
        if (!(lo > 0.0) || !(hi > 0.0)) {
            throw InputError(
                "check_prop6_condition: quantile must stay positive for the log-derivative "
                "condition");
        }
        double deriv = (std::log(hi) - std::log(lo)) / h;
        rep.max_derivative = std::max(rep.max_derivative, deriv);
    }
    rep.passes = !rep.boundary_blowup && rep.max_derivative <= rep.threshold;
    return rep;
}

}  // namespace relmatch
