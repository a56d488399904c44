#include "relmatch/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"
#include "relmatch/rng.hpp"

namespace relmatch {

PopulationReport population_report(const Economy& econ, const SortingSolution& sol,
                                   const WageSchedule& schedule, std::size_t n,
                                   std::uint64_t seed) {
    if (n == 0) throw InputError("population_report: n must be positive");
    auto workers = econ.traits.sample(n, split_seed(seed, 0));
    auto fresh = econ.traits.sample(n, split_seed(seed, 1));

    std::vector<double> w_own(n), w_co(n), ws_pool, wb_pool, u_pool_gain;
    ws_pool.reserve(2 * n);
    wb_pool.reserve(2 * n);
    std::size_t welfare_ok = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const WorkerType& x = workers[i];
        WorkerType co = sol.match(x);
        w_own[i] = schedule.wage(x);
        w_co[i] = schedule.wage(co);
        ws_pool.push_back(schedule.selfmatch(x.skill));
        ws_pool.push_back(schedule.selfmatch(co.skill));
        wb_pool.push_back(schedule.benchmark(x.skill));
        wb_pool.push_back(schedule.benchmark(co.skill));
        double slack = 1e-9 * (1.0 + std::abs(schedule.benchmark(x.skill)));
        if (schedule.payoff(x) >= schedule.benchmark(x.skill) - slack) ++welfare_ok;
        if (schedule.payoff(co) >= schedule.benchmark(co.skill) - slack) ++welfare_ok;
    }

    PopulationReport rep;
    rep.n = n;
    // Pooled matched population {x_i} U {mu(x_i)}: measure-preserving by
    // construction, so the law-of-total-variance split is exact.
    double mean_pool = 0.0, sq_pool = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_pool += 0.5 * (w_own[i] + w_co[i]);
        sq_pool += 0.5 * (w_own[i] * w_own[i] + w_co[i] * w_co[i]);
    }
    mean_pool /= static_cast<double>(n);
    sq_pool /= static_cast<double>(n);
    rep.mean_w_star = mean_pool;
    rep.var_w_star = sq_pool - mean_pool * mean_pool;
    double wwi = 0.0;
    std::vector<double> pair_mean(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = w_own[i] - w_co[i];
        wwi += 0.25 * d * d;
        pair_mean[i] = 0.5 * (w_own[i] + w_co[i]);
    }
    rep.wwi = wwi / static_cast<double>(n);
    rep.bwi = variance(pair_mean);
    rep.var_w_self = variance(ws_pool);
    rep.var_w_bench = variance(wb_pool);
    rep.welfare_gain_share = static_cast<double>(welfare_ok) / static_cast<double>(2 * n);

    SortingStats stats = sorting_stats(sol, workers, fresh);
    rep.corr_skill = stats.corr_skill;
    rep.self_match_frac = stats.self_match_frac;
    rep.feasibility_ks = stats.feasibility_ks;
    return rep;
}

BinaryWageAtoms binary_wage_atoms(const Economy& econ, const SortingSolution& sol,
                                  double alpha_low) {
    const auto* b = as_binary(econ.production);
    const auto* d = econ.traits.as_binary_skill();
    if (b == nullptr || d == nullptr || !sol.binary.has_value()) {
        throw InputError("binary_wage_atoms: not a binary economy");
    }
    const BinarySortingInfo& info = *sol.binary;
    double y = info.ybar;
    double ws_h = selfmatch_wage(econ.production, b->high);
    double ws_l = selfmatch_wage(econ.production, b->low);
    double wc_h, wc_l;
    if (info.regime == BinaryRegime::all_self) {
        wc_h = ws_h;
        wc_l = ws_l;
    } else {
        Economy e = econ;
        wc_h = payoff_wage_binary(e, sol, {b->high, d->g_high.quantile(std::min(1.0, y + 1e-9))},
                                  alpha_low)
                   .wage;
        wc_l = payoff_wage_binary(e, sol, {b->low, d->g_low.quantile(std::max(0.0, 1.0 - y - 1e-9))},
                                  alpha_low)
                   .wage;
    }
    // Four atoms: self/cross by skill, each skill holding mass 1/2.
    double w[4] = {ws_h, wc_h, ws_l, wc_l};
    double p[4] = {0.5 * y, 0.5 * (1.0 - y), 0.5 * y, 0.5 * (1.0 - y)};
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        m += p[i] * w[i];
        m2 += p[i] * w[i] * w[i];
    }
    BinaryWageAtoms atoms;
    atoms.var_w_star = m2 - m * m;
    atoms.var_w_self = 0.25 * (ws_h - ws_l) * (ws_h - ws_l);
    double wb_h = benchmark_wage(econ, b->high, alpha_low);
    double wb_l = benchmark_wage(econ, b->low, alpha_low);
    atoms.var_w_bench = 0.25 * (wb_h - wb_l) * (wb_h - wb_l);
    return atoms;
}

namespace {

// Cumulative antiderivative table for the additive wage integrals; trades
// the per-worker adaptive quadrature for two lookups when scanning large
// populations.
class AdditiveWageTable {
  public:
    AdditiveWageTable(const Economy& econ, std::size_t panels = 1024)
        : h1_(econ.traits.skill_marginal()), h2_(econ.traits.concern_marginal()) {
        const auto* add = as_additive(econ.production);
        if (add == nullptr) throw InputError("AdditiveWageTable: not additive");
        k_ = add->k;
        lo_ = h1_.support_min();
        hi_ = h1_.support_max();
        if (!std::isfinite(lo_) || !std::isfinite(hi_)) {
            lo_ = h1_.quantile(1e-7);
            hi_ = h1_.quantile(1.0 - 1e-7);
        }
        grid_.resize(panels + 1);
        r_.assign(panels + 1, 0.0);
        p_.assign(panels + 1, 0.0);
        double step = (hi_ - lo_) / static_cast<double>(panels);
        for (std::size_t i = 0; i <= panels; ++i) grid_[i] = lo_ + step * static_cast<double>(i);
        auto fw = [&](double s) {
            double l = ell(s);
            return l * k_.deriv(s) / (1.0 + 2.0 * l);
        };
        auto fp = [&](double s) { return k_.deriv(s) / (1.0 + 2.0 * ell(s)); };
        for (std::size_t i = 1; i <= panels; ++i) {
            double a = grid_[i - 1], b = grid_[i], mid = 0.5 * (a + b);
            r_[i] = r_[i - 1] + (fw(a) + 4.0 * fw(mid) + fw(b)) * (b - a) / 6.0;
            p_[i] = p_[i - 1] + (fp(a) + 4.0 * fp(mid) + fp(b)) * (b - a) / 6.0;
        }
    }

    double ell(double s) const { return h2_.quantile(1.0 - h1_.cdf(s)); }

    PayoffWage eval(const WorkerType& x) const {
        double upper = h1_.quantile(1.0 - h2_.cdf(x.concern));
        double own = k_.value(x.skill);
        double wage_int = at(r_, upper) - at(r_, x.skill);
        double drag_int = at(p_, upper) - at(p_, x.skill);
        return {own + wage_int - x.concern * drag_int, own + wage_int};
    }

  private:
    double at(const std::vector<double>& cum, double s) const {
        double clamped = std::clamp(s, lo_, hi_);
        double pos = (clamped - lo_) / (hi_ - lo_) * static_cast<double>(cum.size() - 1);
        auto i = std::min(static_cast<std::size_t>(pos), cum.size() - 2);
        double frac = pos - static_cast<double>(i);
        return cum[i] + frac * (cum[i + 1] - cum[i]);
    }

    Marginal h1_;
    Marginal h2_;
    ScalarFun k_;
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<double> grid_, r_, p_;
};

struct MonteCarloVariance {
    double var_star = 0.0;
    double var_self = 0.0;
    double var_bench = 0.0;
    double slack = 0.0;  // 3-sigma on the (self - star) variance difference
};

MonteCarloVariance pooled_variances(const Economy& econ, const SortingSolution& sol,
                                    const std::function<PayoffWage(const WorkerType&)>& eval,
                                    double alpha_low, std::size_t n, std::uint64_t seed) {
    auto workers = econ.traits.sample(n, seed);
    std::vector<double> star, self, bench;
    star.reserve(2 * n);
    self.reserve(2 * n);
    bench.reserve(2 * n);
    for (const auto& x : workers) {
        WorkerType co = sol.match(x);
        for (const WorkerType& w : {x, co}) {
            star.push_back(eval(w).wage);
            self.push_back(selfmatch_wage(econ.production, w.skill));
            bench.push_back(benchmark_wage(econ, w.skill, alpha_low));
        }
    }
    MonteCarloVariance out;
    out.var_star = variance(star);
    out.var_self = variance(self);
    out.var_bench = variance(bench);
    // Influence-function standard error of var(self) - var(star) on the
    // common sample.
    double ms = mean(self), mt = mean(star);
    std::vector<double> infl(star.size());
    for (std::size_t i = 0; i < star.size(); ++i) {
        infl[i] = (self[i] - ms) * (self[i] - ms) - (star[i] - mt) * (star[i] - mt);
    }
    out.slack = 3.0 * std::sqrt(variance(infl) / static_cast<double>(infl.size())) + 1e-9;
    return out;
}

ScenarioOutcome judge(const std::string& label, double var_star, double var_self,
                      double var_bench, double slack) {
    ScenarioOutcome o;
    o.label = label;
    o.var_w_star = var_star;
    o.var_w_self = var_self;
    o.var_w_bench = var_bench;
    o.slack = slack;
    o.ordering_violated = var_self < var_star - slack;
    o.cor1_reversal = var_star > var_bench + slack;
    o.cor1ii_violated = var_bench >= var_self - slack && var_bench < var_star - slack;
    return o;
}

}  // namespace

VarianceOrderingReport variance_ordering_suite(ScenarioFamily family, std::size_t n_scenarios,
                                               std::uint64_t seed) {
    VarianceOrderingReport report;
    report.scenarios.reserve(n_scenarios);
    for (std::size_t k = 0; k < n_scenarios; ++k) {
        Rng rng(split_seed(seed, k));
        ScenarioOutcome outcome;
        std::string label = "scenario_" + std::to_string(k);
        if (family == ScenarioFamily::binary) {
            double f_ll = rng.uniform(0.0, 1.0);
            double gap_l = rng.uniform(0.5, 2.0);
            double a_f = rng.uniform(0.1, 3.0);
            double f_hl = f_ll + gap_l;
            double f_hh = f_hl + a_f * gap_l;
            double alpha_low = rng.uniform(0.0, 1.0);
            double lo1 = rng.uniform(0.0, 1.0), w1 = rng.uniform(0.3, 1.5);
            double lo2 = rng.uniform(0.0, 1.0), w2 = rng.uniform(0.3, 1.5);
            Economy econ{make_binary(0.0, 1.0, f_ll, f_hl, f_hh),
                         TraitDistribution::binary_skill(0.0, 1.0,
                                                         Marginal::uniform(lo1, lo1 + w1),
                                                         Marginal::uniform(lo2, lo2 + w2))};
            SortingSolution sol = solve_sorting_binary(econ);
            BinaryWageAtoms atoms = binary_wage_atoms(econ, sol, alpha_low);
            outcome = judge(label, atoms.var_w_star, atoms.var_w_self, atoms.var_w_bench, 1e-9);
        } else if (family == ScenarioFamily::additive) {
            double slope = rng.uniform(0.5, 2.0);
            double a1 = rng.uniform(0.0, 1.0), b1 = a1 + rng.uniform(0.5, 2.0);
            double a2 = rng.uniform(0.0, 0.5), b2 = a2 + rng.uniform(0.3, 1.2);
            double rho = rng.uniform(-0.9, 0.9);
            Economy econ{make_additive(scalar_linear(0.0, slope)),
                         TraitDistribution::gaussian_copula(Marginal::uniform(a1, b1),
                                                            Marginal::uniform(a2, b2), rho)};
            SortingSolution sol = solve_sorting_additive(econ);
            AdditiveWageTable table(econ);
            auto mc = pooled_variances(
                econ, sol, [&](const WorkerType& x) { return table.eval(x); }, 0.5, 20000,
                split_seed(seed, 1000 + k));
            outcome = judge(label, mc.var_star, mc.var_self, mc.var_bench, mc.slack);
        } else {
            double c = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.3, 1.5);
            double d1 = rng.uniform(-0.5, 0.5);
            double w11 = rng.uniform(0.05, 0.4);
            double w22 = rng.uniform(0.02, 0.2);
            double d2 = rng.uniform(4.5, 6.0) * std::sqrt(w22);
            double rho = rng.uniform(-0.8, 0.8);
            double w12 = rho * std::sqrt(w11 * w22);
            // Keep the antiderivative branch q = c/r away from -1.
            double var_v2 = c * c * w11 - 2.0 * c * w12 + w22;
            if (std::abs(c / std::sqrt(var_v2 / w11) + 1.0) < 1e-3) {
                w22 *= 1.5;
                w12 = rho * std::sqrt(w11 * w22);
            }
            Economy econ{make_multiplicative(rng.uniform(0.0, 1.0), c),
                         TraitDistribution::log_normal_joint(d1, d2, w11, w12, w22)};
            SortingSolution sol = solve_sorting_multiplicative(econ);
            auto mc = pooled_variances(
                econ, sol,
                [&](const WorkerType& x) { return payoff_wage_multiplicative(econ, sol, x); },
                0.5, 20000, split_seed(seed, 2000 + k));
            outcome = judge(label, mc.var_star, mc.var_self, mc.var_bench, mc.slack);
        }
        if (outcome.ordering_violated) ++report.ordering_violations;
        if (outcome.cor1ii_violated) ++report.cor1ii_violations;
        if (outcome.cor1_reversal) ++report.reversals_flagged;
        report.scenarios.push_back(std::move(outcome));
    }
    return report;
}

}  // namespace relmatch
