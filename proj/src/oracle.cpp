#include "relmatch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"

namespace relmatch {

DiscreteInstance instance_from_workers(const Economy& econ, std::vector<WorkerType> workers) {
    const std::size_t n = workers.size();
    if (n < 2 || n % 2 != 0) throw InputError("discrete instance: n must be even and >= 2");
    DiscreteInstance inst;
    inst.workers = std::move(workers);
    inst.surplus.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double pi = tu_surplus(econ.production, inst.workers[i], inst.workers[j]);
            if (!std::isfinite(pi)) throw NumericalError("discrete instance: non-finite surplus");
            inst.surplus[i][j] = pi;
            inst.surplus[j][i] = pi;
        }
    }
    return inst;
}

DiscreteInstance build_instance(const Economy& econ, std::size_t n, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0) throw InputError("build_instance: n must be even and >= 2");
    return instance_from_workers(econ, econ.traits.sample(n, seed));
}

namespace {

double matching_value(const DiscreteInstance& inst, const std::vector<std::size_t>& partner) {
    double total = 0.0;
    for (std::size_t i = 0; i < partner.size(); ++i) {
        if (partner[i] > i) total += inst.surplus[i][partner[i]];
    }
    return total;
}

void enumerate_rec(const DiscreteInstance& inst, std::vector<std::size_t>& partner,
                   std::vector<bool>& used, std::size_t from, double acc, double& best,
                   std::vector<std::size_t>& best_partner) {
    const std::size_t n = used.size();
    std::size_t i = from;
    while (i < n && used[i]) ++i;
    if (i == n) {
        if (acc > best) {
            best = acc;
            best_partner = partner;
        }
        return;
    }
    used[i] = true;
    for (std::size_t j = i + 1; j < n; ++j) {
        if (used[j]) continue;
        used[j] = true;
        partner[i] = j;
        partner[j] = i;
        enumerate_rec(inst, partner, used, i + 1, acc + inst.surplus[i][j], best, best_partner);
        used[j] = false;
    }
    used[i] = false;
}

}  // namespace

MatchingResult match_enumerate(const DiscreteInstance& inst) {
    const std::size_t n = inst.workers.size();
    if (n > 12) throw InputError("match_enumerate: n must be <= 12");
    std::vector<std::size_t> partner(n, 0), best_partner(n, 0);
    std::vector<bool> used(n, false);
    double best = -std::numeric_limits<double>::infinity();
    enumerate_rec(inst, partner, used, 0, 0.0, best, best_partner);
    MatchingResult res;
    res.partner = std::move(best_partner);
    res.total_surplus = best;
    res.method = MatchMethod::enumerate;
    return res;
}

MatchingResult match_exact(const DiscreteInstance& inst) {
    const std::size_t n = inst.workers.size();
    if (n > 22) throw InputError("match_exact: n must be <= 22 for the subset DP");
    const std::size_t full = std::size_t{1} << n;
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> dp(full, ninf);
    std::vector<std::uint8_t> choice(full, 0);
    dp[0] = 0.0;
    // dp[mask] = best matching of the workers inside mask; each matching is
    // generated once by always pairing the lowest worker of the mask.
    for (std::size_t mask = 1; mask < full; ++mask) {
        std::size_t ones = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (ones % 2 != 0) continue;
        std::size_t i = static_cast<std::size_t>(__builtin_ctzll(mask));
        double best = ninf;
        std::uint8_t best_j = 0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!(mask & (std::size_t{1} << j))) continue;
            std::size_t rest = mask ^ (std::size_t{1} << i) ^ (std::size_t{1} << j);
            if (dp[rest] == ninf) continue;
            double cand = dp[rest] + inst.surplus[i][j];
            if (cand > best) {
                best = cand;
                best_j = static_cast<std::uint8_t>(j);
            }
        }
        dp[mask] = best;
        choice[mask] = best_j;
    }
    MatchingResult res;
    res.partner.assign(n, 0);
    std::size_t mask = full - 1;
    while (mask != 0) {
        std::size_t i = static_cast<std::size_t>(__builtin_ctzll(mask));
        std::size_t j = choice[mask];
        res.partner[i] = j;
        res.partner[j] = i;
        mask ^= (std::size_t{1} << i) | (std::size_t{1} << j);
    }
    res.total_surplus = dp[full - 1];
    res.method = MatchMethod::bitmask_dp;
    return res;
}

DualResult dual_payoffs(const DiscreteInstance& inst, const MatchingResult& result,
                        const std::vector<double>* initial) {
    const std::size_t n = inst.workers.size();
    if (result.partner.size() != n) throw InputError("dual_payoffs: partner size mismatch");

    // Pair layout: pair p = (a_p, b_p) with a_p < b_p. Parameterise
    // u~_{a} = S_p/2 + t_p, u~_{b} = S_p/2 - t_p, which keeps matched-pair
    // equality exact throughout.
    std::vector<std::size_t> pair_of(n), mate(n);
    std::vector<double> half(n);
    std::vector<int> sign(n);
    std::vector<double> t;
    std::vector<bool> frozen;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = result.partner[i];
        if (j >= n || j == i || result.partner[j] != i) {
            throw InputError("dual_payoffs: matching is not a fixed-point-free involution");
        }
        if (j < i) continue;
        std::size_t p = t.size();
        pair_of[i] = pair_of[j] = p;
        mate[i] = j;
        mate[j] = i;
        half[i] = half[j] = 0.5 * inst.surplus[i][j];
        sign[i] = +1;
        sign[j] = -1;
        const WorkerType& wi = inst.workers[i];
        const WorkerType& wj = inst.workers[j];
        bool clone = wi.skill == wj.skill && wi.concern == wj.concern;
        frozen.push_back(clone);
        double t0 = 0.0;
        if (initial != nullptr && !clone) {
            // Project the guess onto the equality manifold.
            t0 = 0.5 * ((*initial)[i] - (*initial)[j]);
        }
        t.push_back(t0);
    }

    auto value_of = [&](std::size_t i) { return half[i] + sign[i] * t[pair_of[i]]; };
    const double tol = 1e-9;
    const std::size_t max_sweeps = 200;
    std::vector<double> best_t = t;
    double best_viol = std::numeric_limits<double>::infinity();
    std::size_t sweeps_done = 0;
    std::size_t stalled = 0;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        ++sweeps_done;
        double max_viol = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = i + 1; k < n; ++k) {
                if (mate[i] == k) continue;
                double viol = inst.surplus[i][k] - value_of(i) - value_of(k);
                if (viol <= 0.0) continue;
                max_viol = std::max(max_viol, viol);
                std::size_t p = pair_of[i], q = pair_of[k];
                bool fp = frozen[p], fq = frozen[q];
                if (fp && fq) continue;
                if (p == q) {
                    // Same pair but unmatched workers (a,a') cannot occur;
                    // mate check above filters it.
                    continue;
                }
                if (fp) {
                    t[q] += sign[k] * viol;
                } else if (fq) {
                    t[p] += sign[i] * viol;
                } else {
                    t[p] += sign[i] * viol * 0.5;
                    t[q] += sign[k] * viol * 0.5;
                }
            }
        }
        if (max_viol < best_viol) {
            stalled = max_viol < best_viol * (1.0 - 1e-3) ? 0 : stalled + 1;
            best_viol = max_viol;
            best_t = t;
        } else {
            ++stalled;
        }
        if (max_viol <= tol || stalled > 30) break;
    }
    t = best_t;

    // Residual check on the best iterate.
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            if (mate[i] == k) continue;
            resid = std::max(resid, inst.surplus[i][k] - value_of(i) - value_of(k));
        }
    }
    if (resid > 1e-4) {
        throw NumericalError(
            "dual_payoffs: infeasibility beyond tolerance; the matching is unlikely to be "
            "optimal");
    }
    DualResult out;
    out.values.resize(n);
    double lift = resid > tol ? 0.5 * resid : 0.0;
    for (std::size_t i = 0; i < n; ++i) out.values[i] = value_of(i) + lift;
    out.max_violation = resid;
    out.matched_equality_gap = 2.0 * lift;
    out.sweeps = sweeps_done;
    return out;
}

namespace {

MatchingResult binary_closed_form_matching(const Economy& econ, const SortingSolution& sol,
                                           const DiscreteInstance& inst) {
    const auto* b = as_binary(econ.production);
    if (!sol.binary.has_value()) throw InputError("closed_form_matching: missing binary info");
    const std::size_t n = inst.workers.size();
    std::vector<std::size_t> highs, lows;
    for (std::size_t i = 0; i < n; ++i) {
        (inst.workers[i].skill == b->high ? highs : lows).push_back(i);
    }
    auto by_concern = [&](std::vector<std::size_t>& v) {
        std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t c) {
            return inst.workers[a].concern < inst.workers[c].concern;
        });
    };
    by_concern(highs);
    by_concern(lows);
    // Cross-matchers are the strongest-concern highs and weakest-concern
    // lows. With k cross pairs the total surplus is separable in the
    // concern weights, so prefix sums give the exact value of every
    // feasible k; the finite-sample optimum is its argmax over counts that
    // leave both same-skill residues even.
    const std::size_t nh = highs.size(), nl = lows.size();
    if ((nh + nl) % 2 != 0) throw NumericalError("closed_form_matching: odd population");
    auto weight = [&](std::size_t i) { return concern_weight(inst.workers[i].concern); };
    std::vector<double> wh_suffix(nh + 1, 0.0), wl_prefix(nl + 1, 0.0);
    for (std::size_t idx = 0; idx < nh; ++idx) {
        wh_suffix[idx + 1] = wh_suffix[idx] + weight(highs[nh - 1 - idx]);
    }
    for (std::size_t idx = 0; idx < nl; ++idx) {
        wl_prefix[idx + 1] = wl_prefix[idx] + weight(lows[idx]);
    }
    std::size_t kmax = std::min(nh, nl);
    std::size_t k = nh % 2;  // smallest parity-feasible count
    if (k > kmax) throw NumericalError("closed_form_matching: cannot balance skill classes");
    bool have_best = false;
    double best_value = 0.0;
    std::size_t best_k = k;
    for (std::size_t cand = k; cand <= kmax; cand += 2) {
        double value = b->f_hl * (wh_suffix[cand] + wl_prefix[cand]) +
                       b->f_hh * (wh_suffix[nh] - wh_suffix[cand]) +
                       b->f_ll * (wl_prefix[nl] - wl_prefix[cand]);
        if (!have_best || value > best_value + 1e-15 * (1.0 + std::abs(best_value))) {
            have_best = true;
            best_value = value;
            best_k = cand;
        }
    }
    k = best_k;
    MatchingResult res;
    res.partner.assign(n, 0);
    for (std::size_t idx = 0; idx < k; ++idx) {
        std::size_t h = highs[highs.size() - 1 - idx];  // strongest concerns first
        std::size_t l = lows[idx];                      // weakest concerns first
        res.partner[h] = l;
        res.partner[l] = h;
    }
    auto self_pair = [&](const std::vector<std::size_t>& v, std::size_t from, std::size_t to) {
        for (std::size_t idx = from; idx + 1 < to; idx += 2) {
            res.partner[v[idx]] = v[idx + 1];
            res.partner[v[idx + 1]] = v[idx];
        }
    };
    self_pair(highs, 0, highs.size() - k);
    self_pair(lows, k, lows.size());
    res.total_surplus = matching_value(inst, res.partner);
    res.method = MatchMethod::greedy_rank;
    return res;
}

}  // namespace

MatchingResult closed_form_matching(const Economy& econ, const SortingSolution& sol,
                                    const DiscreteInstance& inst) {
    const std::size_t n = inst.workers.size();
    if (sol.cls == SortingClass::binary) return binary_closed_form_matching(econ, sol, inst);
    // Continuous classes: greedy positive-assortative pairing between skill
    // rank and the co-worker index rank.
    std::vector<std::size_t> by_skill(n);
    std::iota(by_skill.begin(), by_skill.end(), std::size_t{0});
    std::sort(by_skill.begin(), by_skill.end(), [&](std::size_t a, std::size_t c) {
        return inst.workers[a].skill > inst.workers[c].skill;
    });
    std::vector<double> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = sol.index(inst.workers[i]);
    std::vector<bool> used(n, false);
    MatchingResult res;
    res.partner.assign(n, 0);
    for (std::size_t a : by_skill) {
        if (used[a]) continue;
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j] || j == a) continue;
            if (best == n || idx[j] > idx[best]) best = j;
        }
        if (best == n) throw NumericalError("closed_form_matching: odd leftover");
        used[a] = true;
        used[best] = true;
        res.partner[a] = best;
        res.partner[best] = a;
    }
    res.total_surplus = matching_value(inst, res.partner);
    res.method = MatchMethod::greedy_rank;
    return res;
}

OracleCompareReport compare_oracle(const Economy& econ,
                                   const std::function<double(const WorkerType&)>& index,
                                   const SortingSolution* sol, const WageSchedule* schedule,
                                   const DiscreteInstance& inst, const MatchingResult& result) {
    const std::size_t n = inst.workers.size();
    OracleCompareReport rep;
    rep.oracle_surplus = result.total_surplus;

    // PAM violations in the oracle matching: a higher-skill worker matched
    // to a strictly lower co-worker index. "Up to ties" exempts co-matched
    // workers and surplus-neutral rearrangements (optimal matchings pick an
    // arbitrary orientation inside tied groups, e.g. the binary cross set);
    // what remains counted is an anti-sorted arrangement the surplus
    // strictly prefers, the signature of a failing common-ranking index.
    std::vector<double> partner_index(n);
    for (std::size_t i = 0; i < n; ++i) partner_index[i] = index(inst.workers[result.partner[i]]);
    const double tie_tol = 1e-9;
    for (std::size_t hi = 0; hi < n; ++hi) {
        for (std::size_t lo = 0; lo < n; ++lo) {
            if (result.partner[hi] == lo) continue;
            if (!(inst.workers[hi].skill > inst.workers[lo].skill + tie_tol)) continue;
            if (!(partner_index[hi] < partner_index[lo] - tie_tol)) continue;
            std::size_t p = result.partner[hi], q = result.partner[lo];
            double swap_delta = inst.surplus[hi][q] + inst.surplus[lo][p] -
                                inst.surplus[hi][p] - inst.surplus[lo][q];
            if (std::abs(swap_delta) > 1e-9 * (1.0 + std::abs(result.total_surplus))) {
                ++rep.pam_violations;
            }
        }
    }

    if (sol != nullptr) {
        rep.has_closed_form = true;
        MatchingResult induced = closed_form_matching(econ, *sol, inst);
        rep.closed_form_surplus = induced.total_surplus;
        rep.surplus_gap_rel = (result.total_surplus - induced.total_surplus) /
                              std::max(1.0, std::abs(result.total_surplus));
    }

    if (schedule != nullptr) {
        DualResult dual = dual_payoffs(inst, result);
        rep.dual_max_violation = dual.max_violation;
        // Bucket workers by skill and concern rank; compare mean implied
        // wages against the closed form.
        std::vector<double> implied(n), closed(n);
        for (std::size_t i = 0; i < n; ++i) {
            const WorkerType& w = inst.workers[i];
            double u = 0.5 * (1.0 + 2.0 * w.concern) * dual.values[i];
            double f_match = produce(econ.production, w.skill, inst.workers[result.partner[i]].skill);
            implied[i] = wage_from_utility(u, w, f_match);
            closed[i] = schedule->wage(w);
        }
        auto rank_bucket = [&](const std::vector<double>& vals, std::size_t buckets) {
            std::vector<double> sorted = vals;
            std::sort(sorted.begin(), sorted.end());
            std::vector<std::size_t> out(n);
            for (std::size_t i = 0; i < n; ++i) {
                auto pos = static_cast<std::size_t>(
                    std::lower_bound(sorted.begin(), sorted.end(), vals[i]) - sorted.begin());
                out[i] = std::min(buckets - 1, pos * buckets / n);
            }
            return out;
        };
        std::vector<double> skills(n), concerns(n);
        for (std::size_t i = 0; i < n; ++i) {
            skills[i] = inst.workers[i].skill;
            concerns[i] = inst.workers[i].concern;
        }
        const std::size_t sb = 4, cb = 8;
        auto sbucket = rank_bucket(skills, sb);
        auto cbucket = rank_bucket(concerns, cb);
        std::vector<double> sum_impl(sb * cb, 0.0), sum_closed(sb * cb, 0.0);
        std::vector<std::size_t> cnt(sb * cb, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t bkt = sbucket[i] * cb + cbucket[i];
            sum_impl[bkt] += implied[i];
            sum_closed[bkt] += closed[i];
            ++cnt[bkt];
        }
        for (std::size_t bkt = 0; bkt < sb * cb; ++bkt) {
            if (cnt[bkt] == 0) continue;
            double gap = std::abs(sum_impl[bkt] - sum_closed[bkt]) / static_cast<double>(cnt[bkt]);
            rep.dual_wage_sup_gap = std::max(rep.dual_wage_sup_gap, gap);
        }
    }
    return rep;
}

}  // namespace relmatch
