#include "relmatch/traits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"

namespace relmatch {

namespace {

void require_concern_support(const Marginal& m, const char* who) {
    if (m.support_min() < -0.5) {
        throw InputError(std::string(who) + ": concern support must lie in (-0.5, inf)");
    }
}

}  // namespace

TraitDistribution TraitDistribution::product(Marginal skill, Marginal concern) {
    require_concern_support(concern, "product traits");
    TraitDistribution d;
    d.repr_ = ProductTraits{std::move(skill), std::move(concern)};
    return d;
}

TraitDistribution TraitDistribution::gaussian_copula(Marginal skill, Marginal concern,
                                                     double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw InputError("gaussian copula: rho outside [-1,1]");
    require_concern_support(concern, "gaussian copula traits");
    TraitDistribution d;
    d.repr_ = GaussianCopulaTraits{std::move(skill), std::move(concern), rho};
    return d;
}

TraitDistribution TraitDistribution::log_normal_joint(double delta1, double delta2,
                                                      double omega11, double omega12,
                                                      double omega22) {
    if (!(omega11 > 0.0) || !(omega22 > 0.0)) {
        throw InputError("log-normal joint: diagonal variances must be positive");
    }
    if (omega11 * omega22 - omega12 * omega12 < -1e-12) {
        throw InputError("log-normal joint: covariance matrix must be positive semidefinite");
    }
    TraitDistribution d;
    d.repr_ = LogNormalJointTraits{delta1, delta2, omega11, omega12, omega22};
    return d;
}

TraitDistribution TraitDistribution::binary_skill(double low, double high, Marginal g_low,
                                                  Marginal g_high, double p) {
    if (p != 0.5) {
        throw InputError(
            "binary-skill traits: Pr(high) must be 0.5; unequal shares split the economy into a "
            "self-matching remainder plus a balanced sub-economy, so p=0.5 is the canonical form");
    }
    if (!(high > low)) throw InputError("binary-skill traits: requires high > low");
    require_concern_support(g_low, "binary-skill traits (G_low)");
    require_concern_support(g_high, "binary-skill traits (G_high)");
    TraitDistribution d;
    d.repr_ = BinarySkillTraits{low, high, std::move(g_low), std::move(g_high)};
    return d;
}

TraitDistribution TraitDistribution::empirical_joint(std::vector<WorkerType> sample) {
    if (sample.empty()) throw InputError("empirical joint traits: empty sample");
    for (const auto& w : sample) {
        if (!(w.concern > -0.5)) {
            throw InputError("empirical joint traits: concern must exceed -0.5");
        }
    }
    TraitDistribution d;
    d.repr_ = EmpiricalJointTraits{std::move(sample)};
    return d;
}

Marginal TraitDistribution::skill_marginal() const {
    return std::visit(
        [&](const auto& r) -> Marginal {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ProductTraits> ||
                          std::is_same_v<T, GaussianCopulaTraits>) {
                return r.skill;
            } else if constexpr (std::is_same_v<T, LogNormalJointTraits>) {
                return Marginal::log_normal(r.delta1, r.omega11);
            } else if constexpr (std::is_same_v<T, BinarySkillTraits>) {
                return Marginal::discrete({r.low, r.high}, {0.5, 0.5});
            } else {
                std::vector<double> xs(r.sample.size());
                for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = r.sample[i].skill;
                return Marginal::empirical(std::move(xs));
            }
        },
        repr_);
}

Marginal TraitDistribution::concern_marginal() const {
    return std::visit(
        [&](const auto& r) -> Marginal {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ProductTraits> ||
                          std::is_same_v<T, GaussianCopulaTraits>) {
                return r.concern;
            } else if constexpr (std::is_same_v<T, LogNormalJointTraits>) {
                // x2 = (exp(b) - 1)/2 with b ~ N(delta2, omega22).
                return Marginal::log_normal(r.delta2, r.omega22, 0.5, -0.5);
            } else if constexpr (std::is_same_v<T, BinarySkillTraits>) {
                throw UnsupportedCaseError(
                    "concern marginal of binary-skill traits is a mixture; use the conditional "
                    "laws g_low/g_high");
            } else {
                std::vector<double> xs(r.sample.size());
                for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = r.sample[i].concern;
                return Marginal::empirical(std::move(xs));
            }
        },
        repr_);
}

std::vector<WorkerType> TraitDistribution::sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw InputError("sample: n must be at least 1");
    Rng rng(seed);
    std::vector<WorkerType> out;
    out.reserve(n);
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            for (std::size_t i = 0; i < n; ++i) {
                if constexpr (std::is_same_v<T, ProductTraits>) {
                    double x1 = r.skill.quantile(rng.uniform01());
                    double x2 = r.concern.quantile(rng.uniform01());
                    out.push_back({x1, x2});
                } else if constexpr (std::is_same_v<T, GaussianCopulaTraits>) {
                    double z1 = rng.normal();
                    double z2;
                    if (r.rho >= 1.0) {
                        z2 = z1;
                    } else if (r.rho <= -1.0) {
                        z2 = -z1;
                    } else {
                        z2 = r.rho * z1 + std::sqrt(1.0 - r.rho * r.rho) * rng.normal();
                    }
                    out.push_back({r.skill.quantile(norm_cdf(z1)),
                                   r.concern.quantile(norm_cdf(z2))});
                } else if constexpr (std::is_same_v<T, LogNormalJointTraits>) {
                    double z1 = rng.normal();
                    double z2 = rng.normal();
                    double a = r.delta1 + std::sqrt(r.omega11) * z1;
                    double cond_var = std::max(0.0, r.omega22 - r.omega12 * r.omega12 / r.omega11);
                    double b = r.delta2 + (r.omega12 / r.omega11) * (a - r.delta1) +
                               std::sqrt(cond_var) * z2;
                    out.push_back({std::exp(a), 0.5 * (std::exp(b) - 1.0)});
                } else if constexpr (std::is_same_v<T, BinarySkillTraits>) {
                    bool is_high = rng.uniform01() < 0.5;
                    const Marginal& g = is_high ? r.g_high : r.g_low;
                    out.push_back({is_high ? r.high : r.low, g.quantile(rng.uniform01())});
                } else {
                    auto idx = static_cast<std::size_t>(rng.uniform01() *
                                                        static_cast<double>(r.sample.size()));
                    idx = std::min(idx, r.sample.size() - 1);
                    out.push_back(r.sample[idx]);
                }
            }
        },
        repr_);
    return out;
}

double t_high(const BinarySkillTraits& d, double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw InputError("t_high: y outside [0,1]");
    return d.g_high.quantile(y) + 0.5;
}

double t_low(const BinarySkillTraits& d, double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw InputError("t_low: y outside [0,1]");
    return d.g_low.quantile(1.0 - y) + 0.5;
}

ExchangeabilityReport check_exchangeable(const TraitDistribution& traits,
                                         const std::function<double(const WorkerType&)>& index,
                                         std::size_t grid_size, std::size_t n,
                                         std::uint64_t seed) {
    auto workers = traits.sample(n, seed);
    std::vector<double> xs(n), vs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = workers[i].skill;
        vs[i] = index(workers[i]);
    }
    auto ranks = [&](std::vector<double>& v) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return v[a] < v[b];
        });
        std::vector<double> r(n);
        for (std::size_t k = 0; k < n; ++k) {
            r[order[k]] = (static_cast<double>(k) + 1.0) / static_cast<double>(n);
        }
        return r;
    };
    std::vector<double> u = ranks(xs);
    std::vector<double> v = ranks(vs);

    // Bin the rank pairs, then cumulative counts give the empirical copula
    // at the grid nodes (k/g, l/g).
    const std::size_t g = grid_size;
    std::vector<std::vector<double>> count(g, std::vector<double>(g, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        auto a = static_cast<std::size_t>(std::ceil(u[i] * static_cast<double>(g))) - 1;
        auto b = static_cast<std::size_t>(std::ceil(v[i] * static_cast<double>(g))) - 1;
        count[std::min(a, g - 1)][std::min(b, g - 1)] += 1.0;
    }
    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t b = 1; b < g; ++b) count[a][b] += count[a][b - 1];
    }
    for (std::size_t b = 0; b < g; ++b) {
        for (std::size_t a = 1; a < g; ++a) count[a][b] += count[a - 1][b];
    }
    double max_asym = 0.0;
    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            max_asym = std::max(max_asym, std::abs(count[a][b] - count[b][a]));
        }
    }
    ExchangeabilityReport rep;
    rep.max_asymmetry = max_asym / static_cast<double>(n);
    rep.tolerance = 3.0 * std::sqrt(0.5 / static_cast<double>(n));
    rep.exchangeable = rep.max_asymmetry <= rep.tolerance;
    return rep;
}

namespace {

// Correlation of (X, Y) with common marginal m and Gaussian copula gamma.
// Closed forms exist for the uniform and log-normal families.
double common_marginal_gaussian_corr(const Marginal& m, double gamma) {
    if (m.as_uniform() != nullptr) {
        return (6.0 / std::acos(-1.0)) * std::asin(0.5 * gamma);
    }
    const auto* ln = m.as_log_normal();
    if (ln != nullptr && ln->shift == 0.0 && ln->scale > 0.0) {
        double w = ln->scale_sq;
        return (std::exp(gamma * w) - 1.0) / (std::exp(w) - 1.0);
    }
    throw UnsupportedCaseError(
        "construct_rho_scenario: additive construction needs a uniform or log-normal skill "
        "marginal");
}

}  // namespace

TraitDistribution construct_rho_scenario(const ProductionFunction& f, const Marginal& skill,
                                         double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw InputError("construct_rho_scenario: rho in [-1,1]");
    if (as_additive(f) != nullptr) {
        // Co-worker skill is the decreasing rearrangement of the concern
        // rank, so (X1, mu1) carries the Gaussian copula with the OPPOSITE
        // parameter of the (x1,x2) copula. Solve for the parameter that
        // hits the requested correlation, then flip its sign.
        double lo = -1.0, hi = 1.0;
        double target = rho;
        double flo = common_marginal_gaussian_corr(skill, lo);
        double fhi = common_marginal_gaussian_corr(skill, hi);
        if (target < flo - 1e-9 || target > fhi + 1e-9) {
            throw InputError(
                "construct_rho_scenario: requested correlation unattainable for this skill "
                "marginal");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            double mid = 0.5 * (lo + hi);
            if (common_marginal_gaussian_corr(skill, mid) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        double gamma = 0.5 * (lo + hi);
        return TraitDistribution::gaussian_copula(skill, Marginal::uniform(0.0, 1.0), -gamma);
    }
    if (const auto* b = as_binary(f)) {
        BinaryDescriptors d = binary_descriptors(f);
        // In the cutoff family T_h(y) = 1 + y + (1-p) a_F and
        // T_l(y) = 2 - y + (1+p)/a_F the interior cutoff is
        // y = a_F/(1+a_F) + p and Corr(X1, mu1) = 2*clamp01(y) - 1, so the
        // family parameter that delivers correlation rho is explicit.
        double p = 0.5 * (1.0 + rho) - d.a_f / (1.0 + d.a_f);
        Marginal g_high = Marginal::uniform(0.5 + (1.0 - p) * d.a_f, 1.5 + (1.0 - p) * d.a_f);
        Marginal g_low =
            Marginal::uniform(0.5 + (1.0 + p) / d.a_f, 1.5 + (1.0 + p) / d.a_f);
        return TraitDistribution::binary_skill(b->low, b->high, std::move(g_low),
                                               std::move(g_high));
    }
    if (const auto* mp = as_multiplicative(f)) {
        const auto* ln = skill.as_log_normal();
        if (ln == nullptr || ln->shift != 0.0 || ln->scale <= 0.0) {
            throw InputError(
                "construct_rho_scenario: multiplicative class needs a log-normal skill marginal");
        }
        double c = mp->exponent;
        double sgn = c > 0.0 ? 1.0 : -1.0;
        // Log-scale co-worker correlation within the family
        // omega22 = 4 c^2 omega11, omega12 = p * 2|c| omega11 equals
        // (sgn - 2p)/sqrt(5 - 4 p sgn), decreasing in p; invert by bisection.
        auto corr_of = [&](double p) { return (sgn - 2.0 * p) / std::sqrt(5.0 - 4.0 * p * sgn); };
        double lo = -1.0, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            double mid = 0.5 * (lo + hi);
            if (corr_of(mid) > rho) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        double p = 0.5 * (lo + hi);
        double w11 = ln->scale_sq;
        double w22 = 4.0 * c * c * w11;
        double w12 = p * std::sqrt(w11 * w22);
        return TraitDistribution::log_normal_joint(ln->location, 0.0, w11, w12, w22);
    }
    throw UnsupportedCaseError("construct_rho_scenario: unsupported production class");
}

TraitDistribution inequity_aversion_traits(const Marginal& alpha_dist, const Marginal& beta_dist,
                                           double low, double high) {
    if (alpha_dist.support_min() < 0.0) {
        throw InputError("inequity aversion: alpha support must lie in [0, inf)");
    }
    if (beta_dist.support_min() < 0.0 || beta_dist.support_max() >= 0.5) {
        throw InputError("inequity aversion: beta support must lie in [0, 0.5)");
    }
    return TraitDistribution::binary_skill(low, high, alpha_dist, beta_dist.negate());
}

}  // namespace relmatch
