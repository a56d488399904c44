#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "relmatch/economy.hpp"
#include "relmatch/marginal.hpp"

namespace relmatch {

struct ProductTraits {
    Marginal skill;
    Marginal concern;
};

struct GaussianCopulaTraits {
    Marginal skill;
    Marginal concern;
    double rho = 0.0;  // copula parameter of (x1, x2), in [-1, 1]
};

// (ln x1, ln(1+2*x2)) jointly normal with mean (delta1, delta2) and
// covariance [[omega11, omega12], [omega12, omega22]].
struct LogNormalJointTraits {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double omega11 = 1.0;
    double omega12 = 0.0;
    double omega22 = 1.0;
};

// Binary skills with Pr(high) = 0.5; concern law conditional on skill.
struct BinarySkillTraits {
    double low = 0.0;
    double high = 1.0;
    Marginal g_low;   // concern distribution of low-skill workers
    Marginal g_high;  // concern distribution of high-skill workers
};

struct EmpiricalJointTraits {
    std::vector<WorkerType> sample;
};

class TraitDistribution {
  public:
    static TraitDistribution product(Marginal skill, Marginal concern);
    static TraitDistribution gaussian_copula(Marginal skill, Marginal concern, double rho);
    static TraitDistribution log_normal_joint(double delta1, double delta2, double omega11,
                                              double omega12, double omega22);
    // p is the high-skill probability; anything but 0.5 is rejected.
    static TraitDistribution binary_skill(double low, double high, Marginal g_low,
                                          Marginal g_high, double p = 0.5);
    static TraitDistribution empirical_joint(std::vector<WorkerType> sample);

    const BinarySkillTraits* as_binary_skill() const {
        return std::get_if<BinarySkillTraits>(&repr_);
    }
    const LogNormalJointTraits* as_log_normal_joint() const {
        return std::get_if<LogNormalJointTraits>(&repr_);
    }
    const ProductTraits* as_product() const { return std::get_if<ProductTraits>(&repr_); }
    const GaussianCopulaTraits* as_gaussian_copula() const {
        return std::get_if<GaussianCopulaTraits>(&repr_);
    }
    const EmpiricalJointTraits* as_empirical_joint() const {
        return std::get_if<EmpiricalJointTraits>(&repr_);
    }

    // Marginal law of skill / concern. Not available for binary-skill
    // traits (skill is two-atom; concern is a mixture), which the callers
    // that need these never request.
    Marginal skill_marginal() const;
    Marginal concern_marginal() const;

    std::vector<WorkerType> sample(std::size_t n, std::uint64_t seed) const;

  private:
    std::variant<ProductTraits, GaussianCopulaTraits, LogNormalJointTraits, BinarySkillTraits,
                 EmpiricalJointTraits>
        repr_;
};

// Cutoff transforms of the binary model. T_high is nondecreasing, T_low is
// nonincreasing, both positive, so their ratio is a nondecreasing function
// whose root against a_F pins the self-match cutoff.
double t_high(const BinarySkillTraits& d, double y);
double t_low(const BinarySkillTraits& d, double y);

struct ExchangeabilityReport {
    double max_asymmetry = 0.0;
    double tolerance = 0.0;
    bool exchangeable = false;
};

// Monte Carlo check that the copula of (skill, index) is exchangeable:
// builds the empirical copula of ranks on a grid and reports the largest
// |C(u,v) - C(v,u)|.
ExchangeabilityReport check_exchangeable(const TraitDistribution& traits,
                                         const std::function<double(const WorkerType&)>& index,
                                         std::size_t grid_size = 64, std::size_t n = 200000,
                                         std::uint64_t seed = 20240901);

// Trait distribution with the given equilibrium co-worker-skill correlation
// (log-scale correlation for the multiplicative class). The skill marginal
// is preserved.
TraitDistribution construct_rho_scenario(const ProductionFunction& f, const Marginal& skill,
                                         double rho);

// Binary-skill traits equivalent to a Fehr-Schmidt inequity-aversion
// economy: high-skill concern is the law of -beta, low-skill concern the
// law of alpha.
TraitDistribution inequity_aversion_traits(const Marginal& alpha_dist, const Marginal& beta_dist,
                                           double low = 0.0, double high = 1.0);

}  // namespace relmatch
