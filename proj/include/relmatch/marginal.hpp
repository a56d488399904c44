#pragma once

#include <variant>
#include <vector>

#include "relmatch/rng.hpp"

namespace relmatch {

struct UniformMarginal {
    double a = 0.0;
    double b = 1.0;
};

// scale * exp(Z) + shift with Z ~ N(location, scale_sq). The affine part
// covers derived laws such as x2 = (exp(Z) - 1)/2.
struct LogNormalMarginal {
    double location = 0.0;
    double scale_sq = 1.0;
    double scale = 1.0;
    double shift = 0.0;
};

struct DiscreteMarginal {
    std::vector<double> atoms;    // strictly increasing
    std::vector<double> weights;  // sum to 1 within 1e-12
};

struct EmpiricalMarginal {
    std::vector<double> values;  // stored sorted
};

// One-dimensional distribution: cdf, generalized-inverse quantile, sampling.
class Marginal {
  public:
    static Marginal uniform(double a, double b);
    static Marginal log_normal(double location, double scale_sq, double scale = 1.0,
                               double shift = 0.0);
    static Marginal discrete(std::vector<double> atoms, std::vector<double> weights);
    static Marginal empirical(std::vector<double> values);

    double cdf(double x) const;
    // Left-continuous generalized inverse; matches rank-cutoff semantics.
    double quantile(double p) const;
    double sample(Rng& rng) const;

    double support_min() const;
    double support_max() const;
    bool is_continuous() const;

    // Negation (law of -X); defined for bounded variants.
    Marginal negate() const;

    const UniformMarginal* as_uniform() const { return std::get_if<UniformMarginal>(&repr_); }
    const LogNormalMarginal* as_log_normal() const {
        return std::get_if<LogNormalMarginal>(&repr_);
    }

  private:
    std::variant<UniformMarginal, LogNormalMarginal, DiscreteMarginal, EmpiricalMarginal> repr_;
};

}  // namespace relmatch
