#include "relmatch/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relmatch/errors.hpp"
#include "relmatch/numeric.hpp"

namespace relmatch {

Marginal Marginal::uniform(double a, double b) {
    if (!(b > a)) throw InputError("uniform marginal: requires b > a");
    Marginal m;
    m.repr_ = UniformMarginal{a, b};
    return m;
}

Marginal Marginal::log_normal(double location, double scale_sq, double scale, double shift) {
    if (!(scale_sq > 0.0)) throw InputError("log-normal marginal: requires scale_sq > 0");
    if (scale == 0.0) throw InputError("log-normal marginal: scale must be nonzero");
    Marginal m;
    m.repr_ = LogNormalMarginal{location, scale_sq, scale, shift};
    return m;
}

Marginal Marginal::discrete(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size()) {
        throw InputError("discrete marginal: atoms/weights size mismatch");
    }
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        if (!(atoms[i] > atoms[i - 1])) {
            throw InputError("discrete marginal: atoms must be strictly increasing");
        }
    }
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw InputError("discrete marginal: weights must sum to 1 (tol 1e-12)");
    }
    for (double w : weights) {
        if (w < 0.0) throw InputError("discrete marginal: negative weight");
    }
    Marginal m;
    m.repr_ = DiscreteMarginal{std::move(atoms), std::move(weights)};
    return m;
}

Marginal Marginal::empirical(std::vector<double> values) {
    if (values.empty()) throw InputError("empirical marginal: empty sample");
    std::sort(values.begin(), values.end());
    Marginal m;
    m.repr_ = EmpiricalMarginal{std::move(values)};
    return m;
}

double Marginal::cdf(double x) const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UniformMarginal>) {
                if (x <= r.a) return 0.0;
                if (x >= r.b) return 1.0;
                return (x - r.a) / (r.b - r.a);
            } else if constexpr (std::is_same_v<T, LogNormalMarginal>) {
                double y = (x - r.shift) / r.scale;
                if (r.scale > 0.0) {
                    if (y <= 0.0) return 0.0;
                    return norm_cdf((std::log(y) - r.location) / std::sqrt(r.scale_sq));
                }
                if (y <= 0.0) return 1.0;
                return 1.0 - norm_cdf((std::log(y) - r.location) / std::sqrt(r.scale_sq));
            } else if constexpr (std::is_same_v<T, DiscreteMarginal>) {
                double c = 0.0;
                for (std::size_t i = 0; i < r.atoms.size() && r.atoms[i] <= x; ++i) {
                    c += r.weights[i];
                }
                return std::min(c, 1.0);
            } else {
                auto it = std::upper_bound(r.values.begin(), r.values.end(), x);
                return static_cast<double>(it - r.values.begin()) /
                       static_cast<double>(r.values.size());
            }
        },
        repr_);
}

double Marginal::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile: p outside [0,1]");
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UniformMarginal>) {
                return r.a + (r.b - r.a) * p;
            } else if constexpr (std::is_same_v<T, LogNormalMarginal>) {
                double q = (r.scale > 0.0) ? p : 1.0 - p;
                double z;
                if (q <= 0.0) {
                    z = -std::numeric_limits<double>::infinity();
                } else if (q >= 1.0) {
                    z = std::numeric_limits<double>::infinity();
                } else {
                    z = norm_quantile(q);
                }
                return r.shift + r.scale * std::exp(r.location + std::sqrt(r.scale_sq) * z);
            } else if constexpr (std::is_same_v<T, DiscreteMarginal>) {
                if (p == 0.0) return r.atoms.front();
                double c = 0.0;
                for (std::size_t i = 0; i < r.atoms.size(); ++i) {
                    c += r.weights[i];
                    if (c >= p - 1e-15) return r.atoms[i];
                }
                return r.atoms.back();
            } else {
                const auto n = static_cast<double>(r.values.size());
                if (p == 0.0) return r.values.front();
                auto idx = static_cast<std::size_t>(std::ceil(p * n)) - 1;
                idx = std::min(idx, r.values.size() - 1);
                return r.values[idx];
            }
        },
        repr_);
}

double Marginal::sample(Rng& rng) const { return quantile(rng.uniform01()); }

double Marginal::support_min() const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UniformMarginal>) {
                return r.a;
            } else if constexpr (std::is_same_v<T, LogNormalMarginal>) {
                return r.scale > 0.0 ? r.shift : -std::numeric_limits<double>::infinity();
            } else if constexpr (std::is_same_v<T, DiscreteMarginal>) {
                return r.atoms.front();
            } else {
                return r.values.front();
            }
        },
        repr_);
}

double Marginal::support_max() const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UniformMarginal>) {
                return r.b;
            } else if constexpr (std::is_same_v<T, LogNormalMarginal>) {
                return r.scale > 0.0 ? std::numeric_limits<double>::infinity() : r.shift;
            } else if constexpr (std::is_same_v<T, DiscreteMarginal>) {
                return r.atoms.back();
            } else {
                return r.values.back();
            }
        },
        repr_);
}

bool Marginal::is_continuous() const {
    return std::holds_alternative<UniformMarginal>(repr_) ||
           std::holds_alternative<LogNormalMarginal>(repr_);
}

Marginal Marginal::negate() const {
    return std::visit(
        [&](const auto& r) -> Marginal {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UniformMarginal>) {
                return Marginal::uniform(-r.b, -r.a);
            } else if constexpr (std::is_same_v<T, LogNormalMarginal>) {
                return Marginal::log_normal(r.location, r.scale_sq, -r.scale, -r.shift);
            } else if constexpr (std::is_same_v<T, DiscreteMarginal>) {
                std::vector<double> atoms(r.atoms.rbegin(), r.atoms.rend());
                for (double& a : atoms) a = -a;
                std::vector<double> weights(r.weights.rbegin(), r.weights.rend());
                return Marginal::discrete(std::move(atoms), std::move(weights));
            } else {
                std::vector<double> neg(r.values.size());
                for (std::size_t i = 0; i < r.values.size(); ++i) neg[i] = -r.values[i];
                return Marginal::empirical(std::move(neg));
            }
        },
        repr_);
}

}  // namespace relmatch
