#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace relmatch {

// Standard normal cdf.
double norm_cdf(double x);

// Standard normal quantile, accurate to ~1e-15 relative on (0,1).
// Throws InputError outside (0,1).
double norm_quantile(double p);

// Recursive adaptive Simpson integration with Richardson correction.
// `tol` is an absolute tolerance on the whole interval; the recursion
// splits the budget between halves.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 60);

// Bisection for a nondecreasing function g on [lo, hi].
// Returns x with g(x) ~ target, clamped to the bracket endpoints when the
// target lies outside [g(lo), g(hi)].
double bisect_nondecreasing(const std::function<double(double)>& g, double lo, double hi,
                            double target, double xtol = 1e-12, int max_iter = 200);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // population variance
double covariance(std::span<const double> a, std::span<const double> b);
double pearson_corr(std::span<const double> a, std::span<const double> b);

// Two-sample Kolmogorov-Smirnov statistic (sup distance between ecdfs).
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Critical value for the two-sample KS statistic at level alpha,
// c(alpha) * sqrt((n+m)/(n*m)).
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

}  // namespace relmatch
