#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isingtri/peeling.hpp"

namespace isingtri::scaling {

// Sorted sample with the usual one- and two-sample Kolmogorov-Smirnov
// statistics.
class EmpiricalCDF {
  public:
    EmpiricalCDF() = default;
    explicit EmpiricalCDF(std::vector<double> samples);

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& sorted() const { return x_; }
    double operator()(double t) const; // right-continuous step function

    double ks_against(const std::function<double(double)>& cdf) const;
    double ks_two_sample(const EmpiricalCDF& other) const;

  private:
    std::vector<double> x_;
};

// --- reference laws -----------------------------------------------------------

// 1 - (1 + mu t)^{-4/3}
double reference_law_halfplane(double t);

// 1 - exp(-int_0^t c_inf((lambda+mu s)/(1+mu s)) ds/(1+mu s)); reduces to
// 1 - (1+mu t)^{-11/3} at lambda = 1.
double reference_law_diagonal(double t, double lambda);

// Display form with its normalizer: int_t^inf (1+s)^{-7/3}(lambda+s)^{-7/3} ds
// over the same integral from 0.
double normalized_display_survival(double t, double lambda);

// --- fits -----------------------------------------------------------------------

struct SlopeFit {
    double slope = 0, stderr_ = 0, intercept = 0;
    std::size_t points = 0;
};

// log-log least squares of y_k against k over [k_lo, k_hi]
SlopeFit fit_tail_exponent(const std::vector<double>& y, std::size_t k_lo, std::size_t k_hi);
// same on an empirical survival function evaluated over a log grid
SlopeFit fit_survival_exponent(const std::vector<double>& samples, double n_lo, double n_hi,
                               std::size_t grid = 48);

// --- reports --------------------------------------------------------------------

struct ScalingReport {
    std::string experiment;
    double nu = 0;
    std::int64_t p = 0, q = 0;
    double lambda = 0;
    std::int64_t m = 0;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
    double ks = -1;
    double fitted_exponent = 0, fitted_stderr = 0;
    double statistic = 0; // experiment-specific scalar (mean, difference, ...)
    double tolerance = 0;
    bool pass = false;
    std::vector<std::pair<double, double>> cdf_points; // (t, F_emp(t)) sample
    std::string to_json() const;                       // stable key order
    std::string cdf_csv() const;
};

// --- experiments ----------------------------------------------------------------

// KS of T_m / p under the half-plane law against 1-(1+mu t)^{-4/3}.
ScalingReport hitting_time_experiment_halfplane(const peel::PeelingContext& ctx,
                                                std::int64_t p, std::int64_t m,
                                                std::uint64_t runs, std::uint64_t seed);

// KS of T_m / p under the targeted finite law with q = lambda p against the
// diagonal reference law.
ScalingReport hitting_time_experiment_diagonal(const peel::PeelingContext& ctx,
                                               std::int64_t p, std::int64_t q, std::int64_t m,
                                               std::uint64_t runs, std::uint64_t seed);

// Interface length experiments, same reference laws.
ScalingReport interface_experiment_halfplane(const peel::PeelingContext& ctx, std::int64_t p,
                                             std::uint64_t runs, std::uint64_t seed);
ScalingReport interface_experiment_diagonal(const peel::PeelingContext& ctx, std::int64_t p,
                                            std::int64_t q, std::uint64_t runs,
                                            std::uint64_t seed);

// Self-similarity of the rescaled walk marginal at n versus 4n; exponent and
// centering per regime, negative control by overriding the exponent.
ScalingReport stable_selfsimilarity_test(const peel::PeelingContext& ctx, std::uint64_t n1,
                                         std::uint64_t runs, std::uint64_t seed,
                                         std::optional<double> exponent_override = {},
                                         bool center_override_off = false);

// Exploration of the infinite law until the interface first touches the +
// boundary; fits the survival exponent of the extended hull size.
struct HullResult {
    ScalingReport report;
    double mean_swallowed_per_step = 0;
};
HullResult hull_experiment(const peel::PeelingContext& ctx, std::uint64_t runs,
                           std::uint64_t seed, std::uint64_t step_budget = 10000000);

// Monte Carlo E[X_1] under the infinite law with a trimmed standard error.
struct DriftResult {
    ScalingReport report;
    double mean = 0, stderr_trimmed = 0;
};
DriftResult drift_experiment(const peel::PeelingContext& ctx, std::uint64_t draws,
                             std::uint64_t seed);

} // namespace isingtri::scaling
