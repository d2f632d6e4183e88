#pragma once

#include "dyadic/model.hpp"
#include "dyadic/stats.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

enum class DecayMethod { NestedMC, HeatCoefficients };
std::string to_string(DecayMethod m);

/// Var_{mu_r}(P_t f) sampled at a set of times. `floor` is the limit as
/// t -> infinity at finite N (2r^2/N for squares under Conservative
/// truncation, which conserves sum x^2); fits act on log(variance - floor).
struct DecayMeasurement {
    Observable observable;
    DecayMethod method = DecayMethod::HeatCoefficients;
    std::vector<double> times;
    std::vector<double> variance;
    std::vector<double> std_error;      // zero for the deterministic route
    std::vector<Interval> ci;           // bootstrap 95% for NestedMC
    std::vector<bool> inconclusive;     // CI half-width exceeds |variance - floor|
    /// variance - floor computed without cancellation where possible.
    std::vector<double> excess;
    double floor = 0.0;
    double rate = 0.0;
    double log_intercept = 0.0;
    double r_squared = 0.0;
};

/// Deterministic route. With h(t) = exp(t D) delta_l under the
/// ConservativeRight weighted Laplacian, P_t x_l^2 = sum_i h_i(t) x_i^2, so
/// Var_{mu_r}(P_t f) = 2 r^2 sum_i h_i(t)^2 for f = x_l^2 - r.
/// Requires Conservative truncation.
DecayMeasurement heat_coefficient_variance(const ModelParams& params, int l, std::span<const double> times,
                                           double tolerance = 1e-12);

struct NestedMCOptions {
    double dt = 1e-3;
    int bootstrap_resamples = 200;
    unsigned threads = 0;
};

/// Two-copy nested Monte Carlo: outer x ~ mu_r, inner_M independent
/// rotation-splitting paths from each x. The U-statistic
/// ((sum f)^2 - sum f^2) / (m (m-1)) is unbiased for (P_t f)(x)^2, so its outer
/// mean minus (mu_r f)^2 = 0 estimates Var_{mu_r}(P_t f) without inner-noise
/// bias. Seeds: outer i -> derive_seed(seed, i), copy c -> derive_seed(that, c + 1).
/// Requires Conservative truncation, outer_M >= 2, inner_M >= 2.
DecayMeasurement nested_mc_variance(const ModelParams& params, const Observable& f, std::span<const double> times,
                                    std::size_t outer_M, int inner_M, std::uint64_t seed,
                                    const NestedMCOptions& options = {});

struct RateFit {
    double rate = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

/// Weighted least squares of log(variance - floor) on [t_lo, t_hi]. Weights
/// are ((v - floor)/se)^2 for NestedMC and 1 for HeatCoefficients. Needs >= 4
/// points; throws NonPositiveVarianceError if any excess in the window is <= 0.
RateFit fit_rate(const DecayMeasurement& m, double t_lo, double t_hi);

/// Stores a fit back into the measurement.
void apply_fit(DecayMeasurement& m, const RateFit& fit);

struct NuComparison {
    double rate = 0.0;
    double nu = 0.0;
    double ratio = 0.0;  // rate * nu
    double tolerance = 0.05;
    bool consistent = false;  // rate >= (1 - tolerance) / nu
};

NuComparison compare_to_nu(const ModelParams& params, double rate, double tolerance = 0.05);

}  // namespace dyadic
