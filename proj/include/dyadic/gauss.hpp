#pragma once

#include "dyadic/model.hpp"
#include "dyadic/sde.hpp"
#include "dyadic/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dyadic {

/// n_paths i.i.d. draws of Normal(0, r I_N); draw i uses derive_seed(seed, i).
std::vector<std::vector<double>> sample_mu_r(const ModelParams& params, std::size_t n_paths, std::uint64_t seed);

struct ModeMoments {
    double mean = 0.0;
    double variance = 0.0;
    double excess_kurtosis = 0.0;
    double z_mean = 0.0;
    double z_variance = 0.0;
    double z_kurtosis = 0.0;
};

/// z-scores against the Gaussian null: mean/sqrt(r/M), (s^2 - r)/sqrt(2r^2/M),
/// kurtosis/sqrt(24/M).
ModeMoments mode_moments(const PowerSums& s, double r);

struct InvarianceReport {
    double t_final = 0.0;
    std::vector<ModeMoments> initial;
    std::vector<ModeMoments> final;
    /// final minus initial moments, in units of the null standard errors.
    std::vector<ModeMoments> change;
    double cross_moment_12 = 0.0;  // sample E[x_1 x_2] at t_final
    double z_cross_12 = 0.0;
    double worst_z = 0.0;
    int worst_mode = 0;
    std::string worst_moment;
    std::vector<int> excluded_modes;
    double threshold = 4.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    bool pass = false;
};

/// Evolves a mu_r ensemble to t_final and scores the per-mode moments at t = 0
/// and t = t_final. Passes iff every |z| (mean, variance, kurtosis at both
/// times, and the 1-2 cross moment) is below threshold. Under Absorbing
/// truncation mode N is excluded, since its damping breaks invariance there.
InvarianceReport invariance_test(const ModelParams& params, double t_final, const IntegratorScheme& scheme,
                                 std::size_t n_paths, std::uint64_t seed, double threshold = 4.0,
                                 unsigned threads = 0);

struct EnergySeries {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> std_error;
    double threshold = 4.0;
    bool bounded_by_initial = false;  // mean(t) <= mean(0) + threshold * se(t)
    bool nonincreasing = false;       // mean(t_j) <= mean(t_{j-1}) + threshold * joint se
    bool pass = false;
};

/// Ensemble W-energy E||X(t)||_W^2 at the given times.
EnergySeries leray_energy_check(const ModelParams& params, const InitialCondition& x0, const IntegratorScheme& scheme,
                                std::span<const double> times, std::size_t n_paths, std::uint64_t seed,
                                double threshold = 4.0, unsigned threads = 0);

/// Builds the energy series from an existing ensemble run.
EnergySeries energy_series(const EnsembleSummary& summary, double threshold = 4.0);

/// E||X^eta(t) - X^rho(t)||_W^2 for two copies driven by the same increments.
/// Passes iff every mean is <= ||eta - rho||_W^2 + threshold * se.
struct ContractionReport {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> std_error;
    double initial_distance = 0.0;
    double threshold = 4.0;
    bool pass = false;
};

ContractionReport contraction_check(const ModelParams& params, std::span<const double> eta,
                                    std::span<const double> rho, const IntegratorScheme& scheme,
                                    std::span<const double> times, std::size_t n_paths, std::uint64_t seed,
                                    double threshold = 4.0, unsigned threads = 0);

/// Row-major N x N matrix M with X(t_final) = M X(0) for the noise realization
/// generated by seed (the dynamics are linear in the initial state).
std::vector<double> flow_map(const ModelParams& params, const IntegratorScheme& scheme, double t_final,
                             std::uint64_t seed);

/// max |M^T M - I| for a row-major n x n matrix.
double orthonormality_defect(std::span<const double> m, std::size_t n);

}  // namespace dyadic
