#pragma once

#include "dyadic/model.hpp"
#include "dyadic/tridiagonal.hpp"

#include <span>
#include <string>
#include <vector>

namespace dyadic {

struct HeatProfile {
    std::vector<double> h;  // sites 1..N
    double t = 0.0;
};

enum class GapMethod { SturmBisection, RateFit };

struct GapResult {
    double gap = 0.0;
    int n_sites = 0;
    GapMethod method = GapMethod::SturmBisection;
};

std::string to_string(GapMethod m);

/// Weighted Laplacian on sites 1..N:
///   (D f)(i) = k_i^2 (f(i+1) - f(i)) + k_{i-1}^2 (f(i-1) - f(i)),  k_0 = 0.
/// DirichletRight takes f(N+1) = 0; ConservativeRight drops the k_N bond.
/// Wavenumbers come from params.lambda(); params.n_modes() is ignored.
/// Sub and super diagonals are stored as the same values.
TridiagonalOperator build_delta_k(const ModelParams& params, int n_sites, Boundary boundary);

/// h(t) = exp(t op) h0 at the requested times.
std::vector<HeatProfile> evolve_heat(const TridiagonalOperator& op, std::span<const double> h0,
                                     std::span<const double> times, double tolerance = 1e-10);

double total_mass(std::span<const double> h);

/// Decay rate -max(spec op) of a DirichletRight operator, by Sturm bisection
/// to relative tolerance 1e-10. Throws std::invalid_argument for
/// ConservativeRight (whose top eigenvalue is 0) and ScalingLimitError when
/// the entries cannot be rescaled into binary64.
GapResult spectral_gap(const TridiagonalOperator& op);

/// index-th decay rate of a symmetric operator; for ConservativeRight,
/// index 1 is the relaxation rate towards the uniform profile.
double relaxation_rate(const TridiagonalOperator& op, std::size_t index);

struct MassDecayFit {
    double rate = 0.0;
    double intercept = 0.0;  // log C
    double r_squared = 0.0;
    std::vector<double> times;
    std::vector<double> mass;
};

/// Least-squares slope of log(sum h(t)) at n_samples equally spaced times in
/// [t_lo, t_hi]. Throws MassUnderflow if the mass drops below 1e-280.
MassDecayFit mass_decay_fit(const TridiagonalOperator& op, std::span<const double> h0, double t_lo, double t_hi,
                            int n_samples = 41, double tolerance = 1e-10);

inline GapResult as_gap(const MassDecayFit& fit, int n_sites) {
    return {fit.rate, n_sites, GapMethod::RateFit};
}

}  // namespace dyadic
