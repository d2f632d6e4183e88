#pragma once

#include "dyadic/model.hpp"
#include "dyadic/tridiagonal.hpp"

#include <span>
#include <vector>

namespace dyadic {

/// Second moments q_n = E[X_n^2], n = 1..N, at time t.
struct MomentVector {
    std::vector<double> q;
    double t = 0.0;
};

/// -k_{n-1}^2 (q_n - q_{n-1}) + k_n^2 (q_{n+1} - q_n) with q_0 = 0 and
/// q_{N+1} = 0 (Absorbing) or k_N = 0 (Conservative).
std::vector<double> moment_rhs(const ModelParams& params, std::span<const double> q);

/// Generator of the moment ODE: the weighted Laplacian with DirichletRight
/// closure for Absorbing truncation, ConservativeRight for Conservative.
TridiagonalOperator moment_operator(const ModelParams& params);

/// Integrates q' = moment_rhs(q) with the stiff implicit integrator. Entries
/// stay nonnegative for q0 >= 0. Throws StepSizeUnderflow.
std::vector<MomentVector> integrate_moments(const ModelParams& params, std::span<const double> q0,
                                            std::span<const double> times, double tolerance = 1e-10);

/// W-energy sum_n q_n / k_n^2.
double moment_w_energy(const ModelParams& params, std::span<const double> q);

/// q-matrix of the p-transformed system p' = p A on states 1..N:
///   A(n, n)   = -(k_n^2 + k_{n-1}^2)
///   A(n, n-1) = k_n^2
///   A(n, n+1) = k_n^4 / k_{n+1}^2
/// truncated at N (DirichletRight). Row 1 sums to 1 - lambda^2, the others to 0
/// (except row N, which loses its outgoing bond).
TridiagonalOperator build_qmatrix_A(const ModelParams& params, int n_states);

/// p_n = q_n / (k_n^2 c).
std::vector<double> p_transform(const ModelParams& params, std::span<const double> q, double c);

/// Row vector p(t) = p0 exp(t A), i.e. the forward equation of the chain
/// generated by A, integrated as the column system p' = A^T p.
std::vector<MomentVector> evolve_forward(const TridiagonalOperator& A, std::span<const double> p0,
                                         std::span<const double> times, double tolerance = 1e-10);

/// P(chain started at 1 is still alive at t) = sum_n (delta_1 exp(tA))_n on
/// n_states states.
double survival_probability(const ModelParams& params, int n_states, double t, double tolerance = 1e-10);

}  // namespace dyadic
