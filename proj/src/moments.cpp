#include "dyadic/moments.hpp"

#include "dyadic/heat.hpp"

#include <numeric>
#include <stdexcept>

namespace dyadic {

std::vector<double> moment_rhs(const ModelParams& params, std::span<const double> q) {
    const int n_modes = params.n_modes();
    if (q.size() != static_cast<std::size_t>(n_modes)) throw std::invalid_argument("moment_rhs: length must be N");
    std::vector<double> out(q.size());
    for (int n = 1; n <= n_modes; ++n) {
        const double left = n > 1 ? q[n - 2] : 0.0;
        const double right = n < n_modes ? q[n] : 0.0;
        out[n - 1] = -params.k_sq(n - 1) * (q[n - 1] - left) + params.coupling_sq(n) * (right - q[n - 1]);
    }
    return out;
}

TridiagonalOperator moment_operator(const ModelParams& params) {
    const Boundary b =
        params.truncation() == Truncation::Absorbing ? Boundary::DirichletRight : Boundary::ConservativeRight;
    return build_delta_k(params, params.n_modes(), b);
}

std::vector<MomentVector> integrate_moments(const ModelParams& params, std::span<const double> q0,
                                            std::span<const double> times, double tolerance) {
    if (q0.size() != static_cast<std::size_t>(params.n_modes()))
        throw std::invalid_argument("integrate_moments: q0 must have length N");
    EvolveOptions options;
    options.tolerance = tolerance;
    std::vector<MomentVector> out;
    for (auto& s : evolve_linear(moment_operator(params), q0, times, options)) out.push_back({std::move(s.y), s.t});
    return out;
}

double moment_w_energy(const ModelParams& params, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q[i] / params.k_sq(static_cast<int>(i) + 1);
    return s;
}

TridiagonalOperator build_qmatrix_A(const ModelParams& params, int n_states) {
    if (n_states < 2) throw std::invalid_argument("build_qmatrix_A: need N >= 2");
    const ModelParams p = params.n_modes() == n_states ? params : params.with_modes(n_states);
    const std::size_t n = static_cast<std::size_t>(n_states);

    TridiagonalOperator A;
    A.boundary = Boundary::DirichletRight;
    A.diag.resize(n);
    A.sub.resize(n - 1);
    A.super.resize(n - 1);
    for (int i = 1; i <= n_states; ++i) {
        A.diag[i - 1] = -(p.k_sq(i) + p.k_sq(i - 1));
        if (i < n_states) {
            // k_n^4 / k_{n+1}^2 as k_n^2 (k_n / k_{n+1})^2 to stay in range.
            const double ratio = p.k(i) / p.k(i + 1);
            A.super[i - 1] = p.k_sq(i) * ratio * ratio;
            A.sub[i - 1] = p.k_sq(i + 1);
        }
    }
    // Interior rows conserve exactly; state 1 and state N leak.
    A.row_sums.assign(n, 0.0);
    A.row_sums[0] = 1.0 - p.k_sq(1);
    A.row_sums[n - 1] = -p.k_sq(n_states - 1);
    return A;
}

std::vector<double> p_transform(const ModelParams& params, std::span<const double> q, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("p_transform: c must be > 0");
    std::vector<double> p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = q[i] / (params.k_sq(static_cast<int>(i) + 1) * c);
    return p;
}

std::vector<MomentVector> evolve_forward(const TridiagonalOperator& A, std::span<const double> p0,
                                         std::span<const double> times, double tolerance) {
    EvolveOptions options;
    options.tolerance = tolerance;
    std::vector<MomentVector> out;
    for (auto& s : evolve_linear(A.transposed(), p0, times, options)) out.push_back({std::move(s.y), s.t});
    return out;
}

double survival_probability(const ModelParams& params, int n_states, double t, double tolerance) {
    const TridiagonalOperator A = build_qmatrix_A(params, n_states);
    std::vector<double> p0(static_cast<std::size_t>(n_states), 0.0);
    p0[0] = 1.0;
    const double times[] = {t};
    const auto p = evolve_forward(A, p0, times, tolerance);
    return std::accumulate(p.back().q.begin(), p.back().q.end(), 0.0);
}

}  // namespace dyadic
