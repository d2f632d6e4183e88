#include "dyadic/heat.hpp"

#include "dyadic/errors.hpp"
#include "dyadic/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dyadic {

std::string to_string(GapMethod m) {
    return m == GapMethod::SturmBisection ? "sturm-bisection" : "rate-fit";
}

TridiagonalOperator build_delta_k(const ModelParams& params, int n_sites, Boundary boundary) {
    if (n_sites < 2) throw std::invalid_argument("build_delta_k: need N >= 2");
    const ModelParams p = params.n_modes() == n_sites ? params : params.with_modes(n_sites);
    const std::size_t n = static_cast<std::size_t>(n_sites);

    TridiagonalOperator op;
    op.boundary = boundary;
    op.diag.resize(n);
    op.sub.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) op.sub[i] = p.k_sq(static_cast<int>(i) + 1);
    op.super = op.sub;
    for (int i = 1; i <= n_sites; ++i) {
        const double right = (i == n_sites && boundary == Boundary::ConservativeRight) ? 0.0 : p.k_sq(i);
        op.diag[i - 1] = -(right + p.k_sq(i - 1));
    }
    op.row_sums.assign(n, 0.0);
    if (boundary == Boundary::DirichletRight) op.row_sums[n - 1] = -p.k_sq(n_sites);
    op.col_sums = op.row_sums;
    return op;
}

std::vector<HeatProfile> evolve_heat(const TridiagonalOperator& op, std::span<const double> h0,
                                     std::span<const double> times, double tolerance) {
    EvolveOptions options;
    options.tolerance = tolerance;
    std::vector<HeatProfile> out;
    for (auto& s : evolve_linear(op, h0, times, options)) out.push_back({std::move(s.y), s.t});
    return out;
}

double total_mass(std::span<const double> h) {
    return std::accumulate(h.begin(), h.end(), 0.0);
}

GapResult spectral_gap(const TridiagonalOperator& op) {
    if (op.boundary != Boundary::DirichletRight)
        throw std::invalid_argument("spectral_gap: ConservativeRight operator has eigenvalue 0");
    return {decay_eigenvalue(op, 0, 1e-10), static_cast<int>(op.size()), GapMethod::SturmBisection};
}

double relaxation_rate(const TridiagonalOperator& op, std::size_t index) {
    return decay_eigenvalue(op, index, 1e-12);
}

MassDecayFit mass_decay_fit(const TridiagonalOperator& op, std::span<const double> h0, double t_lo, double t_hi,
                            int n_samples, double tolerance) {
    if (!(t_lo >= 0.0) || !(t_hi > t_lo) || n_samples < 2)
        throw std::invalid_argument("mass_decay_fit: need 0 <= t_lo < t_hi and n_samples >= 2");
    MassDecayFit fit;
    for (int i = 0; i < n_samples; ++i) fit.times.push_back(t_lo + (t_hi - t_lo) * i / (n_samples - 1));

    const auto profiles = evolve_heat(op, h0, fit.times, tolerance);
    std::vector<double> log_mass, unit(fit.times.size(), 1.0);
    for (const auto& p : profiles) {
        const double m = total_mass(p.h);
        if (!(m >= 1e-280))
            throw MassUnderflow("mass_decay_fit: total mass " + std::to_string(m) + " at t = " +
                                std::to_string(p.t) + " is below 1e-280; shorten the window");
        fit.mass.push_back(m);
        log_mass.push_back(std::log(m));
    }
    const LinearFit lf = weighted_linear_fit(fit.times, log_mass, unit);
    fit.rate = -lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    return fit;
}

}  // namespace dyadic
