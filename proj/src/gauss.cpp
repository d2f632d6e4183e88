#include "dyadic/gauss.hpp"

#include "dyadic/errors.hpp"
#include "dyadic/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyadic {

std::vector<std::vector<double>> sample_mu_r(const ModelParams& params, std::size_t n_paths, std::uint64_t seed) {
    std::vector<std::vector<double>> out(n_paths, std::vector<double>(static_cast<std::size_t>(params.n_modes())));
    const double sd = std::sqrt(params.r());
    for (std::size_t i = 0; i < n_paths; ++i) {
        GaussianSource rng(derive_seed(seed, i));
        rng.fill(out[i], sd);
    }
    return out;
}

ModeMoments mode_moments(const PowerSums& s, double r) {
    const double m = static_cast<double>(s.n);
    ModeMoments mm;
    mm.mean = s.mean();
    mm.variance = s.variance();
    mm.excess_kurtosis = s.excess_kurtosis();
    mm.z_mean = mm.mean / std::sqrt(r / m);
    mm.z_variance = (mm.variance - r) / std::sqrt(2.0 * r * r / m);
    mm.z_kurtosis = mm.excess_kurtosis / std::sqrt(24.0 / m);
    return mm;
}

InvarianceReport invariance_test(const ModelParams& params, double t_final, const IntegratorScheme& scheme,
                                 std::size_t n_paths, std::uint64_t seed, double threshold, unsigned threads) {
    if (n_paths < 2) throw std::invalid_argument("invariance_test: need at least 2 paths");
    check_stability(params, scheme);
    const double times[] = {t_final};
    const auto steps = output_steps(times, scheme.dt);
    const std::size_t n_modes = static_cast<std::size_t>(params.n_modes());
    const InitialCondition x0 = InitialCondition::gaussian_mu(params.r());

    struct Acc {
        std::vector<PowerSums> initial, final;
        PowerSums cross;
    };
    const std::size_t n_blocks = (n_paths + kPathsPerBlock - 1) / kPathsPerBlock;
    const auto blocks = map_blocks<Acc>(
        n_blocks,
        [&](std::size_t b) {
            Acc acc{std::vector<PowerSums>(n_modes), std::vector<PowerSums>(n_modes), {}};
            PathStepper stepper(params, scheme);
            std::vector<double> x(n_modes);
            const std::size_t end = std::min(n_paths, (b + 1) * kPathsPerBlock);
            for (std::size_t p = b * kPathsPerBlock; p < end; ++p) {
                GaussianSource rng(derive_seed(seed, p));
                x0.draw(x, rng);
                for (std::size_t i = 0; i < n_modes; ++i) acc.initial[i].add(x[i]);
                for (std::uint64_t k = 0; k < steps[0]; ++k) stepper.step(x, rng);
                for (double v : x)
                    if (!std::isfinite(v)) throw NonFiniteStateError("invariance_test: non-finite state", p, t_final);
                for (std::size_t i = 0; i < n_modes; ++i) acc.final[i].add(x[i]);
                acc.cross.add(x[0] * x[1]);
            }
            return acc;
        },
        threads);

    std::vector<PowerSums> initial(n_modes), final(n_modes);
    PowerSums cross;
    for (const auto& blk : blocks) {
        for (std::size_t i = 0; i < n_modes; ++i) {
            initial[i].merge(blk.initial[i]);
            final[i].merge(blk.final[i]);
        }
        cross.merge(blk.cross);
    }

    InvarianceReport rep;
    rep.t_final = t_final;
    rep.threshold = threshold;
    rep.n_paths = n_paths;
    rep.seed = seed;
    const double r = params.r();
    const double m = static_cast<double>(n_paths);
    if (params.truncation() == Truncation::Absorbing) rep.excluded_modes.push_back(params.n_modes());

    auto consider = [&](double z, int mode, const std::string& what) {
        if (std::abs(z) > std::abs(rep.worst_z)) {
            rep.worst_z = z;
            rep.worst_mode = mode;
            rep.worst_moment = what;
        }
    };
    for (std::size_t i = 0; i < n_modes; ++i) {
        const ModeMoments a = mode_moments(initial[i], r);
        const ModeMoments f = mode_moments(final[i], r);
        ModeMoments d;
        d.mean = f.mean - a.mean;
        d.variance = f.variance - a.variance;
        d.excess_kurtosis = f.excess_kurtosis - a.excess_kurtosis;
        d.z_mean = f.z_mean - a.z_mean;
        d.z_variance = f.z_variance - a.z_variance;
        d.z_kurtosis = f.z_kurtosis - a.z_kurtosis;
        rep.initial.push_back(a);
        rep.final.push_back(f);
        rep.change.push_back(d);

        const int mode = static_cast<int>(i) + 1;
        if (std::find(rep.excluded_modes.begin(), rep.excluded_modes.end(), mode) != rep.excluded_modes.end())
            continue;
        consider(a.z_mean, mode, "mean at t=0");
        consider(a.z_variance, mode, "variance at t=0");
        consider(a.z_kurtosis, mode, "kurtosis at t=0");
        consider(f.z_mean, mode, "mean at t=T");
        consider(f.z_variance, mode, "variance at t=T");
        consider(f.z_kurtosis, mode, "kurtosis at t=T");
    }
    rep.cross_moment_12 = cross.mean();
    rep.z_cross_12 = rep.cross_moment_12 / std::sqrt(r * r / m);
    consider(rep.z_cross_12, 1, "cross moment x_1 x_2 at t=T");
    rep.pass = std::abs(rep.worst_z) < threshold;
    return rep;
}

EnergySeries energy_series(const EnsembleSummary& summary, double threshold) {
    EnergySeries es;
    es.threshold = threshold;
    for (const auto& ts : summary.at) {
        es.times.push_back(ts.t);
        es.mean.push_back(ts.w_energy.mean());
        es.std_error.push_back(ts.w_energy.std_error());
    }
    es.bounded_by_initial = true;
    es.nonincreasing = true;
    for (std::size_t j = 1; j < es.times.size(); ++j) {
        if (es.mean[j] > es.mean[0] + threshold * es.std_error[j]) es.bounded_by_initial = false;
        const double joint = std::hypot(es.std_error[j], es.std_error[j - 1]);
        if (es.mean[j] > es.mean[j - 1] + threshold * joint) es.nonincreasing = false;
    }
    es.pass = es.bounded_by_initial && es.nonincreasing;
    return es;
}

EnergySeries leray_energy_check(const ModelParams& params, const InitialCondition& x0, const IntegratorScheme& scheme,
                                std::span<const double> times, std::size_t n_paths, std::uint64_t seed,
                                double threshold, unsigned threads) {
    return energy_series(simulate_ensemble(params, x0, scheme, times, n_paths, seed, threads), threshold);
}

ContractionReport contraction_check(const ModelParams& params, std::span<const double> eta,
                                    std::span<const double> rho, const IntegratorScheme& scheme,
                                    std::span<const double> times, std::size_t n_paths, std::uint64_t seed,
                                    double threshold, unsigned threads) {
    check_stability(params, scheme);
    const auto steps = output_steps(times, scheme.dt);
    const std::size_t n_modes = static_cast<std::size_t>(params.n_modes());
    const InitialCondition ie = InitialCondition::fixed_state({eta.begin(), eta.end()});
    const InitialCondition ir = InitialCondition::fixed_state({rho.begin(), rho.end()});
    const double sqrt_dt = std::sqrt(scheme.dt);

    const std::size_t n_blocks = (n_paths + kPathsPerBlock - 1) / kPathsPerBlock;
    const auto blocks = map_blocks<std::vector<PowerSums>>(
        n_blocks,
        [&](std::size_t b) {
            std::vector<PowerSums> acc(times.size());
            PathStepper stepper(params, scheme);
            std::vector<double> xe(n_modes), xr(n_modes), diff(n_modes), dW(stepper.n_increments());
            const std::size_t end = std::min(n_paths, (b + 1) * kPathsPerBlock);
            for (std::size_t p = b * kPathsPerBlock; p < end; ++p) {
                GaussianSource rng(derive_seed(seed, p));
                ie.draw(xe, rng);
                ir.draw(xr, rng);
                std::uint64_t done = 0;
                for (std::size_t j = 0; j < steps.size(); ++j) {
                    for (; done < steps[j]; ++done) {
                        rng.fill(dW, sqrt_dt);
                        stepper.step_with(xe, dW);
                        stepper.step_with(xr, dW);
                    }
                    for (std::size_t i = 0; i < n_modes; ++i) diff[i] = xe[i] - xr[i];
                    const double d = w_norm_sq(params, diff);
                    if (!std::isfinite(d)) throw NonFiniteStateError("contraction_check: non-finite state", p, times[j]);
                    acc[j].add(d);
                }
            }
            return acc;
        },
        threads);

    ContractionReport rep;
    rep.times.assign(times.begin(), times.end());
    rep.threshold = threshold;
    std::vector<double> d0(n_modes, 0.0);
    for (std::size_t i = 0; i < n_modes; ++i)
        d0[i] = (i < eta.size() ? eta[i] : 0.0) - (i < rho.size() ? rho[i] : 0.0);
    rep.initial_distance = w_norm_sq(params, d0);
    rep.pass = true;
    for (std::size_t j = 0; j < times.size(); ++j) {
        PowerSums s;
        for (const auto& blk : blocks) s.merge(blk[j]);
        rep.mean.push_back(s.mean());
        rep.std_error.push_back(s.std_error());
        if (rep.mean[j] > rep.initial_distance + threshold * rep.std_error[j]) rep.pass = false;
    }
    return rep;
}

std::vector<double> flow_map(const ModelParams& params, const IntegratorScheme& scheme, double t_final,
                             std::uint64_t seed) {
    check_stability(params, scheme);
    const double times[] = {t_final};
    const std::uint64_t n_steps = output_steps(times, scheme.dt)[0];
    const std::size_t n = static_cast<std::size_t>(params.n_modes());

    std::vector<std::vector<double>> cols(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) cols[j][j] = 1.0;
    PathStepper stepper(params, scheme);
    GaussianSource rng(seed);
    std::vector<double> dW(stepper.n_increments());
    const double sqrt_dt = std::sqrt(scheme.dt);
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        rng.fill(dW, sqrt_dt);
        for (auto& c : cols) stepper.step_with(c, dW);
    }
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = cols[j][i];
    return m;
}

double orthonormality_defect(std::span<const double> m, std::size_t n) {
    if (m.size() != n * n) throw std::invalid_argument("orthonormality_defect: size mismatch");
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            double g = 0.0;
            for (std::size_t i = 0; i < n; ++i) g += m[i * n + a] * m[i * n + b];
            worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

}  // namespace dyadic
