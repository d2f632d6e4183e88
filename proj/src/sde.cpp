#include "dyadic/sde.hpp"

#include "dyadic/errors.hpp"
#include "dyadic/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dyadic {

std::string to_string(SchemeKind k) {
    return k == SchemeKind::EulerMaruyamaIto ? "euler-maruyama" : "rotation-splitting";
}

SchemeKind scheme_from_string(const std::string& s) {
    if (s == "euler-maruyama" || s == "em") return SchemeKind::EulerMaruyamaIto;
    if (s == "rotation-splitting" || s == "splitting") return SchemeKind::RotationSplitting;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected euler-maruyama|rotation-splitting)");
}

double stability_number(const ModelParams& params, double dt) {
    const int n = params.n_modes();
    const double k2 = params.truncation() == Truncation::Absorbing ? params.k_sq(n) : params.k_sq(n - 1);
    return dt * k2;
}

void check_stability(const ModelParams& params, const IntegratorScheme& scheme) {
    if (!(scheme.dt > 0.0) || !std::isfinite(scheme.dt)) throw std::invalid_argument("dt must be finite and > 0");
    if (scheme.kind != SchemeKind::EulerMaruyamaIto) return;
    const double s = stability_number(params, scheme.dt);
    if (s > 0.5)
        throw std::invalid_argument("Euler-Maruyama unstable: dt * k^2 = " + std::to_string(s) +
                                    " > 0.5; reduce dt or N (max stable N = " +
                                    std::to_string(max_stable_modes(params.lambda(), scheme.dt,
                                                                    params.truncation())) +
                                    ")");
}

int max_stable_modes(double lambda, double dt, Truncation truncation) {
    // Stiffest rate is k_N^2 (Absorbing) or k_{N-1}^2 (Conservative).
    const int shift = truncation == Truncation::Absorbing ? 0 : 1;
    int best = 0;
    double k2 = lambda * lambda;
    for (int m = 1; m < 4096 && dt * k2 <= 0.5; ++m, k2 *= lambda * lambda) {
        best = m + shift;
        if (lambda == 1.0) return std::numeric_limits<int>::max();
    }
    return best;
}

std::vector<double> ito_drift(const ModelParams& params, std::span<const double> x) {
    const int n_modes = params.n_modes();
    if (x.size() != static_cast<std::size_t>(n_modes)) throw std::invalid_argument("ito_drift: length must be N");
    std::vector<double> out(x.size());
    for (int n = 1; n <= n_modes; ++n)
        out[n - 1] = -0.5 * (params.coupling_sq(n) + params.k_sq(n - 1)) * x[n - 1];
    return out;
}

std::vector<double> noise_increment(const ModelParams& params, std::span<const double> x,
                                    std::span<const double> dW) {
    const std::size_t n_modes = static_cast<std::size_t>(params.n_modes());
    if (x.size() != n_modes || dW.size() != n_modes)
        throw std::invalid_argument("noise_increment: x and dW must have length N");
    std::vector<double> out(n_modes, 0.0);
    for (std::size_t i = 0; i < n_modes; ++i) {
        const int n = static_cast<int>(i) + 1;
        double v = 0.0;
        if (i > 0) v += params.coupling(n - 1) * x[i - 1] * dW[i - 1];
        if (i + 1 < n_modes) v -= params.coupling(n) * x[i + 1] * dW[i];
        out[i] = v;
    }
    return out;
}

void rotate_plane(std::span<double> x, int n, double theta) {
    const std::size_t i = static_cast<std::size_t>(n - 1);
    const double c = std::cos(theta), s = std::sin(theta);
    const double a = x[i], b = x[i + 1];
    x[i] = a * c - b * s;
    x[i + 1] = a * s + b * c;
}

void apply_rotation_splitting(const ModelParams& params, std::span<double> x, std::span<const double> dW,
                              double dt, SplittingOrder order) {
    PathStepper stepper(params, {SchemeKind::RotationSplitting, dt, order});
    stepper.step_with(x, dW);
}

std::vector<double> step_rotation_splitting(const ModelParams& params, std::span<const double> x, double dt,
                                            GaussianSource& rng, SplittingOrder order) {
    std::vector<double> out(x.begin(), x.end());
    PathStepper stepper(params, {SchemeKind::RotationSplitting, dt, order});
    stepper.step(out, rng);
    return out;
}

std::vector<double> step_euler_maruyama(const ModelParams& params, std::span<const double> x, double dt,
                                        GaussianSource& rng) {
    std::vector<double> out(x.begin(), x.end());
    PathStepper stepper(params, {SchemeKind::EulerMaruyamaIto, dt, SplittingOrder::Strang});
    stepper.step(out, rng);
    for (double v : out)
        if (!std::isfinite(v)) throw NonFiniteStateError("Euler-Maruyama step produced a non-finite state", 0, dt);
    return out;
}

PathStepper::PathStepper(const ModelParams& params, const IntegratorScheme& scheme)
    : scheme_(scheme), sqrt_dt_(std::sqrt(scheme.dt)) {
    if (!(scheme.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    const int n_modes = params.n_modes();
    coupling_.resize(static_cast<std::size_t>(n_modes) - 1);
    for (int n = 1; n < n_modes; ++n) coupling_[n - 1] = params.coupling(n);
    dW_.assign(coupling_.size(), 0.0);
    scratch_.assign(static_cast<std::size_t>(n_modes), 0.0);
    cos_.assign(coupling_.size(), 1.0);
    sin_.assign(coupling_.size(), 0.0);

    if (scheme.kind == SchemeKind::EulerMaruyamaIto) {
        drift_.resize(static_cast<std::size_t>(n_modes));
        for (int n = 1; n <= n_modes; ++n)
            drift_[n - 1] = 1.0 - 0.5 * (params.coupling_sq(n) + params.k_sq(n - 1)) * scheme.dt;
    } else if (params.truncation() == Truncation::Absorbing) {
        last_damping_ = std::exp(-0.5 * params.k_sq(n_modes) * scheme.dt);
    }
}

void PathStepper::step(std::span<double> x, GaussianSource& rng) {
    rng.fill(dW_, sqrt_dt_);
    step_with(x, dW_);
}

void PathStepper::step_with(std::span<double> x, std::span<const double> dW) {
    const std::size_t planes = coupling_.size();
    const std::size_t n = planes + 1;
    if (x.size() != n || dW.size() < planes) throw std::invalid_argument("PathStepper: size mismatch");

    if (scheme_.kind == SchemeKind::EulerMaruyamaIto) {
        std::copy(x.begin(), x.end(), scratch_.begin());
        for (std::size_t i = 0; i < n; ++i) {
            double v = drift_[i] * scratch_[i];
            if (i > 0) v += coupling_[i - 1] * scratch_[i - 1] * dW[i - 1];
            if (i < planes) v -= coupling_[i] * scratch_[i + 1] * dW[i];
            x[i] = v;
        }
        return;
    }

    if (scheme_.order == SplittingOrder::Lie) {
        for (std::size_t i = 0; i < planes; ++i) rotate_plane(x, static_cast<int>(i) + 1, coupling_[i] * dW[i]);
        x[n - 1] *= last_damping_;
        return;
    }
    // Both half sweeps rotate plane i by the same angle, so cache sin/cos.
    for (std::size_t i = 0; i < planes; ++i) {
        const double theta = 0.5 * coupling_[i] * dW[i];
        const double c = std::cos(theta), s = std::sin(theta);
        cos_[i] = c;
        sin_[i] = s;
        const double a = x[i], b = x[i + 1];
        x[i] = a * c - b * s;
        x[i + 1] = a * s + b * c;
    }
    x[n - 1] *= last_damping_;
    for (std::size_t i = planes; i-- > 0;) {
        const double c = cos_[i], s = sin_[i];
        const double a = x[i], b = x[i + 1];
        x[i] = a * c - b * s;
        x[i + 1] = a * s + b * c;
    }
}

InitialCondition InitialCondition::fixed_state(std::vector<double> x) {
    InitialCondition ic;
    ic.fixed = std::move(x);
    return ic;
}

InitialCondition InitialCondition::gaussian_mu(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("gaussian initial condition needs r > 0");
    InitialCondition ic;
    ic.gaussian = true;
    ic.r = r;
    return ic;
}

void InitialCondition::draw(std::span<double> out, GaussianSource& rng) const {
    if (gaussian) {
        rng.fill(out, std::sqrt(r));
        return;
    }
    if (fixed.size() > out.size()) throw std::invalid_argument("initial state longer than the number of modes");
    std::fill(out.begin(), out.end(), 0.0);
    std::copy(fixed.begin(), fixed.end(), out.begin());
}

std::vector<std::uint64_t> output_steps(std::span<const double> times, double dt) {
    std::vector<std::uint64_t> steps;
    steps.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (!(t >= 0.0) || (i > 0 && t < times[i - 1]))
            throw std::invalid_argument("output times must be nondecreasing and >= 0");
        const double k = std::round(t / dt);
        if (std::abs(k * dt - t) > 1e-9 * std::max(1.0, t))
            throw std::invalid_argument("output time " + std::to_string(t) + " is not a multiple of dt");
        steps.push_back(static_cast<std::uint64_t>(k));
    }
    return steps;
}

std::vector<double> uniform_times(double t_final, int n_intervals) {
    if (n_intervals < 1 || !(t_final >= 0.0)) throw std::invalid_argument("uniform_times: bad arguments");
    std::vector<double> t(static_cast<std::size_t>(n_intervals) + 1);
    for (int i = 0; i <= n_intervals; ++i) t[i] = t_final * i / n_intervals;
    return t;
}

namespace {

void require_finite(std::span<const double> x, std::size_t path, double t) {
    for (double v : x)
        if (!std::isfinite(v))
            throw NonFiniteStateError("path " + std::to_string(path) + " became non-finite by t = " +
                                          std::to_string(t) + "; dt too large for this N and lambda",
                                      path, t);
}

// Calls visit(time_index, x) at each output time of one path.
template <class Visit>
void run_path(PathStepper& stepper, std::span<double> x, std::span<const std::uint64_t> steps,
              std::span<const double> times, GaussianSource& rng, std::size_t path, Visit&& visit) {
    std::uint64_t done = 0;
    for (std::size_t j = 0; j < steps.size(); ++j) {
        for (; done < steps[j]; ++done) stepper.step(x, rng);
        require_finite(x, path, times[j]);
        visit(j, std::span<const double>(x));
    }
}

}  // namespace

PathOutput simulate_path(const ModelParams& params, const InitialCondition& x0, const IntegratorScheme& scheme,
                         std::span<const double> times, std::uint64_t seed) {
    check_stability(params, scheme);
    const auto steps = output_steps(times, scheme.dt);
    PathOutput out;
    out.times.assign(times.begin(), times.end());
    out.seed = seed;

    GaussianSource rng(seed);
    std::vector<double> x(static_cast<std::size_t>(params.n_modes()));
    x0.draw(x, rng);
    PathStepper stepper(params, scheme);
    run_path(stepper, x, steps, times, rng, 0, [&](std::size_t, std::span<const double> s) {
        out.states.emplace_back(s.begin(), s.end());
    });
    return out;
}

EnsembleSummary simulate_ensemble(const ModelParams& params, const InitialCondition& x0,
                                  const IntegratorScheme& scheme, std::span<const double> times,
                                  std::size_t n_paths, std::uint64_t master_seed, unsigned threads) {
    if (n_paths == 0) throw std::invalid_argument("simulate_ensemble: n_paths must be >= 1");
    check_stability(params, scheme);
    const auto steps = output_steps(times, scheme.dt);
    const std::size_t n_modes = static_cast<std::size_t>(params.n_modes());
    std::vector<double> inv_k2(n_modes);
    for (std::size_t i = 0; i < n_modes; ++i) inv_k2[i] = 1.0 / params.k_sq(static_cast<int>(i) + 1);

    auto empty = [&] {
        std::vector<TimeSummary> acc(times.size());
        for (std::size_t j = 0; j < times.size(); ++j) {
            acc[j].t = times[j];
            acc[j].modes.resize(n_modes);
        }
        return acc;
    };

    const std::size_t n_blocks = (n_paths + kPathsPerBlock - 1) / kPathsPerBlock;
    auto blocks = map_blocks<std::vector<TimeSummary>>(
        n_blocks,
        [&](std::size_t b) {
            auto acc = empty();
            PathStepper stepper(params, scheme);
            std::vector<double> x(n_modes);
            const std::size_t end = std::min(n_paths, (b + 1) * kPathsPerBlock);
            for (std::size_t p = b * kPathsPerBlock; p < end; ++p) {
                GaussianSource rng(derive_seed(master_seed, p));
                x0.draw(x, rng);
                const double l2_0 = l2_norm_sq(x);
                run_path(stepper, x, steps, times, rng, p, [&](std::size_t j, std::span<const double> s) {
                    TimeSummary& ts = acc[j];
                    double l2 = 0.0, w = 0.0;
                    for (std::size_t i = 0; i < n_modes; ++i) {
                        ts.modes[i].add(s[i]);
                        l2 += s[i] * s[i];
                        w += s[i] * s[i] * inv_k2[i];
                    }
                    ts.l2.add(l2);
                    ts.w_energy.add(w);
                    const double drift = l2_0 > 0.0 ? std::abs(l2 - l2_0) / l2_0 : std::abs(l2);
                    ts.max_rel_l2_drift = std::max(ts.max_rel_l2_drift, drift);
                });
            }
            return acc;
        },
        threads);

    EnsembleSummary out;
    out.at = empty();
    out.n_paths = n_paths;
    out.master_seed = master_seed;
    for (const auto& blk : blocks) {
        for (std::size_t j = 0; j < times.size(); ++j) {
            for (std::size_t i = 0; i < n_modes; ++i) out.at[j].modes[i].merge(blk[j].modes[i]);
            out.at[j].l2.merge(blk[j].l2);
            out.at[j].w_energy.merge(blk[j].w_energy);
            out.at[j].max_rel_l2_drift = std::max(out.at[j].max_rel_l2_drift, blk[j].max_rel_l2_drift);
        }
    }
    return out;
}

}  // namespace dyadic
