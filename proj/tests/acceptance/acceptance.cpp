// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "dyadic/chain.hpp"
#include "dyadic/ergodicity.hpp"
#include "dyadic/gauss.hpp"
#include "dyadic/heat.hpp"
#include "dyadic/moments.hpp"
#include "dyadic/sde.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

using namespace dyadic;

namespace {

struct Check {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> e1(int n) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    v[0] = 1.0;
    return v;
}

Check conservation() {
    const auto t0 = Clock::now();
    const ModelParams p(2.0, 16, 1.0, Truncation::Conservative);
    const auto s = simulate_ensemble(p, InitialCondition::gaussian_mu(1.0),
                                     {SchemeKind::RotationSplitting, 1e-3, SplittingOrder::Strang},
                                     uniform_times(1.0, 10), 100, 20240101);
    double worst = 0.0;
    for (const auto& ts : s.at) worst = std::max(worst, ts.max_rel_l2_drift);
    const double secs = seconds_since(t0);
    return {worst <= 1e-10 && secs < 10.0, fmt("max relative drift %.3g (<= 1e-10), %.1f s (< 10 s)", worst, secs)};
}

// Shared by criteria 2 and 3.
struct GalerkinRun {
    EnsembleSummary summary;
    std::vector<double> times;
    double seconds = 0.0;
};

const GalerkinRun& galerkin_run() {
    static const GalerkinRun run = [] {
        const auto t0 = Clock::now();
        GalerkinRun r;
        const ModelParams p(2.0, 8, 1.0, Truncation::Absorbing);
        // dt = 1e-4 violates the Euler-Maruyama bound at N = 8 (dt k_8^2 = 6.6); 2^-18 gives 0.25.
        r.times = uniform_times(0.5, 8);
        r.summary = simulate_ensemble(p, InitialCondition::fixed_state({1.0}),
                                      {SchemeKind::EulerMaruyamaIto, std::ldexp(1.0, -18), SplittingOrder::Strang},
                                      r.times, 10000, 777);
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

Check moment_oracle() {
    const ModelParams p(2.0, 8, 1.0, Truncation::Absorbing);
    bool rejected = false;
    try {
        check_stability(p, {SchemeKind::EulerMaruyamaIto, 1e-4, SplittingOrder::Strang});
    } catch (const std::invalid_argument&) {
        rejected = true;
    }
    const auto& run = galerkin_run();
    const auto q = integrate_moments(p, e1(8), run.times, 1e-12);
    const Eigen::MatrixXd lap = oracle::laplacian(2.0, 8, false);
    double ode_err = 0.0;
    for (const auto& m : q) {
        const Eigen::VectorXd ref = oracle::expm_apply(lap, m.t, oracle::unit(8, 0));
        for (int i = 0; i < 8; ++i) ode_err = std::max(ode_err, std::abs(m.q[i] - ref(i)));
    }
    double worst_z = 0.0;
    int worst_n = 0;
    const auto& last = run.summary.at.back();
    for (int n = 0; n < 8; ++n) {
        const double z = std::abs(last.modes[n].mean_sq() - q.back().q[n]) / last.modes[n].std_error_sq();
        if (z > worst_z) {
            worst_z = z;
            worst_n = n + 1;
        }
    }
    const bool pass = worst_z < 4.0 && ode_err <= 1e-8 && run.seconds < 120.0;
    return {pass, fmt("worst |z| %.2f at mode %d (< 4), ODE vs expm %.2g (<= 1e-8), dt=1e-4 rejected: %s, %.1f s (< 120 s)",
                      worst_z, worst_n, ode_err, rejected ? "yes" : "no", run.seconds)};
}

Check leray() {
    const auto es = energy_series(galerkin_run().summary, 4.0);
    return {es.pass && es.nonincreasing && es.bounded_by_initial,
            fmt("E W(0) = %.4f, E W(0.5) = %.4f +- %.4f, nonincreasing within 4 SE: %s", es.mean.front(), es.mean.back(),
                es.std_error.back(), es.nonincreasing ? "yes" : "no")};
}

Check invariance() {
    const ModelParams p(2.0, 16, 1.0, Truncation::Conservative);
    const IntegratorScheme sc{SchemeKind::RotationSplitting, 1e-3, SplittingOrder::Strang};
    const auto rep = invariance_test(p, 1.0, sc, 10000, 4242);
    const double defect = orthonormality_defect(flow_map(p.with_modes(8), sc, 1.0, 99), 8);
    return {rep.pass && defect <= 1e-10,
            fmt("worst |z| %.2f (mode %d, %s) (< 4), flow-map defect %.2g (<= 1e-10)", std::abs(rep.worst_z),
                rep.worst_mode, rep.worst_moment.c_str(), defect)};
}

Check heat_decay() {
    const auto t0 = Clock::now();
    const ModelParams p(2.0, 60);
    const double nu2 = nu(2.0);
    const auto op = build_delta_k(p, 60, Boundary::DirichletRight);
    const auto fit = mass_decay_fit(op, e1(60), 2 * nu2, 8 * nu2);
    const double gap = spectral_gap(op).gap;
    const double secs = seconds_since(t0);
    const double rel = std::abs(fit.rate / gap - 1.0);
    const double gap_ref = std::abs(gap / oracle::kDirichletGapLimit - 1.0);
    return {fit.rate >= 0.95 / nu2 && rel <= 0.02 && fit.r_squared >= 0.999 && gap_ref < 1e-8 && secs < 5.0,
            fmt("rate %.6f (>= %.4f), vs gap %.6f: %.2g (<= 2%%), R^2 %.8f (>= 0.999), gap vs frozen oracle %.1g, %.2f s",
                fit.rate, 0.95 / nu2, gap, rel, fit.r_squared, gap_ref, secs)};
}

Check no_gap() {
    const ModelParams one(1.0, 4);
    const double g25 = spectral_gap(build_delta_k(one, 25, Boundary::DirichletRight)).gap;
    const double g50 = spectral_gap(build_delta_k(one, 50, Boundary::DirichletRight)).gap;
    const double g100 = spectral_gap(build_delta_k(one, 100, Boundary::DirichletRight)).gap;
    const double g2 = spectral_gap(build_delta_k(ModelParams(2.0, 4), 60, Boundary::DirichletRight)).gap;
    return {g100 < g50 && g50 < g25 && g100 < 0.01 * g2,
            fmt("gap(25) %.4g > gap(50) %.4g > gap(100) %.4g; gap(100)/gap(lambda=2, 60) = %.2g (< 0.01)", g25, g50,
                g100, g100 / g2)};
}

Check dishonesty() {
    const auto t0 = Clock::now();
    const auto est = dishonesty_probability(dual_chain(2.0), 1.0, 10000, 31337);
    const double loss = 1.0 - survival_probability(ModelParams(2.0, 4), 60, 1.0, 1e-12);
    const double tol = est.ci.half_width() + 1e-3;
    const auto s2 = explosion_criterion(dual_chain(2.0), 10000, Series::Entrance);
    const auto s1 = explosion_criterion(dual_chain(1.0), 10000, Series::Entrance);
    const double secs = seconds_since(t0);
    const bool pass = est.ci.lo > 0.0 && std::abs(est.estimate - loss) <= tol && s2.converged && !s1.converged &&
                      secs < 60.0;
    return {pass, fmt("P(not alive) %.4f CI [%.4f, %.4f] (killed %llu, exploded %llu), adjoint %.4f, |diff| %.4f "
                      "(<= %.4f), S converged at lambda=2: %s (%.6g), at lambda=1: %s, %.1f s",
                      est.estimate, est.ci.lo, est.ci.hi, static_cast<unsigned long long>(est.killed),
                      static_cast<unsigned long long>(est.exploded), loss, std::abs(est.estimate - loss), tol,
                      s2.converged ? "yes" : "no", s2.value, s1.converged ? "yes" : "no", secs)};
}

Check ergodicity() {
    const auto t0 = Clock::now();
    const ModelParams p(2.0, 24, 1.0, Truncation::Conservative);
    const auto times = uniform_times(3.0, 30);
    const double nu2 = nu(2.0);
    const auto heat = heat_coefficient_variance(p, 1, times);
    const auto nested = nested_mc_variance(p, Observable::centered_square(1), times, 5000, 2, 8080);
    double worst = 0.0, worst_t = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double z = std::abs(nested.variance[j] - heat.variance[j]) / nested.std_error[j];
        if (z > worst) {
            worst = z;
            worst_t = times[j];
        }
    }
    double nested_rate = NAN;
    std::string fit_note;
    try {
        nested_rate = fit_rate(nested, 0.2, 0.6).rate;
    } catch (const std::exception& e) {
        fit_note = std::string(" (fit failed: ") + e.what() + ")";
    }
    const double heat_rate = fit_rate(heat, 2 * nu2, 6 * nu2).rate;
    const double relax = relaxation_rate(build_delta_k(p, 24, Boundary::ConservativeRight), 1);
    const double heat_ratio = heat_rate / (2 * relax);
    const double secs = seconds_since(t0);
    const bool pass = worst <= 4.0 && nested_rate * nu2 >= 0.8 && heat_ratio >= 0.95 && secs < 600.0;
    return {pass, fmt("max |nested - heat|/SE %.2f at t=%.1f (<= 4), nested rate %.4f, rate*nu %.3f (>= 0.8)%s, "
                      "heat rate %.4f / (2 x %.6f) = %.4f (>= 0.95), %.1f s",
                      worst, worst_t, nested_rate, nested_rate * nu2, fit_note.c_str(), heat_rate, relax, heat_ratio,
                      secs)};
}

Check contraction() {
    const ModelParams p(2.0, 8, 1.0, Truncation::Absorbing);
    const std::vector<double> eta{1.0}, rho{0.5};
    const std::vector<double> times{0.0, 0.1, 0.5, 1.0};
    const auto rep = contraction_check(p, eta, rho, {SchemeKind::RotationSplitting, 1e-3, SplittingOrder::Strang},
                                       times, 1000, 555);
    return {rep.pass, fmt("|eta-rho|_W^2 = %.4f; E d(0.1) %.4f, E d(0.5) %.4f, E d(1) %.4f (<= bound + 4 SE)",
                          rep.initial_distance, rep.mean[1], rep.mean[2], rep.mean[3])};
}

Check nu_closed_form() {
    double worst = 0.0;
    for (double lambda : {1.5, 2.0, 3.0})
        worst = std::max(worst, std::abs(nu(lambda) - oracle::nu_partial_sum(lambda, 100)));
    return {worst < 1e-12, fmt("max |nu - partial sum| %.2g (< 1e-12)", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
        {"1 pathwise conservation", conservation},
        {"2 moment-oracle equivalence", moment_oracle},
        {"3 energy inequality", leray},
        {"4 invariance of mu_r", invariance},
        {"5 heat/mass decay rate", heat_decay},
        {"6 no spectral gap at lambda=1", no_gap},
        {"7 dishonesty / explosion", dishonesty},
        {"8 two-route ergodicity", ergodicity},
        {"9 contraction", contraction},
        {"10 nu closed form", nu_closed_form},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
