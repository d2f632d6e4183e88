#include "dyadic/lab/scenarios.hpp"

#include "dyadic/lab/report.hpp"

#include "dyadic/chain.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/ergodicity.hpp"
#include "dyadic/gauss.hpp"
#include "dyadic/heat.hpp"
#include "dyadic/moments.hpp"
#include "dyadic/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dyadic::lab {

Verdict make_verdict(std::string claim, double measured, std::string relation, double threshold, std::string detail) {
    Verdict v;
    v.anchor = claim;
    v.claim = std::move(claim);
    v.measured = measured;
    v.relation = std::move(relation);
    v.threshold = threshold;
    v.detail = std::move(detail);
    if (v.relation == "<=")
        v.pass = measured <= threshold;
    else if (v.relation == "<")
        v.pass = measured < threshold;
    else if (v.relation == ">=")
        v.pass = measured >= threshold;
    else if (v.relation == ">")
        v.pass = measured > threshold;
    else if (v.relation == "==")
        v.pass = measured == threshold;
    else
        throw std::invalid_argument("make_verdict: unknown relation " + v.relation);
    return v;
}

bool ScenarioResult::pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ModelParams params_of(const ExperimentConfig& c) {
    return ModelParams(c.lambda, c.n_modes, c.r, truncation_from_string(c.truncation));
}

IntegratorScheme scheme_of(const ExperimentConfig& c) {
    return {scheme_from_string(c.scheme), c.dt, SplittingOrder::Strang};
}

std::vector<double> times_of(const ExperimentConfig& c) { return uniform_times(c.t_final, c.n_times); }

std::vector<double> unit_vector(int n, int i) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i - 1)] = 1.0;
    return v;
}

// ---------------------------------------------------------------------------

ScenarioResult run_conserve(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const auto scheme = scheme_of(c);
    const auto times = times_of(c);
    const auto x0 = InitialCondition::gaussian_mu(p.r());
    const auto s = simulate_ensemble(p, x0, scheme, times, c.paths, c.seed, c.threads);

    ScenarioResult res;
    Table energy{"energy", {"t [time]", "mean_l2 [energy]", "max_rel_drift [dimensionless]"}, {}};
    double worst = 0.0;
    for (const auto& ts : s.at) {
        energy.rows.push_back({ts.t, ts.l2.mean(), ts.max_rel_l2_drift});
        worst = std::max(worst, ts.max_rel_l2_drift);
    }
    Table sample{"paths", {"path [index]", "t [time]", "l2 [energy]"}, {}};
    const std::uint64_t shown = std::min<std::uint64_t>(c.paths, 5);
    for (std::uint64_t i = 0; i < shown; ++i) {
        const auto path = simulate_path(p, x0, scheme, times, derive_seed(c.seed, i));
        for (std::size_t j = 0; j < times.size(); ++j)
            sample.rows.push_back({static_cast<double>(i), times[j], l2_norm_sq(path.states[j])});
    }
    res.tables = {energy, sample};
    res.verdicts.push_back(make_verdict("pathwise-conservation", worst, "<=", 1e-10,
                                        "max over paths and times of |sum x^2(t) - sum x^2(0)| / sum x^2(0)"));
    res.metrics["max_rel_drift"] = worst;
    return res;
}

ScenarioResult run_moments(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const auto times = times_of(c);
    const auto e1 = unit_vector(p.n_modes(), 1);
    const auto s = simulate_ensemble(p, InitialCondition::fixed_state(e1), scheme_of(c), times, c.paths, c.seed,
                                     c.threads);
    const auto q = integrate_moments(p, e1, times, c.tolerance);

    ScenarioResult res;
    Table t{"moments",
            {"t [time]", "n [index]", "mc_mean_sq [energy]", "std_error [energy]", "ode [energy]", "z [dimensionless]"},
            {}};
    double worst = 0.0;
    int worst_n = 0;
    double worst_t = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        for (int n = 0; n < p.n_modes(); ++n) {
            const auto& m = s.at[j].modes[n];
            const double diff = m.mean_sq() - q[j].q[n];
            const double se = m.std_error_sq();
            const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
            t.rows.push_back({times[j], static_cast<double>(n + 1), m.mean_sq(), se, q[j].q[n], z});
            if (std::abs(z) > worst) {
                worst = std::abs(z);
                worst_n = n + 1;
                worst_t = times[j];
            }
        }
    }
    res.tables.push_back(t);
    res.verdicts.push_back(make_verdict("moment-oracle-equivalence", worst, "<", c.z_threshold,
                                        "worst |z| at mode " + std::to_string(worst_n) + ", t = " +
                                            std::to_string(worst_t)));
    res.metrics["worst_z"] = worst;
    res.metrics["worst_mode"] = worst_n;
    return res;
}

ScenarioResult run_leray(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const auto times = times_of(c);
    const auto s = simulate_ensemble(p, InitialCondition::fixed_state(unit_vector(p.n_modes(), 1)), scheme_of(c),
                                     times, c.paths, c.seed, c.threads);
    const auto es = energy_series(s, c.z_threshold);

    ScenarioResult res;
    Table t{"w_energy", {"t [time]", "mean_w_energy [energy]", "std_error [energy]"}, {}};
    double z_step = -INFINITY, z_start = -INFINITY;
    for (std::size_t j = 0; j < es.times.size(); ++j) {
        t.rows.push_back({es.times[j], es.mean[j], es.std_error[j]});
        if (j == 0) continue;
        const double joint = std::hypot(es.std_error[j], es.std_error[j - 1]);
        const double d_step = es.mean[j] - es.mean[j - 1], d_start = es.mean[j] - es.mean[0];
        z_step = std::max(z_step, joint > 0 ? d_step / joint : (d_step > 0 ? INFINITY : -INFINITY));
        z_start = std::max(z_start, es.std_error[j] > 0 ? d_start / es.std_error[j] : (d_start > 0 ? INFINITY : -INFINITY));
    }
    res.tables.push_back(t);
    res.verdicts.push_back(make_verdict("leray-energy-nonincreasing", z_step, "<=", c.z_threshold,
                                        "max over steps of (E W(t_j) - E W(t_{j-1})) / joint SE"));
    res.verdicts.push_back(make_verdict("leray-energy-bounded", z_start, "<=", c.z_threshold,
                                        "max over t of (E W(t) - E W(0)) / SE"));
    return res;
}

ScenarioResult run_invariance(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const auto scheme = scheme_of(c);
    const auto rep = invariance_test(p, c.t_final, scheme, c.paths, c.seed, c.z_threshold, c.threads);

    ScenarioResult res;
    Table t{"modes",
            {"mode [index]", "mean_0 [amplitude]", "var_0 [energy]", "kurt_0 [dimensionless]", "mean_T [amplitude]",
             "var_T [energy]", "kurt_T [dimensionless]", "z_mean_T [dimensionless]", "z_var_T [dimensionless]",
             "z_kurt_T [dimensionless]"},
            {}};
    for (std::size_t i = 0; i < rep.final.size(); ++i) {
        const auto& a = rep.initial[i];
        const auto& f = rep.final[i];
        t.rows.push_back({static_cast<double>(i + 1), a.mean, a.variance, a.excess_kurtosis, f.mean, f.variance,
                          f.excess_kurtosis, f.z_mean, f.z_variance, f.z_kurtosis});
    }
    res.tables.push_back(t);
    res.verdicts.push_back(make_verdict("gaussian-invariance", std::abs(rep.worst_z), "<", c.z_threshold,
                                        "worst z-score: mode " + std::to_string(rep.worst_mode) + ", " +
                                            rep.worst_moment));
    const ModelParams p8 = p.with_modes(8).with_truncation(Truncation::Conservative);
    const double defect = orthonormality_defect(flow_map(p8, {SchemeKind::RotationSplitting, c.dt, SplittingOrder::Strang},
                                                         c.t_final, c.seed),
                                                8);
    res.verdicts.push_back(make_verdict("flow-map-orthonormal", defect, "<=", 1e-10, "max |M^T M - I| at N = 8"));
    res.metrics["worst_z"] = rep.worst_z;
    res.metrics["worst_mode"] = rep.worst_mode;
    res.metrics["worst_moment"] = rep.worst_moment;
    res.metrics["cross_moment_12"] = rep.cross_moment_12;
    return res;
}

ScenarioResult run_heat_decay(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const double nu_v = nu(p);
    const double lo = c.fit_hi > c.fit_lo ? c.fit_lo : 2 * nu_v;
    const double hi = c.fit_hi > c.fit_lo ? c.fit_hi : 8 * nu_v;
    const auto op = build_delta_k(p, p.n_modes(), Boundary::DirichletRight);
    const auto fit = mass_decay_fit(op, unit_vector(p.n_modes(), c.mode), lo, hi, 41, c.tolerance);
    const auto gap = spectral_gap(op);

    ScenarioResult res;
    Table t{"mass", {"t [time]", "mass [dimensionless]", "log_mass [dimensionless]"}, {}};
    for (std::size_t j = 0; j < fit.times.size(); ++j) t.rows.push_back({fit.times[j], fit.mass[j], std::log(fit.mass[j])});
    res.tables.push_back(t);
    res.verdicts.push_back(make_verdict("decay-rate-vs-nu", fit.rate, ">=", 0.95 / nu_v, "fitted rate >= 0.95 / nu"));
    res.verdicts.push_back(make_verdict("decay-rate-matches-gap", std::abs(fit.rate / gap.gap - 1.0), "<=", 0.02,
                                        "relative difference to the bisection gap"));
    res.verdicts.push_back(make_verdict("decay-fit-quality", fit.r_squared, ">=", 0.999, "R^2 of the log-mass fit"));
    res.metrics["fitted_rate"] = fit.rate;
    res.metrics["spectral_gap"] = gap.gap;
    res.metrics["nu"] = nu_v;
    res.metrics["r_squared"] = fit.r_squared;
    res.metrics["fit_window"] = {lo, hi};
    return res;
}

ScenarioResult run_gap_sweep(const ExperimentConfig& c) {
    const auto lambdas = parse_double_list(c.lambdas);
    const auto ns = parse_int_list(c.n_list);
    ScenarioResult res;
    Table t{"gaps", {"lambda [dimensionless]", "N [count]", "gap [1/time]", "gap_times_nu [dimensionless]"}, {}};
    std::vector<double> critical;
    for (double lambda : lambdas) {
        for (int n : ns) {
            const ModelParams p(lambda, std::max(n, 2));
            const double g = spectral_gap(build_delta_k(p, n, Boundary::DirichletRight)).gap;
            const double gn = lambda > 1.0 ? g * nu(lambda) : kNaN;
            t.rows.push_back({lambda, static_cast<double>(n), g, gn});
            if (lambda == 1.0) critical.push_back(g);
            if (lambda > 1.0 && n == ns.back())
                res.verdicts.push_back(make_verdict("gap-at-least-inverse-nu (lambda=" + format_number(lambda) + ")",
                                                    gn, ">=", 1.0, "gap * nu at the largest N"));
        }
    }
    res.tables.push_back(t);
    if (critical.size() >= 2) {
        double ratio = 0.0;
        for (std::size_t i = 1; i < critical.size(); ++i) ratio = std::max(ratio, critical[i] / critical[i - 1]);
        res.verdicts.push_back(make_verdict("no-gap-at-lambda-1", ratio, "<", 1.0,
                                            "largest ratio gap(N_next) / gap(N) along the N list"));
        const double ref = spectral_gap(build_delta_k(ModelParams(2.0, 60), 60, Boundary::DirichletRight)).gap;
        res.verdicts.push_back(make_verdict("critical-gap-vs-lambda-2", critical.back() / ref, "<", 0.01,
                                            "gap(lambda=1, largest N) / gap(lambda=2, N=60)"));
    }
    return res;
}

ScenarioResult run_chain(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const auto est = dishonesty_probability(dual_chain(c.lambda), c.t_final, c.paths, c.seed, kDefaultSentinel,
                                            c.threads);
    const double loss = 1.0 - survival_probability(p, p.n_modes(), c.t_final, c.tolerance);

    ScenarioResult res;
    Table t{"loss", {"t [time]", "deterministic_loss [probability]"}, {}};
    const auto A = build_qmatrix_A(p, p.n_modes());
    const auto times = times_of(c);
    for (const auto& s : evolve_forward(A, unit_vector(p.n_modes(), 1), times, c.tolerance)) {
        double alive = 0.0;
        for (double v : s.q) alive += v;
        t.rows.push_back({s.t, 1.0 - alive});
    }
    res.tables.push_back(t);
    res.verdicts.push_back(make_verdict("dishonesty-positive", est.ci.lo, ">", 0.0, "lower end of the Wilson 99% CI"));
    res.verdicts.push_back(make_verdict("dishonesty-matches-adjoint", std::abs(est.estimate - loss), "<=",
                                        est.ci.half_width() + 1e-3, "|MC - (1 - sum h(t))| vs CI half-width + 1e-3"));
    res.metrics["estimate"] = est.estimate;
    res.metrics["ci"] = {est.ci.lo, est.ci.hi};
    res.metrics["killed"] = est.killed;
    res.metrics["exploded"] = est.exploded;
    res.metrics["alive"] = est.alive;
    res.metrics["deterministic_loss"] = loss;
    return res;
}

ScenarioResult run_explosion(const ExperimentConfig& c) {
    ScenarioResult res;
    Table t{"series",
            {"lambda [dimensionless]", "exit_value [time]", "exit_converged [flag]", "entrance_value [time]",
             "entrance_converged [flag]", "entrance_increment [dimensionless]"},
            {}};
    for (double lambda : parse_double_list(c.lambdas)) {
        const auto spec = dual_chain(lambda);
        const auto exit = explosion_criterion(spec, c.terms, Series::Exit);
        const auto entrance = explosion_criterion(spec, c.terms, Series::Entrance);
        t.rows.push_back({lambda, exit.value, exit.converged ? 1.0 : 0.0, entrance.value,
                          entrance.converged ? 1.0 : 0.0, entrance.relative_increment});
        const std::string tag = " (lambda=" + format_number(lambda) + ")";
        if (lambda > 1.0)
            res.verdicts.push_back(make_verdict("entrance-series-converges" + tag, entrance.relative_increment, "<",
                                                1e-10, "relative change between N/2 and N partial sums"));
        else
            res.verdicts.push_back(make_verdict("entrance-series-diverges" + tag, entrance.relative_increment, ">=",
                                                1e-10, "relative change between N/2 and N partial sums"));
    }
    res.tables.push_back(t);
    return res;
}

ScenarioResult run_ergodicity(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const double nu_v = nu(p);
    const auto times = times_of(c);
    const auto heat = heat_coefficient_variance(p, c.mode, times);
    NestedMCOptions opt;
    opt.dt = c.dt;
    opt.threads = c.threads;
    auto nested = nested_mc_variance(p, Observable::centered_square(c.mode), times, c.outer_m, c.inner_m, c.seed, opt);

    ScenarioResult res;
    Table t{"variance",
            {"t [time]", "heat_variance [energy^2]", "nested_variance [energy^2]", "nested_std_error [energy^2]",
             "ci_lo [energy^2]", "ci_hi [energy^2]", "floor [energy^2]", "inconclusive [flag]"},
            {}};
    double worst = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        t.rows.push_back({times[j], heat.variance[j], nested.variance[j], nested.std_error[j], nested.ci[j].lo,
                          nested.ci[j].hi, nested.floor, nested.inconclusive[j] ? 1.0 : 0.0});
        worst = std::max(worst, std::abs(nested.variance[j] - heat.variance[j]) / nested.std_error[j]);
    }
    res.tables.push_back(t);
    res.verdicts.push_back(make_verdict("two-route-agreement", worst, "<=", c.z_threshold,
                                        "max over t of |nested - heat| / SE"));

    const auto op = build_delta_k(p, p.n_modes(), Boundary::ConservativeRight);
    const double relax = relaxation_rate(op, 1);
    const auto heat_fit = fit_rate(heat, 2 * nu_v, std::min(6 * nu_v, c.t_final));
    res.verdicts.push_back(make_verdict("heat-rate-vs-spectrum", heat_fit.rate / (2 * relax), ">=", 0.95,
                                        "heat-route slope / twice the relaxation eigenvalue"));
    res.metrics["heat_rate"] = heat_fit.rate;
    res.metrics["relaxation_eigenvalue"] = relax;
    res.metrics["nu"] = nu_v;
    try {
        const auto nf = fit_rate(nested, c.fit_lo, c.fit_hi);
        apply_fit(nested, nf);
        res.verdicts.push_back(make_verdict("nested-rate-times-nu", nf.rate * nu_v, ">=", 0.8,
                                            "nested Monte Carlo rate * nu"));
        res.metrics["nested_mc_rate"] = nf.rate;
        res.metrics["rate_times_nu"] = nf.rate * nu_v;
    } catch (const NonPositiveVarianceError& e) {
        res.verdicts.push_back(make_verdict("nested-rate-times-nu", kNaN, ">=", 0.8, e.what()));
    }
    return res;
}

ScenarioResult run_contraction(const ExperimentConfig& c) {
    const ModelParams p = params_of(c);
    const auto times = times_of(c);
    const std::vector<double> eta{1.0}, rho{0.5};
    const auto rep = contraction_check(p, eta, rho, scheme_of(c), times, c.paths, c.seed, c.z_threshold, c.threads);

    ScenarioResult res;
    Table t{"distance", {"t [time]", "mean_w_distance [energy]", "std_error [energy]", "initial [energy]"}, {}};
    double worst = -INFINITY;
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
        t.rows.push_back({rep.times[j], rep.mean[j], rep.std_error[j], rep.initial_distance});
        const double d = rep.mean[j] - rep.initial_distance;
        worst = std::max(worst, rep.std_error[j] > 0 ? d / rep.std_error[j] : (d > 1e-15 ? INFINITY : -INFINITY));
    }
    res.tables.push_back(t);
    res.verdicts.push_back(make_verdict("w-contraction", worst, "<=", c.z_threshold,
                                        "max over t of (E|X^eta - X^rho|_W^2 - |eta - rho|_W^2) / SE"));
    res.metrics["initial_distance"] = rep.initial_distance;
    return res;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
    static const std::vector<Scenario> reg = {
        {"conserve", "pathwise conservation of sum x^2 under conservative splitting",
         {{"lambda", "2"}, {"n-modes", "16"}, {"truncation", "conservative"}, {"scheme", "rotation-splitting"},
          {"dt", "1e-3"}, {"t-final", "1"}, {"n-times", "10"}, {"paths", "100"}},
         run_conserve},
        {"moments", "Monte Carlo second moments vs the moment ODE (Galerkin system)",
         {{"lambda", "2"}, {"n-modes", "8"}, {"truncation", "absorbing"}, {"scheme", "euler-maruyama"},
          {"dt", "3.814697265625e-06"}, {"t-final", "0.5"}, {"n-times", "8"}, {"paths", "2000"}},
         run_moments},
        {"leray", "W-energy inequality for the Galerkin system",
         {{"lambda", "2"}, {"n-modes", "8"}, {"truncation", "absorbing"}, {"scheme", "euler-maruyama"},
          {"dt", "3.814697265625e-06"}, {"t-final", "0.5"}, {"n-times", "8"}, {"paths", "2000"}},
         run_leray},
        {"invariance", "invariance of the Gaussian measure mu_r",
         {{"lambda", "2"}, {"n-modes", "16"}, {"r", "1"}, {"truncation", "conservative"},
          {"scheme", "rotation-splitting"}, {"dt", "1e-3"}, {"t-final", "1"}, {"paths", "2000"}},
         run_invariance},
        {"heat-decay", "mass decay of the Dirichlet heat flow vs 1/nu and the spectral gap",
         {{"lambda", "2"}, {"n-modes", "60"}, {"mode", "1"}, {"tolerance", "1e-10"}},
         run_heat_decay},
        {"gap-sweep", "spectral gaps over lambda and N",
         {{"lambdas", "1,1.5,2"}, {"n-list", "25,50,100"}},
         run_gap_sweep},
        {"chain", "dishonesty of the dual birth-death chain vs the adjoint evolution",
         {{"lambda", "2"}, {"n-modes", "60"}, {"t-final", "1"}, {"n-times", "10"}, {"paths", "10000"},
          {"tolerance", "1e-12"}},
         run_chain},
        {"explosion-criterion", "entrance and exit series of the dual chain",
         {{"lambdas", "1,2"}, {"terms", "10000"}},
         run_explosion},
        {"ergodicity", "variance decay of x_l^2 - r by nested Monte Carlo and by heat coefficients",
         {{"lambda", "2"}, {"n-modes", "24"}, {"r", "1"}, {"truncation", "conservative"}, {"mode", "1"},
          {"dt", "1e-3"}, {"t-final", "3"}, {"n-times", "30"}, {"outer-m", "1000"}, {"inner-m", "2"},
          {"fit-lo", "0.2"}, {"fit-hi", "0.6"}},
         run_ergodicity},
        {"contraction", "synchronous-coupling contraction in the W-norm",
         {{"lambda", "2"}, {"n-modes", "8"}, {"truncation", "absorbing"}, {"scheme", "rotation-splitting"},
          {"dt", "1e-3"}, {"t-final", "1"}, {"n-times", "10"}, {"paths", "1000"}},
         run_contraction},
    };
    return reg;
}

const Scenario* find_scenario(const std::string& name) {
    for (const auto& s : scenario_registry())
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace dyadic::lab
