#include "dyadic/ergodicity.hpp"

#include "dyadic/errors.hpp"
#include "dyadic/heat.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/random.hpp"
#include "dyadic/sde.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dyadic {

std::string to_string(DecayMethod m) {
    return m == DecayMethod::NestedMC ? "nested-mc" : "heat-coefficients";
}

namespace {

double variance_floor(const ModelParams& params, const Observable& f) {
    if (f.kind == Observable::Kind::CenteredSquare && params.truncation() == Truncation::Conservative)
        return 2.0 * params.r() * params.r() / params.n_modes();
    return 0.0;
}

}  // namespace

DecayMeasurement heat_coefficient_variance(const ModelParams& params, int l, std::span<const double> times,
                                           double tolerance) {
    if (params.truncation() != Truncation::Conservative)
        throw std::invalid_argument("heat_coefficient_variance: requires Conservative truncation");
    const int n = params.n_modes();
    if (l < 1 || l > n) throw std::out_of_range("heat_coefficient_variance: mode out of range");

    DecayMeasurement m;
    m.observable = Observable::centered_square(l);
    m.method = DecayMethod::HeatCoefficients;
    m.floor = variance_floor(params, m.observable);
    const double two_r2 = 2.0 * params.r() * params.r();

    std::vector<double> h0(static_cast<std::size_t>(n), 0.0);
    h0[static_cast<std::size_t>(l - 1)] = 1.0;
    const auto op = build_delta_k(params, n, Boundary::ConservativeRight);
    for (const auto& p : evolve_heat(op, h0, times, tolerance)) {
        const double mean = total_mass(p.h) / n;
        double sq = 0.0, dev = 0.0;
        for (double v : p.h) {
            sq += v * v;
            dev += (v - mean) * (v - mean);
        }
        m.times.push_back(p.t);
        m.variance.push_back(two_r2 * sq);
        m.excess.push_back(two_r2 * dev);
        m.std_error.push_back(0.0);
        m.ci.push_back({two_r2 * sq, two_r2 * sq});
        m.inconclusive.push_back(false);
    }
    return m;
}

DecayMeasurement nested_mc_variance(const ModelParams& params, const Observable& f, std::span<const double> times,
                                    std::size_t outer_M, int inner_M, std::uint64_t seed,
                                    const NestedMCOptions& options) {
    if (params.truncation() != Truncation::Conservative)
        throw std::invalid_argument("nested_mc_variance: requires Conservative truncation");
    if (outer_M < 2 || inner_M < 2) throw std::invalid_argument("nested_mc_variance: need outer_M >= 2, inner_M >= 2");
    if (f.l < 1 || f.l > params.n_modes()) throw std::out_of_range("nested_mc_variance: mode out of range");

    const IntegratorScheme scheme{SchemeKind::RotationSplitting, options.dt, SplittingOrder::Strang};
    const auto steps = output_steps(times, scheme.dt);
    const std::size_t n_modes = static_cast<std::size_t>(params.n_modes());
    const std::size_t n_times = times.size();
    const double r = params.r();
    const double mu_f = f.mean_under_mu(r);
    const double sd = std::sqrt(r);
    const double pairs = static_cast<double>(inner_M) * (inner_M - 1);

    // u[i * n_times + j]: U-statistic of outer sample i at time j.
    const std::size_t n_blocks = (outer_M + kPathsPerBlock - 1) / kPathsPerBlock;
    const auto blocks = map_blocks<std::vector<double>>(
        n_blocks,
        [&](std::size_t b) {
            const std::size_t begin = b * kPathsPerBlock, end = std::min(outer_M, begin + kPathsPerBlock);
            std::vector<double> u((end - begin) * n_times, 0.0);
            PathStepper stepper(params, scheme);
            std::vector<double> x0(n_modes), x(n_modes), s1(n_times), s2(n_times);
            for (std::size_t i = begin; i < end; ++i) {
                const std::uint64_t outer_seed = derive_seed(seed, i);
                GaussianSource outer(outer_seed);
                outer.fill(x0, sd);
                std::fill(s1.begin(), s1.end(), 0.0);
                std::fill(s2.begin(), s2.end(), 0.0);
                for (int c = 0; c < inner_M; ++c) {
                    GaussianSource rng(derive_seed(outer_seed, static_cast<std::uint64_t>(c) + 1));
                    x = x0;
                    std::uint64_t done = 0;
                    for (std::size_t j = 0; j < n_times; ++j) {
                        for (; done < steps[j]; ++done) stepper.step(x, rng);
                        const double v = f(x, r);
                        s1[j] += v;
                        s2[j] += v * v;
                    }
                }
                for (std::size_t j = 0; j < n_times; ++j)
                    u[(i - begin) * n_times + j] = (s1[j] * s1[j] - s2[j]) / pairs - mu_f * mu_f;
            }
            return u;
        },
        options.threads);

    std::vector<double> u;
    u.reserve(outer_M * n_times);
    for (const auto& blk : blocks) u.insert(u.end(), blk.begin(), blk.end());

    DecayMeasurement m;
    m.observable = f;
    m.method = DecayMethod::NestedMC;
    m.floor = variance_floor(params, f);
    m.times.assign(times.begin(), times.end());
    for (std::size_t j = 0; j < n_times; ++j) {
        PowerSums s;
        for (std::size_t i = 0; i < outer_M; ++i) s.add(u[i * n_times + j]);
        m.variance.push_back(s.mean());
        m.std_error.push_back(s.std_error());
        m.excess.push_back(s.mean() - m.floor);
    }

    // Percentile bootstrap over outer samples.
    const int n_boot = std::max(options.bootstrap_resamples, 2);
    std::vector<std::vector<double>> boot(n_times, std::vector<double>(static_cast<std::size_t>(n_boot)));
    Engine engine(derive_seed(~seed, outer_M));
    boost::random::uniform_int_distribution<std::size_t> pick(0, outer_M - 1);
    std::vector<double> acc(n_times);
    for (int b = 0; b < n_boot; ++b) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t k = 0; k < outer_M; ++k) {
            const double* row = &u[pick(engine) * n_times];
            for (std::size_t j = 0; j < n_times; ++j) acc[j] += row[j];
        }
        for (std::size_t j = 0; j < n_times; ++j) boot[j][static_cast<std::size_t>(b)] = acc[j] / outer_M;
    }
    for (std::size_t j = 0; j < n_times; ++j) {
        auto& v = boot[j];
        std::sort(v.begin(), v.end());
        const auto at = [&](double q) {
            const double pos = q * (v.size() - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, v.size() - 1);
            return v[lo] + (pos - lo) * (v[hi] - v[lo]);
        };
        const Interval ci{at(0.025), at(0.975)};
        m.ci.push_back(ci);
        m.inconclusive.push_back(ci.half_width() > std::abs(m.excess[j]));
    }
    return m;
}

RateFit fit_rate(const DecayMeasurement& m, double t_lo, double t_hi) {
    std::vector<double> t, y, w;
    bool unit = m.method == DecayMethod::HeatCoefficients;
    for (std::size_t j = 0; j < m.times.size(); ++j) {
        if (m.times[j] < t_lo || m.times[j] > t_hi) continue;
        const double e = j < m.excess.size() ? m.excess[j] : m.variance[j] - m.floor;
        if (!(e > 0.0))
            throw NonPositiveVarianceError("fit_rate: variance minus floor is " + std::to_string(e) + " at t = " +
                                           std::to_string(m.times[j]));
        t.push_back(m.times[j]);
        y.push_back(std::log(e));
        const double se = j < m.std_error.size() ? m.std_error[j] : 0.0;
        if (!(se > 0.0)) unit = true;
        w.push_back(unit ? 1.0 : (e / se) * (e / se));
    }
    if (t.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 points in the window");
    if (unit) std::fill(w.begin(), w.end(), 1.0);

    const LinearFit lf = weighted_linear_fit(t, y, w);
    return {-lf.slope, lf.intercept, lf.r_squared, t.size()};
}

void apply_fit(DecayMeasurement& m, const RateFit& fit) {
    m.rate = fit.rate;
    m.log_intercept = fit.intercept;
    m.r_squared = fit.r_squared;
}

NuComparison compare_to_nu(const ModelParams& params, double rate, double tolerance) {
    NuComparison c;
    c.rate = rate;
    c.nu = nu(params);
    c.ratio = rate * c.nu;
    c.tolerance = tolerance;
    c.consistent = rate >= (1.0 - tolerance) / c.nu;
    return c;
}

}  // namespace dyadic
