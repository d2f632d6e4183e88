#include "dyadic/chain.hpp"
#include "dyadic/moments.hpp"
#include "dyadic/random.hpp"
#include "dyadic/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

using namespace dyadic;

namespace {

// b_n = 4^n, a_n = 4^{n-1}, no killing: pi_n = 1 and the exit series is sum n 4^{-n} = 4/9.
BDChainSpec toy_chain() {
    BDChainSpec s;
    s.log_birth = [](long n) { return n * std::log(4.0); };
    s.log_death = [](long n) { return (n - 1) * std::log(4.0); };
    return s;
}

// Entrance series of the moment chain in closed form, x = lambda^-2:
// pi_n = x^{2(n-1)}, so S = (x^2 + x^3 / (1 - x)) / (1 - x^2).
double entrance_closed_form(double lambda) {
    const double x = 1.0 / (lambda * lambda);
    return (x * x + x * x * x / (1.0 - x)) / (1.0 - x * x);
}

}  // namespace

TEST_CASE("rates read from the q-matrix") {
    const ModelParams p(2.0, 4);
    const auto spec = chain_from_qmatrix(build_qmatrix_A(p, 10));
    CHECK(spec.birth(1) == doctest::Approx(1.0));
    CHECK(spec.birth(2) == doctest::Approx(4.0));
    CHECK(spec.death(2) == doctest::Approx(16.0));
    CHECK(spec.death(1) == 0.0);
    CHECK(spec.kill_at_1 == doctest::Approx(3.0));
    // The linear log extension beyond the stored states reproduces the closed form.
    const auto closed = dual_chain(2.0);
    for (long n : {5L, 9L, 10L, 11L, 30L}) {
        CHECK(spec.log_birth(n) == doctest::Approx(closed.log_birth(n)).epsilon(1e-12));
        CHECK(spec.log_death(n) == doctest::Approx(closed.log_death(n)).epsilon(1e-12));
    }

    CHECK_THROWS(chain_from_qmatrix(build_qmatrix_A(p, 2)));
    auto bad = build_qmatrix_A(p, 5);
    bad.sub[1] = -1.0;
    CHECK_THROWS(chain_from_qmatrix(bad));
    CHECK_THROWS(dual_chain(0.5));
    CHECK_THROWS(scaled(closed, 0.0));
}

TEST_CASE("degenerate chains") {
    BDChainSpec dead;
    dead.log_birth = [](long) { return -std::numeric_limits<double>::infinity(); };
    dead.log_death = dead.log_birth;
    dead.kill_at_1 = 1.0;
    const auto p = simulate_chain(dead, 1e6, 50, 3);
    CHECK(p.outcome == Outcome::Killed);
    CHECK(p.state_at(p.outcome_time) == 0);
    CHECK(p.state_at(0.0) == 1);

    dead.kill_at_1 = 0.0;
    const auto q = simulate_chain(dead, 5.0, 50, 3);
    CHECK(q.outcome == Outcome::AliveAt);
    CHECK(q.state_at(4.0) == 1);

    const auto zero_time = dishonesty_probability(dual_chain(2.0), 0.0, 100, 1);
    CHECK(zero_time.alive == 100);
    CHECK(zero_time.estimate == 0.0);
    CHECK(to_string(Outcome::Exploded) == "exploded");
}

TEST_CASE("time rescaling") {
    const auto spec = dual_chain(1.5);
    const double s = 8.0;
    const auto a = simulate_chain(spec, 1.0, 200, 77);
    const auto b = simulate_chain(scaled(spec, s), 1.0 / s, 200, 77);
    REQUIRE(a.states == b.states);
    CHECK(a.outcome == b.outcome);
    for (std::size_t i = 0; i < a.jump_times.size(); ++i)
        CHECK(b.jump_times[i] == doctest::Approx(a.jump_times[i] / s).epsilon(1e-12));
}

TEST_CASE("path bookkeeping") {
    const auto p = simulate_chain(dual_chain(1.5), 2.0, 200, 11);
    REQUIRE(p.jump_times.size() == p.states.size());
    for (std::size_t i = 1; i < p.states.size(); ++i) {
        CHECK(std::abs(p.states[i] - p.states[i - 1]) == 1);
        CHECK(p.jump_times[i] > p.jump_times[i - 1]);
    }
    const auto compact = simulate_chain(dual_chain(1.5), 2.0, 200, 11, false);
    CHECK(compact.outcome == p.outcome);
    CHECK(compact.outcome_time == p.outcome_time);

    const auto e = dishonesty_probability(dual_chain(2.0), 0.5, 3000, 9);
    CHECK(e.killed + e.exploded + e.alive == e.n_paths);
    CHECK(e.ci.contains(e.estimate));
    CHECK(e.estimate == doctest::Approx(static_cast<double>(e.killed + e.exploded) / 3000));
    const auto e1 = dishonesty_probability(dual_chain(2.0), 0.5, 3000, 9, kDefaultSentinel, 1);
    CHECK(e1.killed == e.killed);
    CHECK(e1.exploded == e.exploded);
}

TEST_CASE("series criteria") {
    const auto toy = explosion_criterion(toy_chain(), 400, Series::Exit);
    CHECK(toy.converged);
    CHECK(toy.value == doctest::Approx(4.0 / 9.0).epsilon(1e-12));

    for (double lambda : {1.5, 2.0, 3.0}) {
        const auto s = explosion_criterion(dual_chain(lambda), 400, Series::Entrance);
        CHECK(s.converged);
        CHECK(s.value == doctest::Approx(entrance_closed_form(lambda)).epsilon(1e-10));
        CHECK_FALSE(explosion_criterion(dual_chain(lambda), 400, Series::Exit).converged);
    }
    CHECK(entrance_closed_form(2.0) == doctest::Approx(4.0 / 45.0));

    // lambda = 1 is the symmetric walk: both series diverge.
    CHECK_FALSE(explosion_criterion(dual_chain(1.0), 400, Series::Entrance).converged);
    CHECK_FALSE(explosion_criterion(dual_chain(1.0), 400, Series::Exit).converged);
    CHECK_THROWS(explosion_criterion(toy_chain(), 5, Series::Exit));
    CHECK(to_string(Series::Entrance) == "entrance");
}

TEST_CASE("a chain with a finite exit series explodes") {
    // E_1[explosion time] equals the exit series, so Markov's inequality bounds survival.
    const double R = 4.0 / 9.0;
    const double t = 4.0;
    const auto e = dishonesty_probability(toy_chain(), t, 4000, 21);
    CHECK(e.killed == 0);
    CHECK(e.exploded_ci.hi >= 1.0 - R / t);

    PowerSums zeta;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        const auto p = simulate_chain(toy_chain(), 1e3, kDefaultSentinel, derive_seed(5, i), false);
        REQUIRE(p.outcome == Outcome::Exploded);
        zeta.add(p.outcome_time);
    }
    CHECK(std::abs(zeta.mean() - R) < 4.0 * zeta.std_error());
    CHECK(remaining_passage_bound(toy_chain(), 200) < 1e-100);
}

TEST_CASE("occupation frequencies follow the forward equation") {
    const ModelParams p(2.0, 4);
    const auto A = build_qmatrix_A(p, 40);
    std::vector<double> d1(40, 0.0);
    d1[0] = 1.0;
    const std::uint64_t M = 20000;
    for (double t : {0.05, 0.2}) {
        const auto fwd = evolve_forward(A, d1, std::vector<double>{t}, 1e-12).front().q;
        const auto counts = occupation_counts(dual_chain(2.0), t, M, 31, 6);
        for (int n = 1; n <= 6; ++n) {
            const double freq = static_cast<double>(counts[n]) / M;
            const double sd = std::sqrt(fwd[n - 1] * (1 - fwd[n - 1]) / M);
            CHECK(std::abs(freq - fwd[n - 1]) < 4.0 * sd + 1.0 / M);
        }
        // Everything not in 1..6 is dead or (negligibly) higher up.
        const double alive = std::accumulate(fwd.begin(), fwd.begin() + 6, 0.0);
        const double lost = static_cast<double>(counts[0]) / M;
        CHECK(std::abs(lost - (1.0 - alive)) < 4.0 * std::sqrt(alive * (1 - alive) / M) + 1e-3);
    }
}

TEST_CASE("loss probability grows with lambda") {
    double prev = -1.0;
    for (double lambda : {1.5, 2.0, 3.0}) {
        const double loss = 1.0 - survival_probability(ModelParams(lambda, 4), 60, 0.5);
        CHECK(loss > prev);
        prev = loss;
        const auto e = dishonesty_probability(dual_chain(lambda), 0.5, 4000, 2);
        CHECK(std::abs(e.estimate - loss) < 4.0 * std::sqrt(loss * (1 - loss) / 4000));
    }
}
