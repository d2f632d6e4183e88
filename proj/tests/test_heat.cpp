#include "dyadic/errors.hpp"
#include "dyadic/heat.hpp"
#include "dyadic/model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace dyadic;

namespace {

const ModelParams kTwo(2.0, 4);

std::vector<double> delta1(int n) {
    std::vector<double> h(static_cast<std::size_t>(n), 0.0);
    h[0] = 1.0;
    return h;
}

double path_graph_gap(int n) {
    const double s = std::sin(std::numbers::pi / (2.0 * (2 * n + 1)));
    return 4.0 * s * s;
}

}  // namespace

TEST_CASE("weighted Laplacian entries") {
    const auto d = build_delta_k(kTwo, 3, Boundary::DirichletRight);
    CHECK(d.diag == std::vector<double>{-4, -20, -80});
    CHECK(d.super == std::vector<double>{4, 16});
    CHECK(d.symmetric());
    const auto c = build_delta_k(kTwo, 3, Boundary::ConservativeRight);
    CHECK(c.diag == std::vector<double>{-4, -20, -16});
    CHECK(c.boundary == Boundary::ConservativeRight);
    for (std::size_t i = 0; i < 3; ++i) CHECK(c.row_sum(i) == 0.0);
    CHECK(d.row_sum(2) == -64.0);
    CHECK_THROWS(build_delta_k(kTwo, 1, Boundary::DirichletRight));
}

TEST_CASE("heat flow matches the matrix exponential") {
    for (bool conservative : {false, true}) {
        const auto op = build_delta_k(kTwo, 8, conservative ? Boundary::ConservativeRight : Boundary::DirichletRight);
        const Eigen::MatrixXd lap = oracle::laplacian(2.0, 8, conservative);
        const std::vector<double> times{0.0, 0.02, 0.2, 1.0, 3.0};
        for (int start : {0, 7}) {
            const auto out = evolve_heat(op, oracle::to_std(oracle::unit(8, start)), times, 1e-12);
            for (const auto& hp : out) {
                const Eigen::VectorXd ref = oracle::expm_apply(lap, hp.t, oracle::unit(8, start));
                for (int i = 0; i < 8; ++i) CHECK(std::abs(hp.h[i] - ref(i)) < 1e-8);
            }
        }
    }
}

TEST_CASE("conservative heat flow keeps the mass") {
    const auto op = build_delta_k(kTwo, 30, Boundary::ConservativeRight);
    const auto out = evolve_heat(op, delta1(30), std::vector<double>{0.5, 2.0, 10.0}, 1e-12);
    for (const auto& hp : out) CHECK(total_mass(hp.h) == doctest::Approx(1.0).epsilon(1e-9));
    // Converges to the uniform profile.
    for (double v : out.back().h) CHECK(v == doctest::Approx(1.0 / 30).epsilon(1e-6));
}

TEST_CASE("maximum and comparison principles") {
    const auto op = build_delta_k(kTwo, 12, Boundary::DirichletRight);
    std::vector<double> lo(12), hi(12);
    for (int i = 0; i < 12; ++i) {
        lo[i] = 0.5 + 0.5 * std::sin(i);
        hi[i] = lo[i] + 0.1 * (i % 3);
    }
    const auto times = oracle::to_std(Eigen::VectorXd::LinSpaced(11, 0.0, 1.0));
    const auto a = evolve_heat(op, lo, times, 1e-12);
    const auto b = evolve_heat(op, hi, times, 1e-12);
    const double top = *std::max_element(lo.begin(), lo.end());
    for (std::size_t j = 0; j < times.size(); ++j) {
        for (int i = 0; i < 12; ++i) {
            CHECK(a[j].h[i] >= 0.0);
            CHECK(a[j].h[i] <= top * (1 + 1e-12));
            CHECK(a[j].h[i] <= b[j].h[i] + 1e-14);
        }
        if (j > 0) CHECK(total_mass(a[j].h) <= total_mass(a[j - 1].h));
    }
}

TEST_CASE("spectral gap at lambda = 2") {
    CHECK(spectral_gap(build_delta_k(kTwo, 8, Boundary::DirichletRight)).gap ==
          doctest::Approx(oracle::kDirichletGapN8).epsilon(1e-10));
    for (int n : {24, 60, 200}) {
        const auto g = spectral_gap(build_delta_k(kTwo, n, Boundary::DirichletRight));
        CHECK(g.gap == doctest::Approx(oracle::kDirichletGapLimit).epsilon(1e-10));
        CHECK(g.n_sites == n);
        CHECK(g.method == GapMethod::SturmBisection);
    }
    CHECK_THROWS_AS(spectral_gap(build_delta_k(kTwo, 8, Boundary::ConservativeRight)), std::invalid_argument);
    CHECK(to_string(GapMethod::RateFit) == "rate-fit");
}

TEST_CASE("no gap at lambda = 1") {
    const ModelParams one(1.0, 4);
    CHECK(spectral_gap(build_delta_k(one, 2, Boundary::DirichletRight)).gap ==
          doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-10));
    double prev = 1.0;
    for (int n : {25, 50, 100, 200}) {
        const double g = spectral_gap(build_delta_k(one, n, Boundary::DirichletRight)).gap;
        CHECK(g == doctest::Approx(path_graph_gap(n)).epsilon(1e-9));
        CHECK(g < prev);
        prev = g;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("gap is monotone in lambda") {
    double prev = 0.0;
    for (double lambda : {1.0, 1.25, 1.5, 2.0, 3.0}) {
        const double g = spectral_gap(build_delta_k(ModelParams(lambda, 4), 30, Boundary::DirichletRight)).gap;
        CHECK(g > prev);
        prev = g;
    }
}

TEST_CASE("relaxation rate of the conservative operator") {
    const auto c = build_delta_k(kTwo, 24, Boundary::ConservativeRight);
    CHECK(std::abs(relaxation_rate(c, 0)) < 1e-10);
    CHECK(relaxation_rate(c, 1) == doctest::Approx(oracle::kConservativeSecondN24).epsilon(1e-11));
}

TEST_CASE("mass decay fit") {
    // Started on the principal eigenvector the mass is an exact exponential.
    const Eigen::MatrixXd lap = oracle::laplacian(2.0, 8, false);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-lap);
    Eigen::VectorXd v = es.eigenvectors().col(0);
    if (v.sum() < 0) v = -v;
    const auto op = build_delta_k(kTwo, 8, Boundary::DirichletRight);
    const auto fit = mass_decay_fit(op, oracle::to_std(v), 0.0, 2.0, 21, 1e-12);
    CHECK(fit.rate == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-6));
    CHECK(fit.r_squared > 1.0 - 1e-10);
    CHECK(fit.times.size() == 21);

    // From delta_1 at large N the late-time slope is the gap.
    const double nu2 = nu(2.0);
    const auto op60 = build_delta_k(kTwo, 60, Boundary::DirichletRight);
    const auto f60 = mass_decay_fit(op60, delta1(60), 2 * nu2, 8 * nu2);
    CHECK(f60.rate == doctest::Approx(oracle::kDirichletGapLimit).epsilon(1e-4));
    const auto g = as_gap(f60, 60);
    CHECK(g.method == GapMethod::RateFit);

    CHECK_THROWS_AS(mass_decay_fit(op, oracle::to_std(v), 0.0, 1000.0), MassUnderflow);
    CHECK_THROWS(mass_decay_fit(op, oracle::to_std(v), 1.0, 0.5));
}
