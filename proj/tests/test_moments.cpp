#include "dyadic/moments.hpp"
#include "dyadic/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace dyadic;

TEST_CASE("moment right-hand side") {
    const ModelParams a(2.0, 3, 1.0, Truncation::Absorbing);
    CHECK(moment_rhs(a, std::vector<double>{1, 0, 0}) == std::vector<double>{-4, 4, 0});
    CHECK(moment_rhs(a, std::vector<double>{0, 0, 1}) == std::vector<double>{0, 16, -80});
    CHECK(moment_rhs(a, std::vector<double>(3, 0.0)) == std::vector<double>(3, 0.0));

    const ModelParams c = a.with_truncation(Truncation::Conservative);
    CHECK(moment_rhs(c, std::vector<double>{0, 0, 1}) == std::vector<double>{0, 16, -16});
    CHECK(moment_rhs(c, std::vector<double>{2, 2, 2}) == std::vector<double>{0, 0, 0});
}

TEST_CASE("conservative moments preserve the total, absorbing ones lose k_N^2 q_N") {
    GaussianSource rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> q(10);
        for (double& v : q) v = std::abs(rng());
        const ModelParams c(1.7, 10, 1.0, Truncation::Conservative);
        const auto rc = moment_rhs(c, q);
        const double scale = c.k_sq(9) * q[9];
        CHECK(std::abs(std::accumulate(rc.begin(), rc.end(), 0.0)) < 1e-12 * scale + 1e-12);
        const ModelParams a = c.with_truncation(Truncation::Absorbing);
        const auto ra = moment_rhs(a, q);
        CHECK(std::accumulate(ra.begin(), ra.end(), 0.0) == doctest::Approx(-a.k_sq(10) * q[9]).epsilon(1e-12));
    }
}

TEST_CASE("moment operator equals the dense weighted Laplacian") {
    for (bool conservative : {false, true}) {
        const ModelParams p(2.0, 7, 1.0, conservative ? Truncation::Conservative : Truncation::Absorbing);
        const auto op = moment_operator(p);
        const Eigen::MatrixXd ref = oracle::laplacian(2.0, 7, conservative);
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j) CHECK(op.at(i, j) == ref(i, j));
    }
}

TEST_CASE("integrated moments match the matrix exponential") {
    for (bool conservative : {false, true}) {
        const ModelParams p(2.0, 8, 1.0, conservative ? Truncation::Conservative : Truncation::Absorbing);
        const std::vector<double> times{0.0, 0.05, 0.3, 1.0};
        const Eigen::VectorXd q0 = Eigen::VectorXd::LinSpaced(8, 1.0, 0.2);
        const auto out = integrate_moments(p, oracle::to_std(q0), times, 1e-12);
        const Eigen::MatrixXd lap = oracle::laplacian(2.0, 8, conservative);
        for (const auto& m : out) {
            const Eigen::VectorXd ref = oracle::expm_apply(lap, m.t, q0);
            for (int i = 0; i < 8; ++i) CHECK(std::abs(m.q[i] - ref(i)) < 1e-8);
        }
    }
}

TEST_CASE("absorbing W-energy is nonincreasing") {
    const ModelParams a(2.0, 12, 1.0, Truncation::Absorbing);
    const auto out = integrate_moments(a, std::vector<double>(12, 1.0), oracle::to_std(Eigen::VectorXd::LinSpaced(21, 0.0, 2.0)));
    for (std::size_t j = 1; j < out.size(); ++j)
        CHECK(moment_w_energy(a, out[j].q) <= moment_w_energy(a, out[j - 1].q) * (1 + 1e-10));
    CHECK(moment_w_energy(a, std::vector<double>{4.0, 16.0}) == 2.0);
}

TEST_CASE("q-matrix rows") {
    const ModelParams p(2.0, 3, 1.0, Truncation::Absorbing);
    const auto A = build_qmatrix_A(p, 3);
    CHECK(A.at(0, 0) == -4.0);
    CHECK(A.at(0, 1) == 1.0);
    CHECK(A.at(1, 0) == 16.0);
    CHECK(A.at(1, 1) == -20.0);
    CHECK(A.at(1, 2) == 4.0);
    CHECK(A.row_sum(0) == -3.0);
    CHECK(A.row_sum(1) == 0.0);

    for (double lambda : {1.0, 1.5, 2.0, 3.0}) {
        const auto B = build_qmatrix_A(ModelParams(lambda, 4), 9);
        const Eigen::MatrixXd ref = oracle::qmatrix(lambda, 9);
        CHECK(B.row_sum(0) == doctest::Approx(1.0 - lambda * lambda).epsilon(1e-12));
        for (int i = 0; i < 9; ++i) {
            if (i > 0 && i < 8) CHECK(std::abs(B.row_sum(i)) < 1e-12 * std::abs(B.at(i, i)));
            for (int j = 0; j < 9; ++j) CHECK(B.at(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-13));
        }
    }
    // Far beyond the direct k_n^4 overflow point.
    const auto big = build_qmatrix_A(ModelParams(2.0, 4), 300);
    CHECK(std::isfinite(big.super[298]));
    CHECK(std::isfinite(big.diag[299]));
}

TEST_CASE("p-transform") {
    const ModelParams p(2.0, 3);
    CHECK(p_transform(p, std::vector<double>{4, 16}, 1.0) == std::vector<double>{1, 1});
    CHECK(p_transform(p, std::vector<double>{4, 0, 64}, 2.0) == std::vector<double>{0.5, 0, 0.5});
    CHECK_THROWS(p_transform(p, std::vector<double>{1}, 0.0));
}

TEST_CASE("transformed moments solve the forward equation of A") {
    // p = q / k^2 with q from the moment ODE must equal delta_1 exp(tA) (up to k_1^2).
    const ModelParams a(2.0, 8, 1.0, Truncation::Absorbing);
    const auto A = build_qmatrix_A(a, 8);
    std::vector<double> d1(8, 0.0);
    d1[0] = 1.0;
    const std::vector<double> times{0.0, 0.1, 0.4};
    // q_0 = (4, 0, ...) gives p_0 = delta_1 with c = 1.
    std::vector<double> q0(8, 0.0);
    q0[0] = 4.0;
    const auto qq = integrate_moments(a, q0, times, 1e-12);
    const auto p = evolve_forward(A, d1, times, 1e-12);
    for (std::size_t j = 0; j < times.size(); ++j) {
        const auto pt = p_transform(a, qq[j].q, 1.0);
        for (int i = 0; i < 8; ++i) CHECK(std::abs(pt[i] - p[j].q[i]) < 1e-9);
    }
    CHECK_THROWS(integrate_moments(a, std::vector<double>(9, 1.0), times));
}

TEST_CASE("forward evolution: residual, positivity and decreasing mass") {
    const ModelParams p(2.0, 6);
    const auto A = build_qmatrix_A(p, 6);
    std::vector<double> d1(6, 0.0);
    d1[0] = 1.0;
    const double t = 0.2, h = 1e-4;
    const auto s = evolve_forward(A, d1, std::vector<double>{t - h, t, t + h}, 1e-13);
    const auto rhs = A.apply_left(s[1].q);
    for (int i = 0; i < 6; ++i) {
        const double deriv = (s[2].q[i] - s[0].q[i]) / (2 * h);
        CHECK(std::abs(deriv - rhs[i]) < 1e-5 * (1.0 + std::abs(rhs[i])));
    }

    const auto A40 = build_qmatrix_A(p, 40);
    std::vector<double> e1(40, 0.0);
    e1[0] = 1.0;
    const auto big = evolve_forward(A40, e1, oracle::to_std(Eigen::VectorXd::LinSpaced(26, 0.0, 2.5)));
    double prev = 1.0;
    for (const auto& snap : big) {
        for (double v : snap.q) CHECK(v >= 0.0);
        const double mass = std::accumulate(snap.q.begin(), snap.q.end(), 0.0);
        CHECK(mass <= prev * (1 + 1e-9));
        prev = mass;
    }
}

TEST_CASE("survival probability against the heat route") {
    // sum_n (delta_1 e^{tA})_n = sum_n (k_1^2 / k_n^2) (e^{t Delta} delta_1)_n.
    for (double lambda : {1.5, 2.0}) {
        const Eigen::MatrixXd lap = oracle::laplacian(lambda, 10, false);
        for (double t : {0.1, 0.5, 1.0}) {
            const Eigen::VectorXd h = oracle::expm_apply(lap, t, oracle::unit(10, 0));
            double ref = 0.0;
            for (int n = 1; n <= 10; ++n) ref += oracle::k_sq(lambda, 1) / oracle::k_sq(lambda, n) * h(n - 1);
            CHECK(survival_probability(ModelParams(lambda, 4), 10, t, 1e-12) == doctest::Approx(ref).epsilon(1e-8));
        }
    }
    // Truncation-independent once N is large.
    const ModelParams p(2.0, 4);
    CHECK(survival_probability(p, 40, 1.0) == doctest::Approx(survival_probability(p, 60, 1.0)).epsilon(1e-9));
    CHECK(survival_probability(p, 60, 0.0) == 1.0);
}
