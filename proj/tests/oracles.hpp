#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's numerics.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

namespace oracle {

// Frozen values from an 80-digit mpmath evaluation of the weighted Laplacian
// at lambda = 2.
inline constexpr double kDirichletGapN8 = 2.772480197815723;
inline constexpr double kDirichletGapLimit = 2.7724091666024173;  // N = 24 and N = 60 agree
inline constexpr double kConservativeSecondN24 = 2.9964464986345583;

inline double k_sq(double lambda, int n) { return n == 0 ? 0.0 : std::pow(lambda, 2.0 * n); }

// Dense weighted Laplacian written out entry by entry from its defining formula.
inline Eigen::MatrixXd laplacian(double lambda, int n, bool conservative) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i <= n; ++i) {
        const double right = (conservative && i == n) ? 0.0 : k_sq(lambda, i);
        const double left = k_sq(lambda, i - 1);
        m(i - 1, i - 1) = -(right + left);
        if (i < n) m(i - 1, i) = right;
        if (i > 1) m(i - 1, i - 2) = left;
    }
    return m;
}

// Dense q-matrix: the similarity transform A = K^2 D K^-2 transposed, built
// from the Laplacian rather than from the row formulas.
inline Eigen::MatrixXd qmatrix(double lambda, int n) {
    const Eigen::MatrixXd d = laplacian(lambda, n, false);
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = d(c, r) * k_sq(lambda, r + 1) / k_sq(lambda, c + 1);
    return a;
}

inline Eigen::VectorXd expm_apply(const Eigen::MatrixXd& m, double t, const Eigen::VectorXd& v) {
    const Eigen::MatrixXd e = (m * t).exp();
    return e * v;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::VectorXd unit(int n, int i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(i) = 1.0;
    return v;
}

// Ascending eigenvalues of a dense symmetric matrix.
inline Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

inline double nu_partial_sum(double lambda, int terms) {
    double s = 0.0;
    for (int n = 1; n <= terms; ++n) s += n / std::pow(lambda, 2.0 * n);
    return s;
}

// Exact second moments of the Euler-Maruyama chain (Absorbing truncation):
//   q_n' = (1 - s_n dt / 2)^2 q_n + dt (k_{n-1}^2 q_{n-1} + k_n^2 q_{n+1}),
// s_n = k_n^2 + k_{n-1}^2, iterated for n_steps.
inline std::vector<double> em_second_moments(double lambda, int n, std::vector<double> q, double dt, long n_steps) {
    std::vector<double> next(q.size());
    for (long step = 0; step < n_steps; ++step) {
        for (int i = 1; i <= n; ++i) {
            const double s = k_sq(lambda, i) + k_sq(lambda, i - 1);
            const double f = 1.0 - 0.5 * s * dt;
            double v = f * f * q[i - 1];
            if (i > 1) v += dt * k_sq(lambda, i - 1) * q[i - 2];
            if (i < n) v += dt * k_sq(lambda, i) * q[i];
            next[i - 1] = v;
        }
        q.swap(next);
    }
    return q;
}

}  // namespace oracle
