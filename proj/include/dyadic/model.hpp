#pragma once

#include <span>
#include <string>
#include <vector>

namespace dyadic {

/// How the infinite chain is cut at mode N.
///
/// Absorbing keeps the coupling k_N to a phantom mode X_{N+1} = 0, which in
/// Ito form leaves the dissipative drift -k_N^2/2 on the last mode (the
/// Galerkin system). Conservative sets k_N = 0, leaving pure rotations that
/// conserve the sum of squares pathwise.
enum class Truncation { Absorbing, Conservative };

std::string to_string(Truncation t);
Truncation truncation_from_string(const std::string& s);

/// Lambda, truncation size, Gaussian variance and truncation mode. All
/// wavenumbers k_n = lambda^n (k_0 = 0) are computed once at construction.
///
/// lambda = 1 is admitted only for the no-gap experiments; anything that needs
/// the rate constant nu throws DivergenceError for it.
class ModelParams {
public:
    ModelParams(double lambda, int n_modes, double r = 1.0,
                Truncation truncation = Truncation::Conservative);

    double lambda() const noexcept { return lambda_; }
    int n_modes() const noexcept { return n_modes_; }
    double r() const noexcept { return r_; }
    Truncation truncation() const noexcept { return truncation_; }

    /// True for lambda == 1, the critical case without a spectral gap.
    bool gapless() const noexcept { return lambda_ == 1.0; }

    /// k_n for 0 <= n <= N + 1, independent of the truncation.
    double k(int n) const;
    double k_sq(int n) const;

    /// Wavenumber of the noise coupling modes (n, n+1) in the truncated
    /// dynamics: equals k_n except k_N = 0 under Conservative truncation.
    double coupling(int n) const;
    double coupling_sq(int n) const;

    ModelParams with_truncation(Truncation t) const;
    ModelParams with_modes(int n_modes) const;
    ModelParams with_r(double r) const;

private:
    double lambda_;
    int n_modes_;
    double r_;
    Truncation truncation_;
    std::vector<double> k_;
    std::vector<double> k_sq_;
};

/// A realization of the truncated system at time t.
struct ShellState {
    std::vector<double> x;
    double t = 0.0;
};

/// Catalog of test functions on the state space: f = x_l or f = x_l^2 - r.
/// Mode indices l are 1-based.
struct Observable {
    enum class Kind { Coordinate, CenteredSquare };

    Kind kind = Kind::Coordinate;
    int l = 1;

    static Observable coordinate(int l);
    static Observable centered_square(int l);

    double operator()(std::span<const double> x, double r) const;
    /// Expectation under mu_r; zero for every catalog member.
    double mean_under_mu(double r) const;
    std::string name() const;
};

double wavenumber(const ModelParams& params, int n);

/// Weighted norm sum_n k_n^{-2} x_n^2 over the given prefix of modes.
double w_norm_sq(const ModelParams& params, std::span<const double> x);

double l2_norm_sq(std::span<const double> x);

/// nu = sum_n n / k_n^2 in closed form x / (1 - x)^2 with x = lambda^{-2}.
/// Throws DivergenceError for lambda <= 1.
double nu(const ModelParams& params);
double nu(double lambda);

/// Gradient energy sum_n |d_n f|^2 in L^2(mu_r), closed form per catalog
/// member: 1 for coordinates, 4r for centered squares.
double gradient_energy(const ModelParams& params, const Observable& f);

}  // namespace dyadic
