#include "dyadic/model.hpp"

#include "dyadic/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dyadic {

std::string to_string(Truncation t) {
    return t == Truncation::Absorbing ? "absorbing" : "conservative";
}

Truncation truncation_from_string(const std::string& s) {
    if (s == "absorbing") return Truncation::Absorbing;
    if (s == "conservative") return Truncation::Conservative;
    throw std::invalid_argument("unknown truncation '" + s + "' (expected absorbing|conservative)");
}

ModelParams::ModelParams(double lambda, int n_modes, double r, Truncation truncation)
    : lambda_(lambda), n_modes_(n_modes), r_(r), truncation_(truncation) {
    if (!(lambda >= 1.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be finite and >= 1");
    if (n_modes < 2) throw std::invalid_argument("n_modes must be >= 2");
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("r must be finite and > 0");

    k_.assign(static_cast<std::size_t>(n_modes) + 2, 0.0);
    k_sq_.assign(k_.size(), 0.0);
    for (std::size_t n = 1; n < k_.size(); ++n) {
        // Repeated multiplication keeps integer lambdas exact.
        k_[n] = n == 1 ? lambda : k_[n - 1] * lambda;
        k_sq_[n] = k_[n] * k_[n];
    }
    if (!std::isfinite(k_sq_.back()))
        throw std::invalid_argument("lambda^(2(N+1)) overflows binary64; reduce n_modes");
}

double ModelParams::k(int n) const {
    if (n < 0 || n > n_modes_ + 1) throw std::out_of_range("wavenumber index out of range");
    return k_[static_cast<std::size_t>(n)];
}

double ModelParams::k_sq(int n) const {
    if (n < 0 || n > n_modes_ + 1) throw std::out_of_range("wavenumber index out of range");
    return k_sq_[static_cast<std::size_t>(n)];
}

double ModelParams::coupling(int n) const {
    if (n >= n_modes_ && truncation_ == Truncation::Conservative) return 0.0;
    if (n > n_modes_) return 0.0;
    return k(n);
}

double ModelParams::coupling_sq(int n) const {
    const double c = coupling(n);
    return c == 0.0 ? 0.0 : k_sq(n);
}

ModelParams ModelParams::with_truncation(Truncation t) const {
    return ModelParams(lambda_, n_modes_, r_, t);
}

ModelParams ModelParams::with_modes(int n_modes) const {
    return ModelParams(lambda_, n_modes, r_, truncation_);
}

ModelParams ModelParams::with_r(double r) const {
    return ModelParams(lambda_, n_modes_, r, truncation_);
}

Observable Observable::coordinate(int l) { return {Kind::Coordinate, l}; }
Observable Observable::centered_square(int l) { return {Kind::CenteredSquare, l}; }

double Observable::operator()(std::span<const double> x, double r) const {
    const double v = x[static_cast<std::size_t>(l - 1)];
    return kind == Kind::Coordinate ? v : v * v - r;
}

double Observable::mean_under_mu(double /*r*/) const { return 0.0; }

std::string Observable::name() const {
    const std::string x = "x_" + std::to_string(l);
    return kind == Kind::Coordinate ? x : x + "^2-r";
}

double wavenumber(const ModelParams& params, int n) {
    return params.k(n);
}

double w_norm_sq(const ModelParams& params, std::span<const double> x) {
    if (x.size() > static_cast<std::size_t>(params.n_modes()))
        throw std::invalid_argument("w_norm_sq: more entries than modes");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * x[i] / params.k_sq(static_cast<int>(i) + 1);
    return s;
}

double l2_norm_sq(std::span<const double> x) {
    return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double nu(double lambda) {
    if (!(lambda > 1.0))
        throw DivergenceError("nu = sum n/k_n^2 diverges for lambda <= 1");
    const double x = 1.0 / (lambda * lambda);
    return x / ((1.0 - x) * (1.0 - x));
}

double nu(const ModelParams& params) { return nu(params.lambda()); }

double gradient_energy(const ModelParams& params, const Observable& f) {
    if (f.l < 1 || f.l > params.n_modes()) throw std::out_of_range("observable mode out of range");
    return f.kind == Observable::Kind::Coordinate ? 1.0 : 4.0 * params.r();
}

}  // namespace dyadic
