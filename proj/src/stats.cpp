#include "dyadic/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyadic {

double PowerSums::mean() const noexcept {
    return n == 0 ? 0.0 : s1 / static_cast<double>(n);
}

double PowerSums::variance() const noexcept {
    if (n < 2) return 0.0;
    const double m = mean();
    const double nn = static_cast<double>(n);
    return std::max(0.0, (s2 - nn * m * m) / (nn - 1.0));
}

double PowerSums::std_error() const noexcept {
    return n == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n));
}

double PowerSums::mean_sq() const noexcept {
    return n == 0 ? 0.0 : s2 / static_cast<double>(n);
}

double PowerSums::std_error_sq() const noexcept {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double m2 = s2 / nn;
    const double var = std::max(0.0, (s4 - nn * m2 * m2) / (nn - 1.0));
    return std::sqrt(var / nn);
}

double PowerSums::excess_kurtosis() const noexcept {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double m = s1 / nn;
    const double e2 = s2 / nn, e3 = s3 / nn, e4 = s4 / nn;
    const double c2 = e2 - m * m;
    const double c4 = e4 - 4.0 * m * e3 + 6.0 * m * m * e2 - 3.0 * m * m * m * m;
    if (c2 <= 0.0) return 0.0;
    return c4 / (c2 * c2) - 3.0;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w) {
    if (x.size() != y.size() || x.size() != w.size())
        throw std::invalid_argument("weighted_linear_fit: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("weighted_linear_fit: need >= 2 points");

    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - xm, dy = y[i] - ym;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
        syy += w[i] * dy * dy;
    }
    if (sxx <= 0.0) throw std::invalid_argument("weighted_linear_fit: degenerate abscissae");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += w[i] * e * e;
    }
    // Relative to the data scale, an exactly flat series has nothing left to explain.
    const double scale = std::max(1.0, std::abs(ym));
    fit.r_squared = syy <= 1e-28 * scale * scale * sw ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

}  // namespace dyadic
