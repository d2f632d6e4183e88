#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace dyadic {

/// Raw power sums up to order four. Merging is plain addition, so
/// reductions over fixed blocks in a fixed order are bit-reproducible.
struct PowerSums {
    std::uint64_t n = 0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    double s4 = 0.0;

    void add(double x) noexcept {
        const double x2 = x * x;
        ++n;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
    }

    PowerSums& merge(const PowerSums& o) noexcept {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        s4 += o.s4;
        return *this;
    }

    double mean() const noexcept;
    /// Unbiased sample variance.
    double variance() const noexcept;
    double std_error() const noexcept;
    /// Mean and standard error of x^2.
    double mean_sq() const noexcept;
    double std_error_sq() const noexcept;
    /// Sample excess kurtosis m4/m2^2 - 3 with central moments about the sample mean.
    double excess_kurtosis() const noexcept;
};

/// Two-sided Wilson score interval for a binomial proportion.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    double half_width() const noexcept { return 0.5 * (hi - lo); }
};

inline constexpr double kZ99 = 2.5758293035489004;
inline constexpr double kZ95 = 1.959963984540054;

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Weighted least squares y ~ intercept + slope * x. R^2 is the weighted
/// coefficient of determination; it is 1 when y is exactly linear (including constant y).
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w);

}  // namespace dyadic
