#include "dyadic/tridiagonal.hpp"

#include "dyadic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dyadic {

namespace {

void check_shape(const TridiagonalOperator& op) {
    const std::size_t n = op.diag.size();
    if (n == 0 || op.sub.size() + 1 != n || op.super.size() + 1 != n)
        throw std::invalid_argument("tridiagonal operator has inconsistent diagonal lengths");
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::vector<double> TridiagonalOperator::apply(std::span<const double> x) const {
    check_shape(*this);
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += sub[i - 1] * x[i - 1];
        if (i + 1 < n) v += super[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> TridiagonalOperator::apply_left(std::span<const double> x) const {
    return transposed().apply(x);
}

TridiagonalOperator TridiagonalOperator::transposed() const {
    return {super, diag, sub, boundary, col_sums, row_sums};
}

bool TridiagonalOperator::symmetric() const noexcept {
    return sub == super;
}

double TridiagonalOperator::row_sum(std::size_t i) const {
    double s = diag.at(i);
    if (i > 0) s += sub[i - 1];
    if (i + 1 < size()) s += super[i];
    return s;
}

double TridiagonalOperator::at(std::size_t i, std::size_t j) const {
    if (i == j) return diag.at(i);
    if (i == j + 1) return sub.at(j);
    if (j == i + 1) return super.at(i);
    if (i >= size() || j >= size()) throw std::out_of_range("TridiagonalOperator::at");
    return 0.0;
}

std::vector<double> TridiagonalOperator::dense() const {
    const std::size_t n = size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] = diag[i];
        if (i > 0) m[i * n + i - 1] = sub[i - 1];
        if (i + 1 < n) m[i * n + i + 1] = super[i];
    }
    return m;
}

namespace {

double row_sum_of(const TridiagonalOperator& op, std::size_t i) {
    return op.row_sums.size() == op.size() ? op.row_sums[i] : op.row_sum(i);
}

double col_sum_of(const TridiagonalOperator& op, std::size_t i) {
    if (op.col_sums.size() == op.size()) return op.col_sums[i];
    double s = op.diag[i];
    if (i > 0) s += op.super[i - 1];
    if (i + 1 < op.size()) s += op.sub[i];
    return s;
}

}  // namespace

void ShiftedSolver::solve(const TridiagonalOperator& op, double h, std::span<const double> b,
                          std::span<double> y) {
    const std::size_t n = op.size();
    c_.resize(n);
    d_.resize(n);
    piv_.resize(n);

    // Magnitudes of the off-diagonals of M = I - hT: lower a_i = h sub, upper c_i = h super.
    auto lower = [&](std::size_t i) { return i > 0 ? h * op.sub[i - 1] : 0.0; };
    auto upper = [&](std::size_t i) { return i + 1 < n ? h * op.super[i] : 0.0; };

    bool metzler = true;
    for (std::size_t i = 0; i + 1 < n; ++i) metzler = metzler && op.sub[i] >= 0.0 && op.super[i] >= 0.0;
    bool rows = metzler, cols = metzler;
    for (std::size_t i = 0; i < n && (rows || cols); ++i) {
        rows = rows && 1.0 - h * row_sum_of(op, i) >= 0.0;
        cols = cols && 1.0 - h * col_sum_of(op, i) >= 0.0;
    }

    if (rows) {
        // Pivot d_i = E_i + c_i with E_i = g_i + a_i E_{i-1} / d_{i-1}, g_i the row excess.
        double e_prev = 0.0, d_prev = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = (1.0 - h * row_sum_of(op, i)) + (i > 0 ? lower(i) * (e_prev / d_prev) : 0.0);
            piv_[i] = e + upper(i);
            e_prev = e;
            d_prev = piv_[i];
        }
    } else if (cols) {
        // Column form: d_i = F_i + a_{i+1} with F_i = gamma_i + c_{i-1} F_{i-1} / d_{i-1}.
        double f_prev = 0.0, d_prev = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = (1.0 - h * col_sum_of(op, i)) + (i > 0 ? upper(i - 1) * (f_prev / d_prev) : 0.0);
            piv_[i] = f + (i + 1 < n ? lower(i + 1) : 0.0);
            f_prev = f;
            d_prev = piv_[i];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            piv_[i] = 1.0 - h * op.diag[i];
            if (i > 0) piv_[i] -= lower(i) * upper(i - 1) / piv_[i - 1];
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        c_[i] = upper(i) / piv_[i];
        d_[i] = (b[i] + (i > 0 ? lower(i) * d_[i - 1] : 0.0)) / piv_[i];
    }
    y[n - 1] = d_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) y[i] = d_[i] + c_[i] * y[i + 1];
}

std::vector<Snapshot> evolve_linear(const TridiagonalOperator& op, std::span<const double> y0,
                                    std::span<const double> times, const EvolveOptions& options) {
    check_shape(op);
    const std::size_t n = op.size();
    if (y0.size() != n) throw std::invalid_argument("evolve_linear: initial vector has wrong length");
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("evolve_linear: tolerance must be > 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1]))
            throw std::invalid_argument("evolve_linear: output times must be nondecreasing and >= 0");
    }

    std::vector<Snapshot> out;
    out.reserve(times.size());
    std::vector<double> y(y0.begin(), y0.end());
    const double scale = max_abs(y);
    if (scale == 0.0) {
        for (double t : times) out.push_back({t, y});
        return out;
    }

    const bool positive_input = std::all_of(y.begin(), y.end(), [](double v) { return v >= 0.0; });
    const bool keep_positive = options.preserve_positivity && positive_input;
    const double atol = options.tolerance * scale;
    const double rtol = options.tolerance;
    const double t_end = times.empty() ? 0.0 : times.back();
    // Steps are measured against the fastest rate in T: a step far below
    // 1/|T| is wasted, and the first step must resolve the stiffest transient
    // (from there h grows geometrically, so starting small is cheap).
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::abs(op.diag[i]);
        if (i > 0) r += std::abs(op.sub[i - 1]);
        if (i + 1 < n) r += std::abs(op.super[i]);
        rate = std::max(rate, r);
    }
    rate = std::max(rate, 1.0 / std::max(1.0, t_end));
    const double h_min = 1e-8 / rate;

    ShiftedSolver solver;
    std::vector<double> full(n), half(n), mid(n), ext(n);
    double t = 0.0;
    double h = std::min(1e-3 / rate, 1e-6 * std::max(1.0, t_end));

    for (double target : times) {
        while (t < target) {
            const bool last = h >= target - t;
            const double step = last ? target - t : h;

            solver.solve(op, step, y, full);
            solver.solve(op, 0.5 * step, y, mid);
            solver.solve(op, 0.5 * step, mid, half);

            double err = 0.0;
            bool negative = false;
            for (std::size_t i = 0; i < n; ++i) {
                ext[i] = 2.0 * half[i] - full[i];
                const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(half[i]));
                err = std::max(err, std::abs(ext[i] - half[i]) / sc);
                if (ext[i] < -atol) negative = true;
            }
            if (!std::isfinite(err)) err = 1e10;

            if (err <= 1.0) {
                // Implicit Euler preserves positivity for Metzler operators; the
                // extrapolated value need not.
                y.swap(negative && keep_positive ? half : ext);
                if (keep_positive)
                    for (double& v : y) v = std::max(v, 0.0);
                t = last ? target : t + step;
            }
            const double factor = std::clamp(0.9 / std::sqrt(std::max(err, 1e-12)), 0.2, 5.0);
            // A step shortened to land on an output time says little about the
            // natural step size; only let it shrink h.
            if (!(last && err <= 1.0 && factor > 1.0)) h = step * factor;
            if (h < h_min)
                throw StepSizeUnderflow("evolve_linear: step size underflow at t = " + std::to_string(t) +
                                        " for tolerance " + std::to_string(options.tolerance));
        }
        out.push_back({target, y});
    }
    return out;
}

TridiagonalOperator symmetrized(const TridiagonalOperator& op) {
    check_shape(op);
    TridiagonalOperator s = op;
    for (std::size_t i = 0; i < op.sub.size(); ++i) {
        const double a = op.sub[i], b = op.super[i];
        if (!(a * b > 0.0) && !(a == 0.0 && b == 0.0))
            throw std::invalid_argument("symmetrized: off-diagonal pair must have a positive product");
        double v = 0.0;
        if (a != 0.0) v = std::exp(0.5 * (std::log(std::abs(a)) + std::log(std::abs(b))));
        if (a < 0.0) v = -v;
        s.sub[i] = v;
        s.super[i] = v;
    }
    return s;
}

std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double sigma) {
    const std::size_t n = diag.size();
    double scale = 1.0;
    for (double v : diag) scale = std::max(scale, std::abs(v));
    for (double v : off) scale = std::max(scale, std::abs(v));
    const double pivmin = std::numeric_limits<double>::min() * scale;

    std::size_t count = 0;
    double d = diag[0] - sigma;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        // off * (off / d) rather than off^2 / d keeps the recurrence away from overflow.
        d = (diag[i] - sigma) - off[i - 1] * (off[i - 1] / d);
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
    }
    return count;
}

namespace {

// Rescales (diag, off) by the geometric midpoint of the magnitudes in `range`
// and returns the factor; throws if the result still spans too much.
double rescale(std::vector<double>& diag, std::vector<double>& off, std::span<const double> range) {
    double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
    for (double v : range) {
        if (v != 0.0) {
            vmax = std::max(vmax, std::abs(v));
            vmin = std::min(vmin, std::abs(v));
        }
    }
    const double s = vmax == 0.0 ? 1.0 : std::sqrt(vmax) * std::sqrt(vmin);
    double largest = 0.0, smallest = std::numeric_limits<double>::infinity();
    auto scale = [&](double& v) {
        v /= s;
        if (v == 0.0) return;
        largest = std::max(largest, std::abs(v));
        smallest = std::min(smallest, std::abs(v));
    };
    for (double& v : diag) scale(v);
    for (double& v : off) scale(v);
    if (largest > 1e150 || smallest < 1e-150)
        throw ScalingLimitError("decay_eigenvalue: operator entries span too many orders of magnitude (n = " +
                                std::to_string(diag.size()) + ")");
    return s;
}

double bisect(std::span<const double> diag, std::span<const double> off, std::size_t index, double rtol) {
    const std::size_t n = diag.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < n) r += std::abs(off[i]);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    for (int iter = 0; iter < 4000; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= rtol * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(diag, off, mid) > index)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// -T = G G^T with G lower bidiagonal when T is a weighted path Laplacian:
// off-diagonals w_i >= 0 and no leak except possibly at the last site.
// Then G(i,i) = sqrt(w_i), G(i+1,i) = -sqrt(w_i), G(n,n) = sqrt(leak).
bool laplacian_factor(const TridiagonalOperator& op, std::vector<double>& g_diag, std::vector<double>& g_sub) {
    const std::size_t n = op.size();
    g_diag.assign(n, 0.0);
    g_sub.assign(n - 1, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (op.super[i] < 0.0) return false;
        g_diag[i] = g_sub[i] = std::sqrt(op.super[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double out = (i > 0 ? op.super[i - 1] : 0.0) + (i + 1 < n ? op.super[i] : 0.0);
        const double leak = -op.diag[i] - out;
        if (i + 1 < n) {
            if (std::abs(leak) > 1e-13 * std::abs(op.diag[i])) return false;
        } else {
            if (leak < -1e-13 * std::abs(op.diag[i])) return false;
            g_diag[i] = leak > 1e-13 * std::abs(op.diag[i]) ? std::sqrt(leak) : 0.0;
        }
    }
    return true;
}

}  // namespace

double decay_eigenvalue(const TridiagonalOperator& op, std::size_t index, double rtol) {
    check_shape(op);
    if (!op.symmetric()) throw std::invalid_argument("decay_eigenvalue: operator must be symmetric");
    const std::size_t n = op.size();
    if (index >= n) throw std::out_of_range("decay_eigenvalue: index out of range");

    std::vector<double> g_diag, g_sub;
    if (laplacian_factor(op, g_diag, g_sub)) {
        // Eigenvalues of G G^T are squared singular values of G. Bisection on
        // the zero-diagonal Golub-Kahan form resolves small singular values to
        // high relative accuracy, which plain Sturm counts on -T do not when
        // row sums nearly cancel.
        std::vector<double> tgk_diag(2 * n, 0.0), tgk_off(2 * n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            tgk_off[2 * i] = g_diag[i];
            if (i + 1 < n) tgk_off[2 * i + 1] = g_sub[i];
        }
        const double s = rescale(tgk_diag, tgk_off, tgk_off);
        const double sigma = bisect(tgk_diag, tgk_off, n + index, 0.5 * rtol) * s;
        return sigma * sigma;
    }

    std::vector<double> diag(n), off(n - 1);
    for (std::size_t i = 0; i < n; ++i) diag[i] = -op.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) off[i] = -op.super[i];
    const double s = rescale(diag, off, op.diag);
    return bisect(diag, off, index, rtol) * s;
}

}  // namespace dyadic
