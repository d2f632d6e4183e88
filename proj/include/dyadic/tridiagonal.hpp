#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dyadic {

/// Right-edge closure of a chain operator. DirichletRight drops the coupling
/// to site N+1 (mass leaks there); ConservativeRight removes the bond
/// entirely, so columns sum to zero.
enum class Boundary { DirichletRight, ConservativeRight };

/// Tridiagonal N x N matrix T stored by diagonals:
///   sub[i]   = T(i+1, i)
///   diag[i]  = T(i, i)
///   super[i] = T(i, i+1)
/// with 0-based i. Hosts both the weighted Laplacian and the q-matrix.
struct TridiagonalOperator {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
    Boundary boundary = Boundary::DirichletRight;
    /// Optional exact row and column sums of T. Builders that know them (zero
    /// for conservative rows) fill these in; the shifted solver then forms its
    /// pivots without cancellation. Empty means "sum the stored entries".
    std::vector<double> row_sums;
    std::vector<double> col_sums;

    std::size_t size() const noexcept { return diag.size(); }

    /// y = T x.
    std::vector<double> apply(std::span<const double> x) const;
    /// Row-vector product y = x T (i.e. T^T x).
    std::vector<double> apply_left(std::span<const double> x) const;

    TridiagonalOperator transposed() const;
    /// Exact equality of sub and super diagonals.
    bool symmetric() const noexcept;
    double row_sum(std::size_t i) const;
    double at(std::size_t i, std::size_t j) const;

    /// Row-major dense copy, for diagnostics and small oracles.
    std::vector<double> dense() const;
};

/// Reusable workspace for Thomas sweeps.
class ShiftedSolver {
public:
    /// Solves (I - h T) y = b. The matrix is assumed diagonally dominant (by
    /// rows or columns), so no pivoting is done. When T has nonnegative
    /// off-diagonals and I - hT has nonnegative row (or column) excess, the
    /// pivots are built from the excess (the GTH trick), which stays accurate
    /// for any h * |T|.
    void solve(const TridiagonalOperator& op, double h, std::span<const double> b,
               std::span<double> y);

private:
    std::vector<double> c_;
    std::vector<double> d_;
    std::vector<double> piv_;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> y;
};

struct EvolveOptions {
    /// Mixed local error tolerance: atol = tolerance * max|y0|, rtol = tolerance.
    double tolerance = 1e-10;
    /// Keep a nonnegative solution nonnegative: negative extrapolated entries
    /// trigger the implicit-Euler fallback, and roundoff-level negatives are
    /// clamped to zero. Only effective when y0 >= 0 entrywise.
    bool preserve_positivity = true;
};

/// Integrates y' = T y from t = 0 and returns y at each requested time
/// (nondecreasing, >= 0). Uses implicit Euler with Richardson extrapolation
/// (L-stable, second order) and adaptive steps, so stiffness ratios of
/// lambda^{2N} cost only a few extra steps. Throws StepSizeUnderflow when the
/// tolerance cannot be met.
std::vector<Snapshot> evolve_linear(const TridiagonalOperator& op, std::span<const double> y0,
                                    std::span<const double> times, const EvolveOptions& options = {});

/// Returns the symmetric operator similar to op, with off-diagonal
/// sqrt(sub * super) computed in log space. Requires sub[i] * super[i] > 0.
TridiagonalOperator symmetrized(const TridiagonalOperator& op);

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off) that
/// are strictly less than sigma (Sturm sequence count).
std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double sigma);

/// index-th smallest eigenvalue (0-based) of -T for symmetric T, by Sturm
/// bisection to relative tolerance rtol. The matrix is rescaled by the
/// geometric midpoint of its diagonal magnitudes first; throws
/// ScalingLimitError if the rescaled entries still do not fit in binary64.
double decay_eigenvalue(const TridiagonalOperator& op, std::size_t index, double rtol = 1e-12);

}  // namespace dyadic
