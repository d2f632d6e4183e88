#pragma once

#include "dyadic/model.hpp"
#include "dyadic/random.hpp"
#include "dyadic/stats.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

enum class SchemeKind { EulerMaruyamaIto, RotationSplitting };
enum class SplittingOrder { Strang, Lie };

std::string to_string(SchemeKind k);
SchemeKind scheme_from_string(const std::string& s);

struct IntegratorScheme {
    SchemeKind kind = SchemeKind::RotationSplitting;
    double dt = 1e-3;
    SplittingOrder order = SplittingOrder::Strang;
};

/// dt times the stiffest Ito damping rate: k_N^2 (Absorbing) or k_{N-1}^2
/// (Conservative, where k_N = 0).
double stability_number(const ModelParams& params, double dt);

/// Throws std::invalid_argument if the scheme is Euler-Maruyama and
/// stability_number > 0.5, or if dt is not positive.
void check_stability(const ModelParams& params, const IntegratorScheme& scheme);

/// Largest N with dt * k^2 <= 0.5 for the given truncation; 0 if none.
int max_stable_modes(double lambda, double dt, Truncation truncation);

/// Ito drift -(k_n^2 + k_{n-1}^2) x_n / 2 with k_N dropped under Conservative truncation.
std::vector<double> ito_drift(const ModelParams& params, std::span<const double> x);

/// k_{n-1} x_{n-1} dW_{n-1} - k_n x_{n+1} dW_n with x_0 = x_{N+1} = 0.
/// dW has N entries (dW_N only ever multiplies x_{N+1} = 0).
std::vector<double> noise_increment(const ModelParams& params, std::span<const double> x,
                                    std::span<const double> dW);

/// Rotates the (n, n+1) plane by theta; n is 1-based.
void rotate_plane(std::span<double> x, int n, double theta);

/// One splitting step driven by the given increments dW_1..dW_{N-1}.
/// Strang: half-angle rotations on planes 1..N-1, the exact last-mode damping
/// (Absorbing only), then half-angle rotations on planes N-1..1.
/// Lie: full-angle rotations on planes 1..N-1, then the damping.
void apply_rotation_splitting(const ModelParams& params, std::span<double> x, std::span<const double> dW,
                              double dt, SplittingOrder order = SplittingOrder::Strang);

std::vector<double> step_rotation_splitting(const ModelParams& params, std::span<const double> x, double dt,
                                            GaussianSource& rng, SplittingOrder order = SplittingOrder::Strang);

/// x + drift dt + noise. Throws NonFiniteStateError if the result is not finite.
std::vector<double> step_euler_maruyama(const ModelParams& params, std::span<const double> x, double dt,
                                        GaussianSource& rng);

/// In-place stepper with precomputed coefficients, used in the ensemble loops.
/// Each step consumes N-1 normals from the source in mode order.
class PathStepper {
public:
    PathStepper(const ModelParams& params, const IntegratorScheme& scheme);

    void step(std::span<double> x, GaussianSource& rng);
    /// Step with caller-supplied increments (length N-1, variance dt).
    void step_with(std::span<double> x, std::span<const double> dW);

    const IntegratorScheme& scheme() const noexcept { return scheme_; }
    std::size_t n_increments() const noexcept { return dW_.size(); }

private:
    IntegratorScheme scheme_;
    double sqrt_dt_;
    std::vector<double> coupling_;   // k_n for planes n = 1..N-1
    std::vector<double> drift_;      // 1 - (k_n^2 + k_{n-1}^2) dt / 2 for EM
    double last_damping_ = 1.0;      // exp(-k_N^2 dt / 2) for splitting under Absorbing
    std::vector<double> dW_;
    std::vector<double> scratch_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Initial law: a fixed state, or i.i.d. Normal(0, r) coordinates.
struct InitialCondition {
    std::vector<double> fixed;
    bool gaussian = false;
    double r = 1.0;

    static InitialCondition fixed_state(std::vector<double> x);
    static InitialCondition gaussian_mu(double r);

    /// Writes a draw into out (length N). Fixed states must have length <= N
    /// and are zero-padded.
    void draw(std::span<double> out, GaussianSource& rng) const;
};

/// Converts output times to step counts; each time must be a multiple of dt
/// to 1e-9 relative precision. Times must be nondecreasing and >= 0.
std::vector<std::uint64_t> output_steps(std::span<const double> times, double dt);

/// Equally spaced times 0, T/n, ..., T.
std::vector<double> uniform_times(double t_final, int n_intervals);

struct PathOutput {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // states[time][mode]
    std::uint64_t seed = 0;
};

/// Simulates one path. The initial draw and all increments come from a
/// single GaussianSource seeded with `seed`.
PathOutput simulate_path(const ModelParams& params, const InitialCondition& x0, const IntegratorScheme& scheme,
                         std::span<const double> times, std::uint64_t seed);

struct TimeSummary {
    double t = 0.0;
    std::vector<PowerSums> modes;   // X_n, n = 1..N
    PowerSums l2;                   // sum_n X_n^2
    PowerSums w_energy;             // sum_n X_n^2 / k_n^2
    double max_rel_l2_drift = 0.0;  // max over paths of |l2(t) - l2(0)| / l2(0)
};

struct EnsembleSummary {
    std::vector<TimeSummary> at;
    std::size_t n_paths = 0;
    std::uint64_t master_seed = 0;
};

inline constexpr std::size_t kPathsPerBlock = 64;

/// Runs n_paths independent paths; path i uses seed derive_seed(master_seed, i).
/// Paths are grouped in fixed blocks whose sums are merged in block order, so
/// the result is bit-identical for any thread count. NonFiniteStateError
/// carries the failing path index.
EnsembleSummary simulate_ensemble(const ModelParams& params, const InitialCondition& x0,
                                  const IntegratorScheme& scheme, std::span<const double> times,
                                  std::size_t n_paths, std::uint64_t master_seed, unsigned threads = 0);

}  // namespace dyadic
