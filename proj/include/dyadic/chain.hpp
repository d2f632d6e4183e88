#pragma once

#include "dyadic/model.hpp"
#include "dyadic/stats.hpp"
#include "dyadic/tridiagonal.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dyadic {

/// Birth-death chain on {1, 2, ...} with killing at state 1. Rates are given
/// by their logarithms so that products over thousands of states stay finite;
/// a log-rate of -infinity is a zero rate.
struct BDChainSpec {
    std::function<double(long)> log_birth;  // log b_n, n >= 1
    std::function<double(long)> log_death;  // log a_n, n >= 2
    double kill_at_1 = 0.0;                 // c_1

    double birth(long n) const;
    double death(long n) const;  // 0 for n = 1
};

/// Closed-form chain of the p-transformed moment system at wavenumbers
/// k_n = lambda^n: b_1 = 1, b_n = k_{n-1}^2, a_n = k_n^2, c_1 = lambda^2 - 1.
BDChainSpec dual_chain(double lambda);

/// Reads b_n = A(n, n+1), a_n = A(n, n-1), c_1 = -A(1,1) - A(1,2) from a
/// q-matrix. Beyond the stored states the log-rates are extended linearly
/// from the last two stored values. Rejects nonpositive off-diagonals and
/// matrices with fewer than 3 states.
BDChainSpec chain_from_qmatrix(const TridiagonalOperator& A);

/// Scales every rate (including killing) by s > 0.
BDChainSpec scaled(const BDChainSpec& spec, double s);

enum class Outcome { AliveAt, Killed, Exploded };
std::string to_string(Outcome o);

struct ChainPath {
    std::vector<double> jump_times;  // jump_times[0] = 0
    std::vector<long> states;        // states[i] holds on [jump_times[i], jump_times[i+1])
    Outcome outcome = Outcome::AliveAt;
    /// t_max for AliveAt; killing time; or an upper bound on the explosion time.
    double outcome_time = 0.0;

    /// State at time t, or 0 if the path has been killed or exploded by t.
    long state_at(double t) const;
};

/// Sum_{m >= n} 1/(a_m + b_m): the expected time to climb from n to infinity
/// if every jump were upward. Returns +infinity if the series does not settle
/// within 10^6 terms.
double remaining_passage_bound(const BDChainSpec& spec, long n);

inline constexpr long kDefaultSentinel = 200;

/// Gillespie simulation from state 1. Reaching n_max before t_max declares
/// Exploded(t + bound) when remaining_passage_bound(n_max) < 1e-6 t_max;
/// otherwise the simulation just continues.
ChainPath simulate_chain(const BDChainSpec& spec, double t_max, long n_max, std::uint64_t seed,
                         bool record_path = true);

enum class Series { Exit, Entrance };
std::string to_string(Series s);

struct CriterionResult {
    Series series = Series::Exit;
    long n_terms = 0;
    double value = 0.0;      // partial sum, may be +infinity
    double log_value = 0.0;  // log of the partial sum
    double relative_increment = 0.0;  // 1 - value(n_terms / 2) / value(n_terms)
    double last_term_ratio = 0.0;     // term(n) / term(n-1) at n = n_terms
    bool converged = false;
    bool killing_ignored = true;
};

/// Birth-death series with pi_1 = 1, pi_{n+1} = pi_n b_n / a_{n+1}:
///   Exit:     R = sum_n (1/(b_n pi_n)) sum_{i <= n} pi_i   (finite => the minimal chain explodes)
///   Entrance: S = sum_n (1/(b_n pi_n)) sum_{i >  n} pi_i   (finite => infinity is an entrance
///             boundary and the forward equations lose uniqueness)
/// The inner sums run to n_terms. Killing is not part of either series.
/// Converged iff the relative change between the n_terms/2 and n_terms
/// truncations is below 1e-10.
CriterionResult explosion_criterion(const BDChainSpec& spec, long n_terms, Series series);

struct DishonestyEstimate {
    double t = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t killed = 0;
    std::uint64_t exploded = 0;
    std::uint64_t alive = 0;
    double estimate = 0.0;  // (killed + exploded) / n_paths
    Interval ci;            // Wilson 99%
    Interval killed_ci;
    Interval exploded_ci;
};

/// Fraction of paths not alive at t; path i uses derive_seed(seed, i).
DishonestyEstimate dishonesty_probability(const BDChainSpec& spec, double t, std::uint64_t n_paths,
                                          std::uint64_t seed, long n_max = kDefaultSentinel,
                                          unsigned threads = 0);

/// counts[n] = number of paths in state n at time t, n = 1..max_state;
/// counts[0] collects paths that are dead or above max_state.
std::vector<std::uint64_t> occupation_counts(const BDChainSpec& spec, double t, std::uint64_t n_paths,
                                             std::uint64_t seed, long max_state,
                                             long n_max = kDefaultSentinel, unsigned threads = 0);

}  // namespace dyadic
