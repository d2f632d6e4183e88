#include "dyadic/chain.hpp"

#include "dyadic/parallel.hpp"
#include "dyadic/random.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dyadic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    if (a == kInf || b == kInf) return kInf;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

double BDChainSpec::birth(long n) const { return std::exp(log_birth(n)); }

double BDChainSpec::death(long n) const { return n <= 1 ? 0.0 : std::exp(log_death(n)); }

BDChainSpec dual_chain(double lambda) {
    if (!(lambda >= 1.0)) throw std::invalid_argument("dual_chain: lambda must be >= 1");
    const double two_log = 2.0 * std::log(lambda);
    BDChainSpec spec;
    spec.log_birth = [two_log](long n) { return n <= 1 ? 0.0 : two_log * static_cast<double>(n - 1); };
    spec.log_death = [two_log](long n) { return two_log * static_cast<double>(n); };
    spec.kill_at_1 = lambda * lambda - 1.0;
    return spec;
}

BDChainSpec chain_from_qmatrix(const TridiagonalOperator& A) {
    const std::size_t n = A.size();
    if (n < 3) throw std::invalid_argument("chain_from_qmatrix: need at least 3 states");
    std::vector<double> lb(n - 1), la(n - 1);  // lb[i] = log b_{i+1}, la[i] = log a_{i+2}
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(A.super[i] > 0.0) || !(A.sub[i] > 0.0))
            throw std::invalid_argument("chain_from_qmatrix: off-diagonal entries must be positive");
        lb[i] = std::log(A.super[i]);
        la[i] = std::log(A.sub[i]);
    }
    const double c1 = -A.diag[0] - A.super[0];
    if (c1 < -1e-12 * std::abs(A.diag[0])) throw std::invalid_argument("chain_from_qmatrix: row 1 sum is positive");

    auto extend = [](std::vector<double> v, long offset) {
        const double slope = v[v.size() - 1] - v[v.size() - 2];
        return [v = std::move(v), offset, slope](long m) {
            const long i = m - offset;
            if (i < 0) return -kInf;
            if (static_cast<std::size_t>(i) < v.size()) return v[static_cast<std::size_t>(i)];
            return v.back() + slope * static_cast<double>(i - static_cast<long>(v.size()) + 1);
        };
    };
    BDChainSpec spec;
    spec.log_birth = extend(std::move(lb), 1);
    spec.log_death = extend(std::move(la), 2);
    spec.kill_at_1 = std::max(0.0, c1);
    return spec;
}

BDChainSpec scaled(const BDChainSpec& spec, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
    const double ls = std::log(s);
    BDChainSpec out;
    out.log_birth = [f = spec.log_birth, ls](long n) { return f(n) + ls; };
    out.log_death = [f = spec.log_death, ls](long n) { return f(n) + ls; };
    out.kill_at_1 = spec.kill_at_1 * s;
    return out;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::AliveAt: return "alive";
        case Outcome::Killed: return "killed";
        case Outcome::Exploded: return "exploded";
    }
    return "?";
}

long ChainPath::state_at(double t) const {
    if (outcome != Outcome::AliveAt && t >= outcome_time) return 0;
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return states.empty() ? 0 : states.front();
    return states[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double remaining_passage_bound(const BDChainSpec& spec, long n) {
    double log_sum = -kInf;
    for (long m = std::max(n, 1L); m < n + 1'000'000; ++m) {
        const double log_rate = log_add(m >= 2 ? spec.log_death(m) : -kInf, spec.log_birth(m));
        const double term = -log_rate;
        log_sum = log_add(log_sum, term);
        if (term < log_sum - 40.0) return std::exp(log_sum);
    }
    return kInf;
}

ChainPath simulate_chain(const BDChainSpec& spec, double t_max, long n_max, std::uint64_t seed, bool record_path) {
    if (n_max < 2) throw std::invalid_argument("simulate_chain: sentinel level must be >= 2");
    Engine engine(seed);
    boost::random::exponential_distribution<double> expo(1.0);
    boost::random::uniform_01<double> unif;

    ChainPath path;
    long n = 1;
    double t = 0.0;
    path.jump_times.push_back(0.0);
    path.states.push_back(1);
    double tail = -1.0;  // lazily computed passage bound above the sentinel

    while (true) {
        const double b = spec.birth(n);
        const double a = spec.death(n);
        const double c = n == 1 ? spec.kill_at_1 : 0.0;
        const double total = a + b + c;
        if (!(total > 0.0)) break;
        const double wait = expo(engine) / total;
        if (!(t + wait < t_max)) break;
        t += wait;

        const double u = unif(engine) * total;
        if (u < c) {
            path.outcome = Outcome::Killed;
            path.outcome_time = t;
            return path;
        }
        n += u < c + b ? 1 : -1;
        if (record_path) {
            path.jump_times.push_back(t);
            path.states.push_back(n);
        }
        if (n >= n_max) {
            if (tail < 0.0) tail = remaining_passage_bound(spec, n_max);
            if (tail < 1e-6 * t_max) {
                path.outcome = Outcome::Exploded;
                path.outcome_time = t + tail;
                return path;
            }
        }
    }
    if (!record_path) {
        path.jump_times.push_back(t);
        path.states.push_back(n);
    }
    path.outcome = Outcome::AliveAt;
    path.outcome_time = t_max;
    return path;
}

std::string to_string(Series s) { return s == Series::Exit ? "exit" : "entrance"; }

namespace {

struct SeriesPass {
    double log_value = -kInf;
    double last_ratio = 0.0;
};

SeriesPass series_pass(const BDChainSpec& spec, long m, Series series) {
    std::vector<double> log_pi(static_cast<std::size_t>(m) + 1, -kInf);
    log_pi[1] = 0.0;
    for (long n = 1; n < m; ++n) log_pi[n + 1] = log_pi[n] + spec.log_birth(n) - spec.log_death(n + 1);

    // inner[n] = log of sum_{i <= n} pi_i (Exit) or sum_{n < i <= m} pi_i (Entrance).
    std::vector<double> inner(static_cast<std::size_t>(m) + 1, -kInf);
    if (series == Series::Exit) {
        double acc = -kInf;
        for (long n = 1; n <= m; ++n) inner[n] = acc = log_add(acc, log_pi[n]);
    } else {
        double acc = -kInf;
        for (long n = m; n >= 1; --n) {
            inner[n] = acc;
            acc = log_add(acc, log_pi[n]);
        }
    }

    SeriesPass out;
    double prev = -kInf, last = -kInf;
    for (long n = 1; n <= m; ++n) {
        const double lt = inner[n] == -kInf ? -kInf : inner[n] - spec.log_birth(n) - log_pi[n];
        out.log_value = log_add(out.log_value, lt);
        if (lt != -kInf) {
            prev = last;
            last = lt;
        }
    }
    out.last_ratio = (prev == -kInf || last == -kInf) ? 0.0 : std::exp(last - prev);
    return out;
}

}  // namespace

CriterionResult explosion_criterion(const BDChainSpec& spec, long n_terms, Series series) {
    if (n_terms < 10) throw std::invalid_argument("explosion_criterion: n_terms must be >= 10");
    const SeriesPass full = series_pass(spec, n_terms, series);
    const SeriesPass half = series_pass(spec, n_terms / 2, series);

    CriterionResult r;
    r.series = series;
    r.n_terms = n_terms;
    r.log_value = full.log_value;
    r.value = std::exp(full.log_value);
    r.last_term_ratio = full.last_ratio;
    if (std::isfinite(full.log_value) && std::isfinite(half.log_value))
        r.relative_increment = -std::expm1(half.log_value - full.log_value);
    else
        r.relative_increment = 1.0;
    r.converged = std::isfinite(r.value) && r.relative_increment < 1e-10;
    return r;
}

namespace {

constexpr std::uint64_t kChainBlock = 256;

template <class Acc, class Visit>
std::vector<Acc> chain_blocks(const BDChainSpec& spec, double t, std::uint64_t n_paths, std::uint64_t seed,
                              long n_max, unsigned threads, Visit visit) {
    const std::size_t n_blocks = static_cast<std::size_t>((n_paths + kChainBlock - 1) / kChainBlock);
    return map_blocks<Acc>(
        n_blocks,
        [&](std::size_t b) {
            Acc acc{};
            const std::uint64_t end = std::min<std::uint64_t>(n_paths, (b + 1) * kChainBlock);
            for (std::uint64_t p = b * kChainBlock; p < end; ++p)
                visit(acc, simulate_chain(spec, t, n_max, derive_seed(seed, p), false));
            return acc;
        },
        threads);
}

}  // namespace

DishonestyEstimate dishonesty_probability(const BDChainSpec& spec, double t, std::uint64_t n_paths,
                                          std::uint64_t seed, long n_max, unsigned threads) {
    if (n_paths < 1) throw std::invalid_argument("dishonesty_probability: n_paths must be >= 1");
    struct Counts {
        std::uint64_t killed = 0, exploded = 0, alive = 0;
    };
    const auto blocks = chain_blocks<Counts>(spec, t, n_paths, seed, n_max, threads, [](Counts& c, const ChainPath& p) {
        switch (p.outcome) {
            case Outcome::Killed: ++c.killed; break;
            case Outcome::Exploded: ++c.exploded; break;
            case Outcome::AliveAt: ++c.alive; break;
        }
    });

    DishonestyEstimate e;
    e.t = t;
    e.n_paths = n_paths;
    for (const auto& c : blocks) {
        e.killed += c.killed;
        e.exploded += c.exploded;
        e.alive += c.alive;
    }
    const std::uint64_t lost = e.killed + e.exploded;
    e.estimate = static_cast<double>(lost) / static_cast<double>(n_paths);
    e.ci = wilson_interval(lost, n_paths, kZ99);
    e.killed_ci = wilson_interval(e.killed, n_paths, kZ99);
    e.exploded_ci = wilson_interval(e.exploded, n_paths, kZ99);
    return e;
}

std::vector<std::uint64_t> occupation_counts(const BDChainSpec& spec, double t, std::uint64_t n_paths,
                                             std::uint64_t seed, long max_state, long n_max, unsigned threads) {
    if (max_state < 1) throw std::invalid_argument("occupation_counts: max_state must be >= 1");
    const std::size_t width = static_cast<std::size_t>(max_state) + 1;
    const auto blocks = chain_blocks<std::vector<std::uint64_t>>(
        spec, t, n_paths, seed, n_max, threads, [width](std::vector<std::uint64_t>& c, const ChainPath& p) {
            if (c.empty()) c.assign(width, 0);
            const long s = p.outcome == Outcome::AliveAt ? p.states.back() : 0;
            ++c[s >= 1 && static_cast<std::size_t>(s) < width ? static_cast<std::size_t>(s) : 0];
        });
    std::vector<std::uint64_t> out(width, 0);
    for (const auto& c : blocks)
        for (std::size_t i = 0; i < c.size(); ++i) out[i] += c[i];
    return out;
}

}  // namespace dyadic
