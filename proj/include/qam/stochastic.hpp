// stochastic.hpp — Load random walk and renewal clock: Monte Carlo and closed forms

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "parallel.hpp"
#include "thermo.hpp"

namespace qam {

// ---------------------------------------------------------------------------
// Random numbers

/// SplitMix64 finaliser; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of substream `stream` derived from `master`.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with portable uniform and exponential variates.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    Rng split(std::uint64_t stream) const { return Rng(split_seed(seed_, stream)); }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Walk parameters

/// Birth-death rates of the load ladder. levels == 0 means unbounded.
struct WalkParams {
    double up = 1.0;
    double down = 1.0;
    long levels = 0;
    double spacing = 1.0;

    void validate() const {
        if (!(up > 0.0) || !(down >= 0.0) || !std::isfinite(up) || !std::isfinite(down))
            throw DomainError("WalkParams: rates must be positive and finite");
        if (levels != 0 && levels < 2) throw DomainError("WalkParams: a bounded ladder needs at least 2 levels");
    }

    double drift() const { return up - down; }
};

/// Rates after eliminating the two engine qubits:
/// up = Gamma p(0_c) p(1_h), down = Gamma p(1_c) p(0_h), so up/down = exp(-beta_v omega_w).
inline WalkParams walk_params_from_machine(double omega_c, double omega_h, double t_c, double t_h, double gamma_eff) {
    if (!(t_c > 0.0) || !(t_h > 0.0)) throw DomainError("walk_params_from_machine: temperatures must be positive");
    if (!(gamma_eff > 0.0)) throw DomainError("walk_params_from_machine: Gamma_eff must be positive");
    if (!(omega_c > 0.0) || !(omega_c < omega_h))
        throw DomainError("walk_params_from_machine: require 0 < omega_c < omega_h");
    auto excited = [](double omega, double t) { return 1.0 / (std::exp(omega / t) + 1.0); };
    auto ground = [](double omega, double t) { return 1.0 / (1.0 + std::exp(-omega / t)); };
    WalkParams p;
    p.up = gamma_eff * ground(omega_c, t_c) * excited(omega_h, t_h);
    p.down = gamma_eff * excited(omega_c, t_c) * ground(omega_h, t_h);
    p.spacing = omega_h - omega_c;
    return p;
}

/// beta_v omega_w = beta_h omega_h - beta_c omega_c for the engine's virtual qubit.
inline double engine_virtual_exponent(double omega_c, double omega_h, double t_c, double t_h) {
    return omega_h / t_h - omega_c / t_c;
}

// ---------------------------------------------------------------------------
// Walk Monte Carlo

struct WalkOptions {
    std::vector<double> observation_times; // strictly increasing, > 0
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t keep_paths = 0; // number of sample paths returned in full
};

struct WalkSnapshot {
    double time = 0.0;
    std::vector<std::uint64_t> histogram; // counts per level
    double mean = 0.0;
    double variance = 0.0;     // unbiased sample variance
    double se_mean = 0.0;
    double se_variance = 0.0;

    std::vector<double> distribution() const {
        double total = 0.0;
        for (auto c : histogram) total += static_cast<double>(c);
        std::vector<double> p(histogram.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(histogram[i]) / total;
        return p;
    }
};

struct PathJump {
    double time;
    long level;
};

struct WalkResult {
    std::vector<WalkSnapshot> snapshots;
    std::vector<std::vector<PathJump>> paths;
    std::uint64_t seed = 0;
};

namespace detail {

// Sample moments from an integer histogram; sums are exact so the result does not depend on path order.
inline void fill_moments(WalkSnapshot& s) {
    double n = 0.0, m1 = 0.0;
    for (std::size_t k = 0; k < s.histogram.size(); ++k) {
        n += static_cast<double>(s.histogram[k]);
        m1 += static_cast<double>(s.histogram[k]) * static_cast<double>(k);
    }
    s.mean = m1 / n;
    double c2 = 0.0, c4 = 0.0;
    for (std::size_t k = 0; k < s.histogram.size(); ++k) {
        const double x = static_cast<double>(k) - s.mean;
        const double w = static_cast<double>(s.histogram[k]);
        c2 += w * x * x;
        c4 += w * x * x * x * x;
    }
    s.variance = n > 1 ? c2 / (n - 1) : 0.0;
    const double mu2 = c2 / n, mu4 = c4 / n;
    s.se_mean = std::sqrt(s.variance / n);
    s.se_variance = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
}

inline constexpr std::size_t kPathsPerBlock = 4096;

} // namespace detail

/// Continuous-time jump simulation with reflection at 0 (and at levels-1 when bounded).
inline WalkResult simulate_walk(const WalkParams& p, const WalkOptions& opt) {
    p.validate();
    if (opt.observation_times.empty()) throw DomainError("simulate_walk: no observation times");
    for (std::size_t i = 0; i < opt.observation_times.size(); ++i)
        if (!(opt.observation_times[i] > (i ? opt.observation_times[i - 1] : 0.0)))
            throw DomainError("simulate_walk: observation times must be positive and increasing");
    if (opt.n_paths == 0) throw DomainError("simulate_walk: n_paths must be positive");

    const std::size_t n_obs = opt.observation_times.size();
    const std::size_t blocks = (opt.n_paths + detail::kPathsPerBlock - 1) / detail::kPathsPerBlock;
    std::vector<std::vector<std::vector<std::uint64_t>>> block_hist(blocks,
                                                                    std::vector<std::vector<std::uint64_t>>(n_obs));
    const std::size_t kept = std::min(opt.keep_paths, opt.n_paths);
    std::vector<std::vector<PathJump>> paths(kept);
    const long top = p.levels == 0 ? -1 : p.levels - 1;

    parallel_for(blocks, opt.threads, [&](std::size_t b) {
        Rng rng(split_seed(opt.seed, b));
        const std::size_t first = b * detail::kPathsPerBlock;
        const std::size_t last = std::min(opt.n_paths, first + detail::kPathsPerBlock);
        auto& hist = block_hist[b];
        for (std::size_t path = first; path < last; ++path) {
            const bool keep = path < kept;
            long n = 0;
            double t = 0.0;
            if (keep) paths[path].push_back({0.0, 0});
            for (std::size_t k = 0; k < n_obs; ++k) {
                const double t_obs = opt.observation_times[k];
                for (;;) {
                    const double up = (n == top) ? 0.0 : p.up;
                    const double down = (n == 0) ? 0.0 : p.down;
                    const double total = up + down;
                    const double dt = rng.exponential(total);
                    if (t + dt > t_obs) {
                        t = t_obs; // memoryless: the residual wait is redrawn
                        break;
                    }
                    t += dt;
                    n += (rng.uniform() * total < up) ? 1 : -1;
                    if (keep) paths[path].push_back({t, n});
                }
                auto& h = hist[k];
                if (h.size() <= static_cast<std::size_t>(n)) h.resize(static_cast<std::size_t>(n) + 1, 0);
                ++h[static_cast<std::size_t>(n)];
            }
        }
    });

    WalkResult r;
    r.seed = opt.seed;
    r.paths = std::move(paths);
    for (std::size_t k = 0; k < n_obs; ++k) {
        WalkSnapshot s;
        s.time = opt.observation_times[k];
        for (const auto& bh : block_hist) {
            if (s.histogram.size() < bh[k].size()) s.histogram.resize(bh[k].size(), 0);
            for (std::size_t i = 0; i < bh[k].size(); ++i) s.histogram[i] += bh[k][i];
        }
        detail::fill_moments(s);
        r.snapshots.push_back(std::move(s));
    }
    return r;
}

struct GaussianAsymptotics {
    double mean = 0.0;
    double variance = 0.0;
    bool valid = false; // mean well separated from the reflecting wall
};

/// n(t) = (up - down) t, sigma^2 = (up + down) t; valid once n > 5 sigma.
inline GaussianAsymptotics gaussian_asymptotics(const WalkParams& p, double t) {
    if (!(t > 0.0)) throw DomainError("gaussian_asymptotics: t must be positive");
    GaussianAsymptotics g;
    g.mean = (p.up - p.down) * t;
    g.variance = (p.up + p.down) * t;
    g.valid = g.mean > 5.0 * std::sqrt(g.variance);
    return g;
}

/// R = 1 - omega_c / omega_h, energy stored per unit hot heat.
inline double engine_energy_ratio(double omega_c, double omega_h) {
    if (!(omega_c > 0.0) || !(omega_c < omega_h)) throw DomainError("engine_energy_ratio: require 0 < omega_c < omega_h");
    return 1.0 - omega_c / omega_h;
}

/// eta_N = [1 - sqrt(2 coth(-x/2) / (pi N))] R with x = beta_v omega_w < 0.
///
/// x = -inf is accepted (coth -> 1).
inline double n_cycle_efficiency(double cycles, double beta_v_omega_w, double ratio) {
    if (!(cycles >= 1.0)) throw DomainError("n_cycle_efficiency: N must be at least 1");
    if (!(beta_v_omega_w < 0.0)) throw DomainError("n_cycle_efficiency: requires beta_v omega_w < 0 (engine regime)");
    const double a = -beta_v_omega_w / 2.0;
    const double coth = std::isinf(a) ? 1.0 : 1.0 / std::tanh(a);
    return (1.0 - std::sqrt(2.0 * coth / (std::numbers::pi * cycles))) * ratio;
}

struct NCycleEstimate {
    double efficiency = 0.0;
    double ergotropy_before = 0.0; // in units of the spacing
    double ergotropy_after = 0.0;
    double t_before = 0.0;
    double t_after = 0.0;
};

/// Monte Carlo estimate of (dW/dt) / J_h around the time of N net cycles, by a
/// central difference over +-window cycles of the ensemble ergotropy.
inline NCycleEstimate monte_carlo_n_cycle_efficiency(const WalkParams& p, double omega_h, double cycles,
                                                     double window, std::size_t n_paths, std::uint64_t seed,
                                                     unsigned threads = 1) {
    if (!(p.up > p.down)) throw DomainError("monte_carlo_n_cycle_efficiency: requires up > down");
    if (!(window > 0.0) || !(window < cycles)) throw DomainError("monte_carlo_n_cycle_efficiency: bad window");
    const double v = p.up - p.down;
    WalkOptions opt;
    opt.observation_times = {(cycles - window) / v, (cycles + window) / v};
    opt.n_paths = n_paths;
    opt.seed = seed;
    opt.threads = threads;
    const WalkResult r = simulate_walk(p, opt);
    NCycleEstimate e;
    e.t_before = opt.observation_times[0];
    e.t_after = opt.observation_times[1];
    const auto pa = r.snapshots[0].distribution();
    const auto pb = r.snapshots[1].distribution();
    e.ergotropy_before = diagonal_ergotropy(pa, 1.0);
    e.ergotropy_after = diagonal_ergotropy(pb, 1.0);
    const double power = p.spacing * (e.ergotropy_after - e.ergotropy_before) / (e.t_after - e.t_before);
    e.efficiency = power / (omega_h * v);
    return e;
}

// ---------------------------------------------------------------------------
// Clock

struct ClockThermo {
    double q_h = 0.0;
    double q_c = 0.0;
    double entropy_per_tick = 0.0;
};

/// Q_h = (d-1) omega_h, Q_c = (d-1) omega_c, Delta S = Q_c / T_c - Q_h / T_h.
inline ClockThermo clock_thermo(long d, double omega_c, double omega_h, double t_c, double t_h) {
    if (d < 2) throw DomainError("clock_thermo: d must be at least 2");
    if (!(t_c > 0.0) || !(t_h > 0.0)) throw DomainError("clock_thermo: temperatures must be positive");
    if (!(omega_c > 0.0) || !(omega_h > 0.0)) throw DomainError("clock_thermo: frequencies must be positive");
    ClockThermo c;
    c.q_h = static_cast<double>(d - 1) * omega_h;
    c.q_c = static_cast<double>(d - 1) * omega_c;
    c.entropy_per_tick = c.q_c / t_c - c.q_h / t_h;
    return c;
}

/// N = d tanh(Delta S / 2d)
inline double clock_accuracy_formula(long d, double entropy_per_tick) {
    if (d < 2) throw DomainError("clock_accuracy_formula: d must be at least 2");
    if (!(entropy_per_tick > 0.0)) throw DomainError("clock_accuracy_formula: entropy per tick must be positive");
    const double dd = static_cast<double>(d);
    return dd * std::tanh(entropy_per_tick / (2.0 * dd));
}

/// nu = (up - down) / d
inline double clock_resolution_formula(long d, const WalkParams& p) {
    if (d < 2) throw DomainError("clock_resolution_formula: d must be at least 2");
    if (!(p.up > p.down)) throw DomainError("clock_resolution_formula: requires up > down");
    return (p.up - p.down) / static_cast<double>(d);
}

struct FirstPassageMoments {
    double mean = 0.0;
    double variance = 0.0;

    double accuracy() const { return mean * mean / variance; }
};

/// Exact mean and variance of the first passage 0 -> d-1 with reflection at 0.
///
/// The passage is a sum of independent level-crossing times T_n (n -> n+1).
/// T_0 ~ Exp(up); T_n is a geometric number G of failed attempts, each a
/// holding time plus a return T_{n-1}, followed by a final holding time.
inline FirstPassageMoments first_passage_moments(const WalkParams& p, long d) {
    p.validate();
    if (d < 2) throw DomainError("first_passage_moments: d must be at least 2");
    const double u = p.up, w = p.down, lambda = u + w;
    const double eg = w / u;                 // E[G]
    const double vg = w * lambda / (u * u);  // Var[G]
    double m = 1.0 / u, v = 1.0 / (u * u);
    FirstPassageMoments out{m, v};
    for (long n = 1; n < d - 1; ++n) {
        const double mn = (1.0 + w * m) / u;
        const double vn = (eg + 1.0) / (lambda * lambda) + eg * v + (1.0 / lambda + m) * (1.0 / lambda + m) * vg;
        m = mn;
        v = vn;
        out.mean += m;
        out.variance += v;
    }
    return out;
}

struct ClockOptions {
    std::size_t n_ticks = 10000;
    std::uint64_t seed = 1;
    double decay_rate = 0.0;   // > 0 adds an Exp(decay_rate) dwell at the top level
    double time_limit = 1e12;  // total simulated time budget
    bool keep_tick_times = true;
};

struct TickRecord {
    std::vector<double> tick_times;
    std::vector<double> waiting_times;
    double t_tick = 0.0;
    double dt_tick = 0.0;
    double nu_tick = 0.0;
    double accuracy = 0.0;
    double se_t_tick = 0.0;
    std::uint64_t seed = 0;
    bool truncated = false; // time limit hit before n_ticks
};

/// Renewal clock: repeated first passages 0 -> d-1 with instantaneous reset.
inline TickRecord simulate_clock(const WalkParams& p, const ClockOptions& opt) {
    p.validate();
    if (p.levels < 3) throw DomainError("simulate_clock: requires a finite ladder with d >= 3");
    if (opt.n_ticks < 2) throw DomainError("simulate_clock: n_ticks must be at least 2");
    if (opt.decay_rate < 0.0) throw DomainError("simulate_clock: decay rate must be non-negative");
    Rng rng(opt.seed);
    TickRecord r;
    r.seed = opt.seed;
    const long target = p.levels - 1;
    double t = 0.0;
    r.waiting_times.reserve(opt.n_ticks);
    while (r.waiting_times.size() < opt.n_ticks) {
        const double start = t;
        long n = 0;
        while (n < target) {
            const double down = n == 0 ? 0.0 : p.down;
            const double total = p.up + down;
            t += rng.exponential(total);
            n += (rng.uniform() * total < p.up) ? 1 : -1;
            if (t > opt.time_limit) break;
        }
        if (t > opt.time_limit) {
            r.truncated = true;
            break;
        }
        if (opt.decay_rate > 0.0) t += rng.exponential(opt.decay_rate);
        r.waiting_times.push_back(t - start);
        if (opt.keep_tick_times) r.tick_times.push_back(t);
    }
    const std::size_t n = r.waiting_times.size();
    if (n >= 2) {
        double mean = 0.0;
        for (double w : r.waiting_times) mean += w;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double w : r.waiting_times) ss += (w - mean) * (w - mean);
        const double var = ss / static_cast<double>(n - 1);
        r.t_tick = mean;
        r.dt_tick = std::sqrt(var);
        r.nu_tick = 1.0 / mean;
        r.accuracy = mean * mean / var;
        r.se_t_tick = std::sqrt(var / static_cast<double>(n));
    }
    return r;
}

/// Lag-1 sample autocorrelation.
inline double lag1_autocorrelation(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 3) throw DomainError("lag1_autocorrelation: need at least 3 samples");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        den += (x[i] - mean) * (x[i] - mean);
        if (i + 1 < n) num += (x[i] - mean) * (x[i + 1] - mean);
    }
    return num / den;
}

} // namespace qam
