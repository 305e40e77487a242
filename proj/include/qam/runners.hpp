// runners.hpp — Config-driven runs: steady report, fridge sweep, transient, engine, clock scans

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "csv.hpp"
#include "dissipation.hpp"
#include "dynamics.hpp"
#include "models.hpp"
#include "parallel.hpp"
#include "stochastic.hpp"
#include "thermo.hpp"

namespace qam {

struct RunOutput {
    CsvTable table;          // empty for steady runs
    nlohmann::json summary;
    bool laws_ok = true;
};

inline constexpr double kFirstLawRelTol = 1e-10;
inline constexpr double kSecondLawTol = 1e-12;

// ---------------------------------------------------------------------------
// shared helpers

inline MachineModel build_machine(const MachineConfig& m, double omega_c, double omega_h) {
    switch (m.type) {
    case MachineType::three_level: return build_three_level(omega_c, omega_h);
    case MachineType::three_qubit: return build_three_qubit(omega_c, omega_h, m.g);
    case MachineType::three_oscillator: return build_three_oscillator(omega_c, omega_h, m.g, m.n_max);
    case MachineType::engine:
    case MachineType::clock: return build_engine(omega_c, omega_h, m.d, m.g);
    }
    throw DomainError("build_machine: unknown machine type");
}

inline std::vector<BathSpec> bath_specs(const RunConfig& cfg, double omega_h) {
    std::vector<BathSpec> out;
    for (const auto& b : cfg.baths) out.push_back(b.spec(omega_h));
    return out;
}

inline bool first_law_holds(const SteadyStateReport& r, double extra = 0.0) {
    return std::abs(r.current_sum() + extra) <= kFirstLawRelTol * std::max(r.max_abs_current(), std::abs(extra));
}

inline bool second_law_holds(const SteadyStateReport& r) { return r.entropy_rate >= -kSecondLawTol; }

inline nlohmann::json temperature_json(const Temperature& t) {
    if (t.is_finite()) return t.value();
    return to_string(t);
}

/// Linear interpolation of y at x on rows sorted by x.
inline double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.empty()) return std::nan("");
    if (x <= xs.front()) return ys.front();
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (x <= xs[i]) {
            const double f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return ys[i - 1] + f * (ys[i] - ys[i - 1]);
        }
    }
    return ys.back();
}

/// Relative change of `metric` over the last 20% of the `power` range.
inline double saturation_change(std::vector<double> power, std::vector<double> metric) {
    std::vector<std::size_t> order(power.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return power[a] < power[b]; });
    std::vector<double> xs, ys;
    for (auto i : order) {
        xs.push_back(power[i]);
        ys.push_back(metric[i]);
    }
    if (xs.size() < 2) return std::nan("");
    const double p80 = xs.front() + 0.8 * (xs.back() - xs.front());
    const double end = ys.back();
    return std::abs(end - interpolate(xs, ys, p80)) / std::abs(end);
}

/// Root of f on [lo, hi] by grid search for the first sign change, then bisection.
inline std::optional<double> find_root(const std::function<double(double)>& f, double lo, double hi,
                                       int grid = 400) {
    double a = lo, fa = f(lo);
    if (fa == 0.0) return lo;
    for (int i = 1; i <= grid; ++i) {
        double b = lo + (hi - lo) * static_cast<double>(i) / grid;
        const double fb = f(b);
        if (fb == 0.0) return b;
        if ((fa < 0.0) != (fb < 0.0)) {
            for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        a = b;
        fa = fb;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// steady

/// One steady-state report as JSON with law flags.
inline RunOutput run_steady(const RunConfig& cfg) {
    const auto& mc = cfg.machine;
    const MachineModel machine = build_machine(mc, mc.omega_c, mc.omega_h);
    const auto baths = bath_specs(cfg, mc.omega_h);
    Liouvillian l = machine_liouvillian(machine, baths, cfg.dissipation);

    std::optional<Dissipator> decay;
    if (mc.type == MachineType::clock) {
        const double rate = cfg.run.clock ? cfg.run.clock->decay_rate : 0.0;
        if (!(rate > 0.0)) throw ConfigError("/run/clock/decay_rate", "a clock steady state needs a positive decay rate");
        const Index top = mc.d - 1;
        Dissipator d;
        d.bath = BathSpec{'w', 1.0, rate, 1, 1.0};
        d.terms.push_back({ops::embed(ops::outer(mc.d, 0, top), machine.dims, 2), rate, 0.0});
        l.matrix += dissipator_superoperator(d, machine.dim());
        decay = d;
    }

    const SteadyStateReport r = steady_state(l);
    nlohmann::json j;
    j["machine"] = to_string(mc.type);
    j["dissipation"] = to_string(cfg.dissipation);
    j["residual"] = r.residual;
    j["rcond"] = r.rcond;
    j["entropy_rate"] = r.entropy_rate;
    for (const auto& c : r.currents) j["currents"][std::string(1, c.label)] = c.value;

    double photon_power = 0.0;
    if (decay) {
        photon_power = -heat_current(l.current_hamiltonian, *decay, r.rho); // energy carried away per unit time
        const ComplexMatrix top = ops::embed(ops::outer(mc.d, mc.d - 1, mc.d - 1), machine.dims, 2);
        j["tick_rate"] = decay->terms[0].rate * expectation(top, r.rho);
        j["photon_power"] = photon_power;
    }

    auto temp = [&](char label) { return cfg.bath(label).temperature; };
    const bool fridge = mc.type == MachineType::three_level || mc.type == MachineType::three_qubit ||
                        mc.type == MachineType::three_oscillator;
    if (fridge) {
        if (machine.has_channel('c') && cfg.has_bath('c') && cfg.has_bath('w')) {
            const double jw = r.current('w');
            j["cop"] = jw != 0.0 ? nlohmann::json(r.current('c') / jw) : nlohmann::json(nullptr);
        }
        if (cfg.has_bath('h') && cfg.has_bath('w')) {
            const double omega_w = mc.omega_h - mc.omega_c;
            j["virtual_temperature"] =
                temperature_json(virtual_temperature(mc.omega_h, omega_w, 1.0 / temp('h'), 1.0 / temp('w')));
            if (mc.g > 0.0 && mc.type != MachineType::three_level) {
                const auto [plus, minus] =
                    split_virtual_temperatures(mc.omega_c, omega_w, mc.omega_h, mc.g, 1.0 / temp('h'), 1.0 / temp('w'));
                j["virtual_temperature_split"] = {temperature_json(plus), temperature_json(minus)};
            }
            if (cfg.has_bath('c') && temp('c') < temp('h') && temp('h') <= temp('w')) {
                j["cooling_window"] = cooling_window(temp('c'), temp('h'), temp('w'));
                j["carnot_cop"] = carnot_cop(temp('c'), temp('h'), temp('w'));
            }
        }
        if (machine.topology == Topology::fridge) j["internal_current"] = internal_current(machine, r.rho);
    } else {
        j["R"] = engine_energy_ratio(mc.omega_c, mc.omega_h);
        if (cfg.has_bath('c') && cfg.has_bath('h')) {
            j["virtual_temperature"] =
                temperature_json(virtual_temperature(mc.omega_h, mc.omega_c, 1.0 / temp('h'), 1.0 / temp('c')));
            j["beta_v_omega_w"] = engine_virtual_exponent(mc.omega_c, mc.omega_h, temp('c'), temp('h'));
        }
        const DensityMatrix load = partial_trace(r.rho, std::span<const Index>(machine.dims), 2);
        std::vector<double> pops;
        for (Index n = 0; n < load.dim(); ++n) pops.push_back(load.population(n));
        j["load_populations"] = pops;
    }

    const bool first = first_law_holds(r, -photon_power);
    const bool second = second_law_holds(r);
    j["first_law"] = first;
    j["second_law"] = second;
    RunOutput out;
    out.summary = j;
    out.laws_ok = first && second;
    return out;
}

// ---------------------------------------------------------------------------
// fridge sweep

struct FridgePoint {
    double omega_c = 0, omega_h = 0, omega_w = 0;
    double j_c = 0, j_h = 0, j_w = 0;
    double cop = 0, sigma = 0, k = 0, residual = 0;
    bool first_law = true, second_law = true;
};

inline FridgePoint evaluate_fridge(const RunConfig& cfg, double omega_c, double omega_h) {
    const MachineModel machine = build_machine(cfg.machine, omega_c, omega_h);
    const auto baths = bath_specs(cfg, omega_h);
    const SteadyStateReport r = steady_state(machine_liouvillian(machine, baths, cfg.dissipation));
    FridgePoint p;
    p.omega_c = omega_c;
    p.omega_h = omega_h;
    p.omega_w = omega_h - omega_c;
    p.j_c = r.current('c');
    p.j_h = r.current('h');
    p.j_w = r.current('w');
    p.cop = p.j_w != 0.0 ? p.j_c / p.j_w : std::nan("");
    p.sigma = r.entropy_rate;
    p.k = machine.topology == Topology::fridge ? internal_current(machine, r.rho) : std::nan("");
    p.residual = r.residual;
    p.first_law = first_law_holds(r);
    p.second_law = second_law_holds(r);
    return p;
}

inline RunOutput run_fridge_sweep(const RunConfig& cfg, unsigned threads = 1) {
    const auto& s = *cfg.run.sweep;
    const auto grid = s.grid();
    const double omega_w0 = cfg.machine.omega_h - cfg.machine.omega_c;
    std::vector<FridgePoint> pts(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const double wc = grid[i];
        const double wh = s.hold == "omega_w" ? wc + omega_w0 : cfg.machine.omega_h;
        if (!(wc > 0.0) || !(wc < wh))
            throw ConfigError("/run/sweep", "sweep point omega_c = " + format_double(wc) + " is outside (0, omega_h)");
        pts[i] = evaluate_fridge(cfg, wc, wh);
    });

    double max_jc = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].j_c > max_jc) {
            max_jc = pts[i].j_c;
            imax = i;
        }

    RunOutput out;
    out.table.columns = {"omega_c", "omega_h", "omega_w", "J_c",         "J_h",  "J_w",     "cop",
                         "entropy_rate", "power_norm", "cooling", "internal_current", "residual"};
    bool first = true, second = true;
    double max_cop = -std::numeric_limits<double>::infinity();
    std::optional<std::size_t> first_cool, last_cool, first_after;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const bool cooling = p.j_c > 0.0;
        const double pn = (cooling && max_jc > 0.0) ? (i == imax ? 1.0 : p.j_c / max_jc) : 0.0;
        out.table.rows.push_back({p.omega_c, p.omega_h, p.omega_w, p.j_c, p.j_h, p.j_w, p.cop, p.sigma, pn,
                                  long{cooling ? 1 : 0}, p.k, p.residual});
        first = first && p.first_law;
        second = second && p.second_law;
        if (cooling) {
            if (!first_cool) first_cool = i;
            last_cool = i;
            max_cop = std::max(max_cop, p.cop);
        } else if (last_cool && !first_after && *last_cool + 1 == i) {
            first_after = i;
        }
    }

    nlohmann::json j;
    j["rows"] = pts.size();
    j["first_law"] = first;
    j["second_law"] = second;
    const double tc = cfg.bath('c').temperature, th = cfg.bath('h').temperature, tw = cfg.bath('w').temperature;
    if (tc < th && th <= tw) {
        const double ec = carnot_cop(tc, th, tw);
        const int dim = cfg.bath('c').dimensionality;
        j["carnot_cop"] = ec;
        j["cooling_window"] = cooling_window(tc, th, tw);
        j["bound_cop_at_max_power"] = static_cast<double>(dim) / (dim + 1.0) * ec;
        if (max_jc > 0.0) {
            const auto& p = pts[imax];
            j["max_power"] = {{"omega_c", p.omega_c}, {"J_c", p.j_c}, {"cop", p.cop}};
            j["eps_star"] = p.cop;
            j["eps_star_over_carnot"] = p.cop / ec;
            j["max_cop"] = max_cop;
            j["max_cop_over_carnot"] = max_cop / ec;
            j["power_norm_at_branch_ends"] = {pts[*first_cool].j_c / max_jc, pts[*last_cool].j_c / max_jc};
            j["last_cooling_omega_c"] = pts[*last_cool].omega_c;
            j["last_cooling_cop"] = pts[*last_cool].cop;
            if (first_after) j["first_heating_omega_c"] = pts[*first_after].omega_c;
        }
    }
    out.summary = j;
    out.laws_ok = first && second;
    return out;
}

// ---------------------------------------------------------------------------
// transient

/// Product of local Gibbs states with optional coherence -i a |010><101| + h.c., a clipped to stay PSD.
inline DensityMatrix fridge_initial_state(const MachineModel& machine, const std::vector<BathSpec>& baths,
                                          double amplitude, double* used = nullptr) {
    ComplexMatrix rho = ComplexMatrix::Identity(1, 1);
    for (const auto& s : machine.subsystems) {
        const BathSpec* b = nullptr;
        for (const auto& x : baths)
            if (x.label == s.label) b = &x;
        if (!b) throw DomainError(std::string("fridge_initial_state: no bath for subsystem ") + s.label);
        ComplexMatrix h = ComplexMatrix::Zero(s.levels, s.levels);
        for (Index n = 0; n < s.levels; ++n) h(n, n) = s.omega * static_cast<double>(n);
        rho = kron(rho, DensityMatrix::gibbs(HermitianOperator(h), b->temperature).matrix());
    }
    const Index a = 0b010, c = 0b101;
    double amp = 0.0;
    if (amplitude > 0.0) {
        if (machine.dim() != 8) throw DomainError("fridge_initial_state: coherence needs the three-qubit machine");
        amp = std::min(amplitude, std::sqrt(rho(a, a).real() * rho(c, c).real()));
        rho(a, c) = -kI * amp;
        rho(c, a) = kI * amp;
    }
    if (used) *used = amp;
    return DensityMatrix(rho, 1e-10);
}

inline RunOutput run_transient(const RunConfig& cfg) {
    const auto& mc = cfg.machine;
    const MachineModel machine = build_machine(mc, mc.omega_c, mc.omega_h);
    const auto baths = bath_specs(cfg, mc.omega_h);
    const Liouvillian l = machine_liouvillian(machine, baths, cfg.dissipation);
    const auto times = cfg.run.time->grid();
    const SteadyStateReport ss = steady_state(l);
    const DensityMatrix cold_ss = partial_trace(ss.rho, std::span<const Index>(machine.dims), 0);
    const Temperature t_inf = effective_temperature(mc.omega_c, cold_ss.population(0), cold_ss.population(1));

    RunOutput out;
    out.table.columns = {"coherence", "t", "T_eff", "p0", "p1"};
    nlohmann::json curves = nlohmann::json::array();
    for (double amplitude : cfg.run.coherence) {
        double used = 0.0;
        const DensityMatrix rho0 = fridge_initial_state(machine, baths, amplitude, &used);
        const Trajectory tr = evolve(rho0, l, times);
        std::vector<double> teff;
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            const DensityMatrix cold = partial_trace(tr.states[i], std::span<const Index>(machine.dims), 0);
            const double p0 = cold.population(0), p1 = cold.population(1);
            const Temperature t = effective_temperature(mc.omega_c, p0, p1);
            teff.push_back(t.value());
            CsvCell tcell = t.is_finite() ? CsvCell{t.value()} : CsvCell{to_string(t)};
            out.table.rows.push_back({used, tr.times[i], tcell, p0, p1});
        }
        std::size_t imin = 0;
        for (std::size_t i = 1; i < teff.size(); ++i)
            if (teff[i] < teff[imin]) imin = i;
        std::optional<std::size_t> first_min;
        for (std::size_t i = 1; i + 1 < teff.size(); ++i)
            if (teff[i] < teff[i - 1] && teff[i] <= teff[i + 1]) {
                first_min = i;
                break;
            }
        bool monotone = true;
        for (std::size_t i = 1; i < teff.size(); ++i)
            if (teff[i] > teff[i - 1] + 1e-9 * std::abs(teff[i - 1])) monotone = false;
        nlohmann::json c;
        c["coherence_requested"] = amplitude;
        c["coherence_used"] = used;
        c["min_T_eff"] = teff[imin];
        c["t_min"] = tr.times[imin];
        c["first_min_T_eff"] = first_min ? nlohmann::json(teff[*first_min]) : nlohmann::json(nullptr);
        c["first_min_t"] = first_min ? nlohmann::json(tr.times[*first_min]) : nlohmann::json(nullptr);
        c["undershoot_relative"] = (t_inf.value() - teff[imin]) / t_inf.value();
        c["monotone_non_increasing"] = monotone;
        curves.push_back(c);
    }
    out.summary["T_eff_steady"] = temperature_json(t_inf);
    out.summary["curves"] = curves;
    out.summary["steady_first_law"] = first_law_holds(ss);
    out.summary["steady_second_law"] = second_law_holds(ss);
    out.laws_ok = first_law_holds(ss) && second_law_holds(ss);
    return out;
}

// ---------------------------------------------------------------------------
// engine

inline RunOutput run_engine(const RunConfig& cfg, unsigned threads = 1) {
    const double tc = cfg.bath('c').temperature, th = cfg.bath('h').temperature;
    const double wh = cfg.machine.omega_h;
    const auto grid = cfg.run.sweep->grid();
    const auto& cycles = cfg.run.cycles;

    struct Row {
        double ww, wc, r, x, up, down, power;
        bool engine;
    };
    std::vector<Row> rows;
    double max_power = 0.0;
    std::size_t imax = 0;
    for (double ww : grid) {
        if (!(ww > 0.0) || !(ww < wh))
            throw ConfigError("/run/sweep", "omega_w = " + format_double(ww) + " is outside (0, omega_h)");
        const double wc = wh - ww;
        const WalkParams p = walk_params_from_machine(wc, wh, tc, th, cfg.run.gamma_eff);
        const double x = engine_virtual_exponent(wc, wh, tc, th);
        const bool engine = x < 0.0;
        const double power = engine ? ww * (p.up - p.down) : 0.0;
        if (power > max_power) {
            max_power = power;
            imax = rows.size();
        }
        rows.push_back({ww, wc, engine_energy_ratio(wc, wh), x, p.up, p.down, power, engine});
    }

    RunOutput out;
    out.table.columns = {"omega_w", "omega_c", "R", "beta_v_omega_w", "engine", "gamma_up", "gamma_down",
                         "eta_inf", "power_norm"};
    for (double n : cycles) {
        out.table.columns.push_back("eta_N" + format_double(n));
        out.table.columns.push_back("power_norm_N" + format_double(n));
    }
    const double carnot = carnot_efficiency(tc, th);
    bool bounded = true, ordered = true, below_carnot = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        std::vector<CsvCell> row{r.ww, r.wc, r.r, r.x, long{r.engine ? 1 : 0}, r.up, r.down,
                                 r.engine ? r.r : std::nan(""),
                                 r.engine && max_power > 0.0 ? (i == imax ? 1.0 : r.power / max_power) : 0.0};
        double prev = -std::numeric_limits<double>::infinity();
        std::vector<double> etas;
        for (double n : cycles) {
            const double eta = r.engine ? n_cycle_efficiency(n, r.x, r.r) : std::nan("");
            etas.push_back(eta);
            row.push_back(eta);
            row.push_back(r.engine && max_power > 0.0 ? eta * wh * (r.up - r.down) / max_power : std::nan(""));
            if (r.engine) below_carnot = below_carnot && eta < carnot;
        }
        if (r.engine) {
            bounded = bounded && r.r <= carnot;
            std::vector<std::pair<double, double>> ne;
            for (std::size_t k = 0; k < cycles.size(); ++k) ne.push_back({cycles[k], etas[k]});
            std::sort(ne.begin(), ne.end());
            for (const auto& [n, eta] : ne) {
                if (!(eta > prev) && n != ne.front().first) ordered = false;
                prev = eta;
            }
        }
        out.table.rows.push_back(std::move(row));
    }

    nlohmann::json j;
    j["carnot_efficiency"] = carnot;
    j["eta_inf_bounded_by_carnot"] = bounded;
    j["eta_increasing_in_N"] = ordered;
    j["finite_N_below_carnot"] = below_carnot;
    j["max_power_omega_w"] = rows.empty() ? nlohmann::json(nullptr) : nlohmann::json(rows[imax].ww);

    const auto& mcfg = cfg.run.monte_carlo;
    if (mcfg.enabled && !mcfg.points.empty() && !cycles.empty()) {
        const double n = cycles.front();
        std::vector<nlohmann::json> checks(mcfg.points.size());
        parallel_for(mcfg.points.size(), threads, [&](std::size_t i) {
            const double ww = mcfg.points[i];
            const double wc = wh - ww;
            const WalkParams p = walk_params_from_machine(wc, wh, tc, th, cfg.run.gamma_eff);
            const double x = engine_virtual_exponent(wc, wh, tc, th);
            if (!(x < 0.0)) {
                checks[i] = {{"omega_w", ww}, {"engine", false}};
                return;
            }
            const double formula = n_cycle_efficiency(n, x, engine_energy_ratio(wc, wh));
            const auto est = monte_carlo_n_cycle_efficiency(p, wh, n, mcfg.window, static_cast<std::size_t>(mcfg.paths),
                                                            split_seed(cfg.seed, i), 1);
            checks[i] = {{"omega_w", ww},
                         {"engine", true},
                         {"cycles", n},
                         {"eta_formula", formula},
                         {"eta_monte_carlo", est.efficiency},
                         {"relative_difference", est.efficiency / formula - 1.0}};
        });
        j["monte_carlo"] = checks;
    }
    out.summary = j;
    out.laws_ok = bounded && below_carnot;
    return out;
}

// ---------------------------------------------------------------------------
// clock

struct ClockPoint {
    long d = 0;
    double omega_c = 0.0;
    WalkParams rates;
    double entropy_per_tick = 0.0;
    FirstPassageMoments exact;
    double power = 0.0; // Q_c per unit time
    bool feasible = true;
};

namespace detail {

inline WalkParams clock_rates(double omega_c, double omega_h, double tc, double th, double gamma, long d) {
    WalkParams p = walk_params_from_machine(omega_c, omega_h, tc, th, gamma);
    p.levels = d;
    return p;
}

// Exponential dwell at the top level before the tick is emitted; adds 1/decay to the mean, 1/decay^2 to the variance.
inline void add_decay_dwell(FirstPassageMoments& m, double decay) {
    if (decay > 0.0) {
        m.mean += 1.0 / decay;
        m.variance += 1.0 / (decay * decay);
    }
}

inline ClockPoint clock_point(long d, double omega_c, double omega_h, double tc, double th, double gamma,
                              double decay) {
    ClockPoint c;
    c.d = d;
    c.omega_c = omega_c;
    c.rates = clock_rates(omega_c, omega_h, tc, th, gamma, d);
    c.entropy_per_tick = clock_thermo(d, omega_c, omega_h, tc, th).entropy_per_tick;
    c.exact = first_passage_moments(c.rates, d);
    add_decay_dwell(c.exact, decay);
    c.power = static_cast<double>(d - 1) * omega_c / c.exact.mean;
    return c;
}

} // namespace detail

inline RunOutput run_clock(const RunConfig& cfg, unsigned threads = 1) {
    const auto& k = *cfg.run.clock;
    const double tc = cfg.bath('c').temperature, th = cfg.bath('h').temperature;
    const double wh = cfg.machine.omega_h;
    const double gamma = cfg.run.gamma_eff;
    const double lo = wh * tc / th, hi = wh;
    const double lo_in = lo + 1e-9 * (hi - lo), hi_in = hi - 1e-9 * (hi - lo);

    std::vector<ClockPoint> pts;
    switch (k.scan) {
    case ClockScan::fixed_power:
        for (long d : k.d_values) {
            auto f = [&](double wc) { return detail::clock_point(d, wc, wh, tc, th, gamma, k.decay_rate).power - k.target; };
            const auto root = find_root(f, lo_in, hi_in);
            ClockPoint p = root ? detail::clock_point(d, *root, wh, tc, th, gamma, k.decay_rate) : ClockPoint{};
            p.d = d;
            p.feasible = root.has_value();
            pts.push_back(p);
        }
        break;
    case ClockScan::fixed_resolution:
        for (double wc : k.omega_c_values) {
            if (!(wc > lo) || !(wc < hi))
                throw ConfigError("/run/clock/omega_c_values", "omega_c = " + format_double(wc) + " is not in the engine regime");
            // rescale the rate scale so that 1/t_tick equals the target
            const double walk_time = 1.0 / k.target - (k.decay_rate > 0.0 ? 1.0 / k.decay_rate : 0.0);
            if (!(walk_time > 0.0))
                throw ConfigError("/run/clock/target", "resolution target exceeds the decay rate");
            const ClockPoint unit = detail::clock_point(k.d, wc, wh, tc, th, 1.0, 0.0);
            pts.push_back(detail::clock_point(k.d, wc, wh, tc, th, unit.exact.mean / walk_time, k.decay_rate));
        }
        break;
    case ClockScan::fixed_accuracy:
        for (long d : k.d_values) {
            auto f = [&](double wc) { return detail::clock_point(d, wc, wh, tc, th, gamma, k.decay_rate).exact.accuracy() - k.target; };
            const auto root = find_root(f, lo_in, hi_in);
            ClockPoint p = root ? detail::clock_point(d, *root, wh, tc, th, gamma, k.decay_rate) : ClockPoint{};
            p.d = d;
            p.feasible = root.has_value();
            pts.push_back(p);
        }
        break;
    case ClockScan::d_sweep:
        for (long d : k.d_values) {
            ClockPoint p;
            if (k.rate_ratio) {
                p.d = d;
                p.omega_c = std::nan("");
                p.rates = WalkParams{gamma * *k.rate_ratio / (1.0 + *k.rate_ratio), gamma / (1.0 + *k.rate_ratio), d, 1.0};
                p.entropy_per_tick = static_cast<double>(d - 1) * std::log(*k.rate_ratio);
                p.exact = first_passage_moments(p.rates, d);
                detail::add_decay_dwell(p.exact, k.decay_rate);
                p.power = std::nan("");
            } else {
                p = detail::clock_point(d, cfg.machine.omega_c, wh, tc, th, gamma, k.decay_rate);
            }
            pts.push_back(p);
        }
        break;
    }

    // Monte Carlo columns, one independent stream per row
    const auto& mcfg = cfg.run.monte_carlo;
    constexpr double kEventBudget = 5e7;
    std::vector<std::optional<TickRecord>> mc(pts.size());
    if (mcfg.enabled) {
        parallel_for(pts.size(), threads, [&](std::size_t i) {
            const auto& p = pts[i];
            if (!p.feasible) return;
            const double events = static_cast<double>(mcfg.ticks) * p.exact.mean * (p.rates.up + p.rates.down);
            if (events > kEventBudget) return;
            ClockOptions o;
            o.n_ticks = static_cast<std::size_t>(mcfg.ticks);
            o.seed = split_seed(cfg.seed, i);
            o.decay_rate = k.decay_rate;
            o.keep_tick_times = false;
            mc[i] = simulate_clock(p.rates, o);
        });
    }

    RunOutput out;
    out.table.columns = {"d",           "omega_c",         "gamma_up",         "gamma_down",      "entropy_per_tick",
                         "power",       "t_tick_exact",    "resolution_exact", "accuracy_exact",  "resolution_formula",
                         "accuracy_formula", "entropy_limit", "t_tick_mc",     "resolution_mc",   "accuracy_mc",
                         "se_t_tick_mc", "feasible"};
    std::vector<double> power, resolution, accuracy;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const double nan = std::nan("");
        if (!p.feasible) {
            out.table.rows.push_back({p.d, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, long{0}});
            continue;
        }
        const double res = 1.0 / p.exact.mean;
        const double acc = p.exact.accuracy();
        const double res_f = p.rates.up > p.rates.down ? clock_resolution_formula(p.d, p.rates) : nan;
        const double acc_f = p.entropy_per_tick > 0.0 ? clock_accuracy_formula(p.d, p.entropy_per_tick) : nan;
        std::vector<CsvCell> row{p.d, p.omega_c, p.rates.up, p.rates.down, p.entropy_per_tick, p.power,
                                 p.exact.mean, res, acc, res_f, acc_f, p.entropy_per_tick / 2.0};
        if (mc[i]) {
            row.insert(row.end(), {mc[i]->t_tick, mc[i]->nu_tick, mc[i]->accuracy, mc[i]->se_t_tick});
        } else {
            row.insert(row.end(), {nan, nan, nan, nan});
        }
        row.push_back(long{1});
        out.table.rows.push_back(std::move(row));
        power.push_back(p.power);
        resolution.push_back(res);
        accuracy.push_back(acc);
    }

    nlohmann::json j;
    j["scan"] = to_string(k.scan);
    j["feasible_rows"] = power.size();
    switch (k.scan) {
    case ClockScan::fixed_power: {
        // accuracy against resolution, ordered by resolution
        std::vector<std::size_t> order(resolution.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return resolution[a] < resolution[b]; });
        bool decreasing = order.size() >= 2;
        for (std::size_t i = 1; i < order.size(); ++i)
            decreasing = decreasing && accuracy[order[i]] < accuracy[order[i - 1]];
        j["accuracy_decreasing_in_resolution"] = decreasing;
        break;
    }
    case ClockScan::fixed_resolution:
        j["accuracy_saturation_change"] = saturation_change(power, accuracy);
        break;
    case ClockScan::fixed_accuracy:
        j["resolution_saturation_change"] = saturation_change(power, resolution);
        break;
    case ClockScan::d_sweep: {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& p : pts) {
            const double limit = p.entropy_per_tick / 2.0;
            rows.push_back({{"d", p.d},
                            {"entropy_over_2d", p.entropy_per_tick / (2.0 * static_cast<double>(p.d))},
                            {"relative_to_entropy_limit", p.exact.accuracy() / limit - 1.0}});
        }
        j["entropy_limit"] = rows;
        break;
    }
    }
    out.summary = j;
    return out;
}

/// Dispatches on run.mode.
inline RunOutput run(const RunConfig& cfg, unsigned threads = 1) {
    switch (cfg.run.mode) {
    case RunMode::steady: return run_steady(cfg);
    case RunMode::sweep: return run_fridge_sweep(cfg, threads);
    case RunMode::transient: return run_transient(cfg);
    case RunMode::engine_walk: return run_engine(cfg, threads);
    case RunMode::clock: return run_clock(cfg, threads);
    }
    throw ConfigError("/run/mode", "unknown mode");
}

} // namespace qam
