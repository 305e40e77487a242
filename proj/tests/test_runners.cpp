// test_runners.cpp — Mode runners on small grids

#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "qam/runners.hpp"

using namespace qam;

namespace {

RunConfig fridge_config(DissipationModel model, double g, std::vector<double> omega_c) {
    RunConfig c;
    c.machine.type = MachineType::three_qubit;
    c.machine.omega_c = 0.5;
    c.machine.omega_h = 1.5;
    c.machine.g = g;
    for (auto [label, t] : {std::pair{'c', 1.0}, {'h', 1.1}, {'w', 1.5}}) {
        BathConfig b;
        b.label = label;
        b.temperature = t;
        if (model == DissipationModel::local) b.omega_ref = 1.0;
        c.baths.push_back(b);
    }
    c.dissipation = model;
    c.run.mode = RunMode::sweep;
    SweepConfig s;
    s.values = std::move(omega_c);
    c.run.sweep = s;
    return c;
}

std::string csv_of(const RunOutput& out, const RunConfig& cfg) {
    std::ostringstream s;
    write_csv(s, out.table, config_hash(cfg), cfg.seed);
    return s.str();
}

} // namespace

TEST(Helpers, FindRoot) {
    const auto r = find_root([](double x) { return x * x - 2.0; }, 0.0, 3.0);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, std::sqrt(2.0), 1e-12);
    EXPECT_FALSE(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0).has_value());
}

TEST(Helpers, SaturationChange) {
    // flat tail: the last 20% of the power range changes the metric by nothing
    EXPECT_NEAR(saturation_change({1, 2, 3, 4, 5}, {1, 2, 3, 3, 3}), 0.0, 1e-15);
    EXPECT_GT(saturation_change({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}), 0.1);
}

TEST(FridgeSweep, LocalCopEqualsFrequencyRatio) {
    const RunConfig cfg = fridge_config(DissipationModel::local, 0.02, {0.25, 0.75, 1.25, 1.75, 2.25});
    const RunOutput out = run_fridge_sweep(cfg, 2);
    ASSERT_EQ(out.table.rows.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        const double wc = out.table.number(i, "omega_c");
        EXPECT_NEAR(out.table.number(i, "cop") / wc, 1.0, 0.01);
        EXPECT_EQ(out.table.number(i, "omega_w"), 1.0);
    }
    EXPECT_TRUE(out.laws_ok);
}

TEST(FridgeSweep, PowerNormalisation) {
    const RunConfig cfg = fridge_config(DissipationModel::global, 0.3, {0.2, 0.5, 0.8, 1.1, 1.4, 1.7, 2.9});
    const RunOutput out = run_fridge_sweep(cfg);
    int ones = 0;
    for (std::size_t i = 0; i < out.table.rows.size(); ++i) {
        const double p = out.table.number(i, "power_norm");
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        ones += p == 1.0;
        if (i > 0) {
            EXPECT_GT(out.table.number(i, "omega_c"), out.table.number(i - 1, "omega_c"));
        }
    }
    EXPECT_EQ(ones, 1);
    EXPECT_EQ(out.table.number(6, "cooling"), 0.0); // outside the window, kept and flagged
    EXPECT_LT(out.summary["max_cop_over_carnot"].get<double>(), 1.0);
}

TEST(FridgeSweep, ThreadCountDoesNotChangeCsv) {
    const RunConfig cfg = fridge_config(DissipationModel::global, 0.2, {0.3, 0.6, 0.9, 1.2});
    EXPECT_EQ(csv_of(run_fridge_sweep(cfg, 1), cfg), csv_of(run_fridge_sweep(cfg, 3), cfg));
}

TEST(Steady, FridgeReportFlags) {
    RunConfig cfg = fridge_config(DissipationModel::local, 0.02, {});
    cfg.run.mode = RunMode::steady;
    cfg.run.sweep.reset();
    const RunOutput out = run_steady(cfg);
    EXPECT_TRUE(out.summary["first_law"].get<bool>());
    EXPECT_TRUE(out.summary["second_law"].get<bool>());
    EXPECT_NEAR(out.summary["cop"].get<double>(), 0.5, 0.005);
    EXPECT_NEAR(out.summary["cooling_window"].get<double>(), 2.6666666666666665, 1e-12);
    EXPECT_TRUE(out.summary.contains("virtual_temperature_split"));
    EXPECT_TRUE(out.laws_ok);
}

TEST(Steady, ClockNeedsDecayAndBalancesEnergy) {
    RunConfig cfg;
    cfg.machine.type = MachineType::clock;
    cfg.machine.omega_c = 0.6;
    cfg.machine.omega_h = 1.0;
    cfg.machine.g = 0.05;
    cfg.machine.d = 4;
    BathConfig c, h;
    c.label = 'c';
    c.temperature = 1.0;
    h.label = 'h';
    h.temperature = 10.0;
    cfg.baths = {c, h};
    cfg.dissipation = DissipationModel::local;
    cfg.run.mode = RunMode::steady;
    EXPECT_THROW(run_steady(cfg), ConfigError);
    ClockConfig k;
    k.decay_rate = 0.01;
    k.d_values = {4};
    cfg.run.clock = k;
    const RunOutput out = run_steady(cfg);
    EXPECT_TRUE(out.summary["first_law"].get<bool>());
    EXPECT_GT(out.summary["tick_rate"].get<double>(), 0.0);
}

TEST(Transient, UndershootAndCoherence) {
    RunConfig cfg = fridge_config(DissipationModel::local, 0.02, {});
    cfg.run.mode = RunMode::transient;
    cfg.run.sweep.reset();
    cfg.run.time = TimeGridConfig{400.0, 400};
    cfg.run.coherence = {0.0, 0.04};
    const RunOutput out = run_transient(cfg);
    EXPECT_EQ(out.table.rows.size(), 2u * 401u);
    const auto& curves = out.summary["curves"];
    EXPECT_GT(curves[0]["undershoot_relative"].get<double>(), 0.0);
    EXPECT_LT(curves[1]["first_min_T_eff"].get<double>(), curves[0]["first_min_T_eff"].get<double>());
    EXPECT_TRUE(out.laws_ok);
}

TEST(Transient, InitialStateCoherenceIsClipped) {
    const MachineModel m = build_three_qubit(1.0, 2.0, 0.05);
    const std::vector<BathSpec> baths{{'c', 1.0, 1e-3, 1, 1.0}, {'h', 1.1, 1e-3, 1, 1.0}, {'w', 1.5, 1e-3, 1, 1.0}};
    double used = 0.0;
    const DensityMatrix rho = fridge_initial_state(m, baths, 10.0, &used);
    EXPECT_LT(used, 10.0);
    EXPECT_NEAR(std::abs(rho.matrix()(2, 5)), used, 1e-15);
    EXPECT_GE(rho.eigenvalues()(0), -1e-12);
}

TEST(Engine, SweepFlags) {
    RunConfig cfg;
    cfg.machine.type = MachineType::engine;
    cfg.machine.omega_c = 0.5;
    cfg.machine.omega_h = 1.0;
    BathConfig c, h;
    c.label = 'c';
    c.temperature = 1.0;
    h.label = 'h';
    h.temperature = 10.0;
    cfg.baths = {c, h};
    cfg.run.mode = RunMode::engine_walk;
    SweepConfig s;
    s.variable = "omega_w";
    s.hold = "omega_h";
    s.values = {0.1, 0.3, 0.5, 0.7, 0.85, 0.95};
    cfg.run.sweep = s;
    cfg.run.cycles = {300, 3000};
    cfg.run.monte_carlo.enabled = false;
    const RunOutput out = run_engine(cfg);
    EXPECT_TRUE(out.summary["eta_inf_bounded_by_carnot"].get<bool>());
    EXPECT_TRUE(out.summary["eta_increasing_in_N"].get<bool>());
    EXPECT_TRUE(out.summary["finite_N_below_carnot"].get<bool>());
    EXPECT_EQ(out.table.number(5, "engine"), 0.0); // omega_c = 0.05 is below T_c omega_h / T_h
    EXPECT_TRUE(std::isnan(out.table.number(5, "eta_N300")));
}

TEST(Clock, FixedPowerScanIsMonotone) {
    RunConfig cfg = parse_config(std::string(R"({
      "schema_version": 1,
      "machine": {"type": "clock", "omega_c": 5, "omega_h": 20, "d": 6},
      "baths": [{"label": "c", "T": 1}, {"label": "h", "T": 10}],
      "dissipation": {"model": "local"},
      "run": {"mode": "clock", "clock": {"scan": "fixed_power", "target": 0.3, "d_values": [6, 14, 22]},
              "monte_carlo": {"ticks": 500}}
    })"));
    const RunOutput out = run_clock(cfg);
    EXPECT_TRUE(out.summary["accuracy_decreasing_in_resolution"].get<bool>());
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(out.table.number(i, "power"), 0.3, 1e-9);
        EXPECT_FALSE(std::isnan(out.table.number(i, "t_tick_mc")));
    }
}

TEST(Clock, DecayDwellEntersExactColumns) {
    RunConfig cfg = parse_config(std::string(R"({
      "schema_version": 1,
      "machine": {"type": "clock", "omega_c": 5, "omega_h": 20, "d": 6},
      "baths": [{"label": "c", "T": 1}, {"label": "h", "T": 10}],
      "dissipation": {"model": "local"},
      "run": {"mode": "clock", "clock": {"scan": "d_sweep", "d_values": [10], "rate_ratio": 2, "decay_rate": 0.5},
              "gamma_eff": 3, "monte_carlo": {"ticks": 20000}}
    })"));
    const RunOutput out = run_clock(cfg);
    const double exact = out.table.number(0, "t_tick_exact");
    EXPECT_NEAR(exact, first_passage_moments(WalkParams{2.0, 1.0, 10, 1.0}, 10).mean + 2.0, 1e-12);
    EXPECT_LT(std::abs(out.table.number(0, "t_tick_mc") - exact), 3.0 * out.table.number(0, "se_t_tick_mc"));
}

TEST(Run, Deterministic) {
    RunConfig cfg = parse_config(std::string(R"({
      "schema_version": 1,
      "machine": {"type": "clock", "omega_c": 5, "omega_h": 20, "d": 6},
      "baths": [{"label": "c", "T": 1}, {"label": "h", "T": 10}],
      "dissipation": {"model": "local"},
      "run": {"mode": "clock", "clock": {"scan": "fixed_power", "target": 0.3, "d_values": [6, 10]},
              "monte_carlo": {"ticks": 300}},
      "seed": 77
    })"));
    EXPECT_EQ(csv_of(run(cfg, 1), cfg), csv_of(run(cfg, 2), cfg));
    RunConfig other = cfg;
    other.seed = 78;
    EXPECT_NE(csv_of(run(cfg, 1), cfg), csv_of(run(other, 1), other));
}
