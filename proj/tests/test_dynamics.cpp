// test_dynamics.cpp — Liouvillian, steady states, propagation and heat currents

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qam/dynamics.hpp"
#include "qam/thermo.hpp"

using namespace qam;

namespace {

BathSpec bath(char label, double t, double kappa = 1e-3, double ref = 1.0) {
    BathSpec b;
    b.label = label;
    b.temperature = t;
    b.kappa = kappa;
    b.omega_ref = ref;
    return b;
}

std::vector<BathSpec> fridge_baths(double kappa = 1e-3) {
    return {bath('c', 1.0, kappa), bath('h', 1.1, kappa), bath('w', 1.5, kappa)};
}

ComplexMatrix random_matrix(Index n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    ComplexMatrix m(n, n);
    for (Index i = 0; i < n * n; ++i) m(i) = Complex(nd(gen), nd(gen));
    return m;
}

// Fridge at omega_w = 1 with the given omega_c.
MachineModel fridge(double omega_c, double g) { return build_three_qubit(omega_c, omega_c + 1.0, g); }

} // namespace

TEST(Liouvillian, UnitaryActionMatchesCommutator) {
    std::mt19937_64 gen(1);
    const ComplexMatrix a = random_matrix(4, gen);
    const HermitianOperator h(0.5 * (a + a.adjoint()));
    const Liouvillian l = liouvillian(h, {});
    const ComplexMatrix rho = random_matrix(4, gen);
    EXPECT_LT((l.apply(rho) - (-kI) * commutator(h.matrix(), rho)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Liouvillian, DissipatorActionMatchesSuperoperator) {
    std::mt19937_64 gen(2);
    const MachineModel m = fridge(0.6, 0.05);
    const Liouvillian l = machine_liouvillian(m, fridge_baths(0.1), DissipationModel::global);
    const ComplexMatrix rho = random_matrix(8, gen);
    ComplexMatrix direct = -kI * commutator(l.hamiltonian.matrix(), rho);
    for (const auto& d : l.dissipators) direct += d.apply(rho);
    EXPECT_LT((l.apply(rho) - direct).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Liouvillian, SingleQubitSpectrum) {
    const double w = 0.9;
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(1, 1) = w;
    const BathSpec b = bath('c', 0.7, 0.2);
    const RatePair r = rate_pair(w, b);
    Dissipator d;
    d.bath = b;
    d.terms = {{ops::sigma_minus(), r.down, w}, {ops::sigma_plus(), r.up, -w}};
    const Liouvillian l = liouvillian(HermitianOperator(h), {d});
    Eigen::ComplexEigenSolver<ComplexMatrix> es(l.matrix);
    std::vector<Complex> got(es.eigenvalues().data(), es.eigenvalues().data() + 4);

    // populations relax at the total rate, coherences at half of it while rotating at w
    const double s = r.down + r.up;
    std::vector<Complex> expected{0.0, -s, Complex(-s / 2, w), Complex(-s / 2, -w)};
    auto key = [](Complex z) { return std::make_pair(z.real(), z.imag()); };
    auto by = [&](Complex a, Complex c) { return key(a) < key(c); };
    std::sort(got.begin(), got.end(), by);
    std::sort(expected.begin(), expected.end(), by);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(std::abs(got[i] - expected[i]), 1e-12);
}

TEST(Liouvillian, TracePreserving) {
    const MachineModel m = build_engine(0.3, 1.0, 4, 0.1);
    for (auto model : {DissipationModel::local, DissipationModel::global}) {
        const Liouvillian l = machine_liouvillian(m, {bath('c', 1.0), bath('h', 10.0)}, model);
        const ComplexVector left = vec(ops::identity(m.dim())).adjoint() * l.matrix;
        EXPECT_LT(left.cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(SteadyState, SingleBathGlobalIsGibbs) {
    std::mt19937_64 gen(40);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double wc = u(gen), wh = wc + u(gen), g = 0.4 * u(gen), t = 0.3 + u(gen);
        const MachineModel m = build_three_qubit(wc, wh, g);
        const DensityMatrix gibbs = DensityMatrix::gibbs(m.hamiltonian(), t);
        for (char label : {'c', 'h', 'w'}) {
            // one channel alone conserves a population sum (n_h + n_w for the cold one), so Gibbs is a fixed point but not the only one
            const Liouvillian l = machine_liouvillian(m, {bath(label, t)}, DissipationModel::global);
            EXPECT_LT((l.matrix * vec(gibbs.matrix())).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_THROW(steady_state(l), DegenerateSteadyState);
        }
        // one reservoir at temperature t reaching the machine through every channel
        const Liouvillian l =
            machine_liouvillian(m, {bath('c', t), bath('h', t), bath('w', t)}, DissipationModel::global);
        EXPECT_LT(trace_distance(steady_state(l).rho, gibbs), 1e-8);
    }
}

TEST(SteadyState, DecoupledPartsThermaliseIndependently) {
    const MachineModel m = build_three_qubit(0.4, 1.4, 0.0);
    const auto baths = fridge_baths();
    const SteadyStateReport r = steady_state(machine_liouvillian(m, baths, DissipationModel::local));
    ComplexMatrix expected = ComplexMatrix::Identity(1, 1);
    for (const auto& s : m.subsystems) {
        ComplexMatrix h = ComplexMatrix::Zero(2, 2);
        h(1, 1) = s.omega;
        const double t = s.label == 'c' ? 1.0 : s.label == 'h' ? 1.1 : 1.5;
        expected = kron(expected, DensityMatrix::gibbs(HermitianOperator(h), t).matrix());
    }
    EXPECT_LT(trace_distance(r.rho.matrix(), expected), 1e-10);
    for (const auto& c : r.currents) EXPECT_LT(std::abs(c.value), 1e-15);
}

TEST(SteadyState, NoDissipationIsDegenerate) {
    const MachineModel m = fridge(0.5, 0.05);
    EXPECT_THROW(steady_state(liouvillian(m.hamiltonian(), {})), DegenerateSteadyState);
}

TEST(SteadyState, CoolsInsideWindow) {
    for (double wc : {0.5, 1.0, 2.0, 2.5}) {
        const SteadyStateReport r = steady_state(machine_liouvillian(fridge(wc, 0.02), fridge_baths(), DissipationModel::local));
        EXPECT_GT(r.current('c'), 0.0) << "omega_c = " << wc;
    }
    const SteadyStateReport out = steady_state(machine_liouvillian(fridge(2.9, 0.02), fridge_baths(), DissipationModel::local));
    EXPECT_LT(out.current('c'), 0.0);
}

TEST(SteadyState, LawsHoldInBothModels) {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double wc = 2.0 * u(gen), g = 0.1 * u(gen);
        const auto model = trial % 2 ? DissipationModel::local : DissipationModel::global;
        const SteadyStateReport r = steady_state(machine_liouvillian(fridge(wc, g), fridge_baths(0.01), model));
        EXPECT_LT(std::abs(r.current_sum()), 1e-10 * r.max_abs_current());
        EXPECT_GE(r.entropy_rate, -1e-12);
        EXPECT_LT(r.residual, 1e-12);
    }
}

TEST(SteadyState, EntropyProductionPositiveAndVanishingAtEdge) {
    const double edge = cooling_window(1.0, 1.1, 1.5);
    double inside = 0.0;
    for (double wc : {0.3, 1.0, 2.0}) {
        const SteadyStateReport r = steady_state(machine_liouvillian(fridge(wc, 0.02), fridge_baths(), DissipationModel::local));
        EXPECT_GT(r.entropy_rate, 0.0);
        inside = std::max(inside, r.entropy_rate);
    }
    const SteadyStateReport near = steady_state(machine_liouvillian(fridge(edge * 0.999, 0.02), fridge_baths(), DissipationModel::local));
    EXPECT_LT(near.entropy_rate, 1e-4 * inside);
}

TEST(HeatCurrent, ZeroAtDissipatorFixedPoint) {
    const MachineModel m = fridge(0.7, 0.1);
    const BathSpec b = bath('h', 1.2);
    const Dissipator d = global_dissipator(m, b);
    const DensityMatrix gibbs = DensityMatrix::gibbs(m.hamiltonian(), 1.2);
    EXPECT_LT(std::abs(heat_current(m.hamiltonian(), d, gibbs)), 1e-15);
}

TEST(HeatCurrent, WeakCouplingProportionality) {
    for (double g : {0.02, 0.04}) {
        const double wc = 1.2, wh = wc + 1.0;
        const MachineModel m = fridge(wc, g);
        const SteadyStateReport r = steady_state(machine_liouvillian(m, fridge_baths(), DissipationModel::local));
        const double jc = r.current('c') / wc;
        EXPECT_LT(std::abs(jc - r.current('w') / 1.0), 1e-3 * std::abs(jc));
        EXPECT_LT(std::abs(jc + r.current('h') / wh), 1e-3 * std::abs(jc));
        const double k = internal_current(m, r.rho);
        EXPECT_LT(std::abs(r.current('c') - k * wc), 0.01 * std::abs(r.current('c')));
    }
}

TEST(EntropyProduction, Equilibrium) {
    EXPECT_EQ(entropy_production_rate(0.0, {0.0, 0.0}, {1.0, 2.0}), 0.0);
    EXPECT_THROW(entropy_production_rate(0.0, {0.0}, {1.0, 2.0}), DomainError);
}

TEST(InternalCurrent, TrivialCases) {
    const MachineModel m = fridge(0.5, 0.1);
    const std::vector<double> p{0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
    EXPECT_EQ(internal_current(m, DensityMatrix::diagonal(p)), 0.0);
    const MachineModel free = fridge(0.5, 0.0);
    const SteadyStateReport r = steady_state(machine_liouvillian(fridge(0.5, 0.1), fridge_baths(), DissipationModel::local));
    EXPECT_EQ(internal_current(free, r.rho), 0.0);
    EXPECT_THROW(internal_current(build_engine(0.3, 1.0, 3, 0.1), r.rho), DomainError);
}

TEST(Evolve, FrozenDynamics) {
    const std::vector<double> p{0.6, 0.4};
    const DensityMatrix rho = DensityMatrix::diagonal(p);
    Liouvillian l;
    l.matrix = ComplexMatrix::Zero(4, 4);
    l.hamiltonian = HermitianOperator(ComplexMatrix::Zero(2, 2));
    l.current_hamiltonian = l.hamiltonian;
    const Trajectory tr = evolve(rho, l, {0.0, 1.0, 5.0, 100.0});
    for (const auto& s : tr.states) EXPECT_LT(trace_distance(s, rho), 1e-15);
}

TEST(Evolve, UnitaryPreservesSpectrum) {
    std::mt19937_64 gen(3);
    const ComplexMatrix a = random_matrix(3, gen);
    const HermitianOperator h(0.5 * (a + a.adjoint()));
    const std::vector<double> p{0.5, 0.3, 0.2};
    const DensityMatrix rho0 = DensityMatrix::diagonal(p);
    const Trajectory tr = evolve(rho0, liouvillian(h, {}), {0.0, 0.3, 1.7, 12.0});
    const RealVector e0 = rho0.eigenvalues();
    for (const auto& s : tr.states) EXPECT_LT((s.eigenvalues() - e0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Evolve, LongTimeReachesSteadyState) {
    const MachineModel m = fridge(1.0, 0.05);
    const Liouvillian l = machine_liouvillian(m, fridge_baths(0.05), DissipationModel::local);
    const SteadyStateReport ss = steady_state(l);
    const std::vector<double> p(8, 0.125);
    const Trajectory tr = evolve(DensityMatrix::diagonal(p), l, {0.0, 1e4, 2e4, 4e4});
    EXPECT_LT(trace_distance(tr.states.back(), ss.rho), 1e-7);
}

TEST(Evolve, GridValidation) {
    const MachineModel m = fridge(1.0, 0.05);
    const Liouvillian l = machine_liouvillian(m, fridge_baths(), DissipationModel::local);
    const std::vector<double> p(8, 0.125);
    EXPECT_THROW(evolve(DensityMatrix::diagonal(p), l, {1.0, 0.5}), DomainError);
    EXPECT_THROW(evolve(DensityMatrix::diagonal(p), l, {}), DomainError);
}

TEST(ThreeLevel, VirtualQubitPopulationRatio) {
    // cold bath detached: levels 1 and 2 equilibrate at the virtual temperature of the h and w legs
    const double wc = 0.3, wh = 1.0, th = 1.1, tw = 1.5;
    const MachineModel m = build_three_level(wc, wh);
    const Liouvillian l = machine_liouvillian(m, {bath('h', th), bath('w', tw)}, DissipationModel::local);
    const SteadyStateReport r = steady_state(l);
    const Temperature tv = virtual_temperature(wh, wh - wc, 1.0 / th, 1.0 / tw);
    EXPECT_NEAR(r.rho.population(1) / r.rho.population(0), std::exp(-tv.inverse() * wc), 1e-12);
}
