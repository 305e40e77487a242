// dynamics.hpp — Liouvillian assembly, steady states, propagation and heat currents

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dissipation.hpp"
#include "linalg.hpp"
#include "models.hpp"

namespace qam {

/// Generator of rho' = -i[H, rho] + sum_a D_a[rho] on column-stacked vec(rho).
struct Liouvillian {
    ComplexMatrix matrix;
    HermitianOperator hamiltonian;
    std::vector<Dissipator> dissipators;
    HermitianOperator current_hamiltonian; // energy operator used for heat currents

    Index dim() const { return hamiltonian.dim(); }

    ComplexMatrix apply(const ComplexMatrix& rho) const {
        return unvec(matrix * vec(rho), dim());
    }
};

/// Superoperator of a single dissipator.
inline ComplexMatrix dissipator_superoperator(const Dissipator& d, Index n) {
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix out = ComplexMatrix::Zero(n * n, n * n);
    for (const auto& t : d.terms) {
        if (t.op.rows() != n || t.op.cols() != n) throw DomainError("liouvillian: jump operator dimension mismatch");
        if (t.rate == 0.0) continue;
        const ComplexMatrix ldl = t.op.adjoint() * t.op;
        // vec(A X B) = (B^T kron A) vec(X)
        out += t.rate * (kron(t.op.conjugate(), t.op) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
    }
    return out;
}

inline ComplexMatrix hamiltonian_superoperator(const HermitianOperator& h) {
    const Index n = h.dim();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    return -kI * (kron(id, h.matrix()) - kron(h.matrix().transpose(), id));
}

inline Liouvillian liouvillian(const HermitianOperator& h, std::vector<Dissipator> ds,
                               std::optional<HermitianOperator> current_hamiltonian = std::nullopt) {
    Liouvillian l;
    l.matrix = hamiltonian_superoperator(h);
    for (const auto& d : ds) l.matrix += dissipator_superoperator(d, h.dim());
    l.hamiltonian = h;
    l.dissipators = std::move(ds);
    l.current_hamiltonian = current_hamiltonian ? *current_hamiltonian : h;
    if (l.current_hamiltonian.dim() != h.dim()) throw DomainError("liouvillian: current Hamiltonian dimension mismatch");
    return l;
}

/// Machine plus baths. Local currents are measured with H_free, global ones with the full H.
inline Liouvillian machine_liouvillian(const MachineModel& machine, const std::vector<BathSpec>& baths,
                                       DissipationModel model) {
    std::vector<Dissipator> ds;
    for (const auto& b : baths) ds.push_back(make_dissipator(machine, b, model));
    const HermitianOperator h = machine.hamiltonian();
    return liouvillian(h, std::move(ds), model == DissipationModel::local ? machine.h_free : h);
}

/// J = Tr{H D[rho]}
inline double heat_current(const HermitianOperator& h, const Dissipator& d, const ComplexMatrix& rho) {
    if (h.dim() != rho.rows()) throw DomainError("heat_current: dimension mismatch");
    const Complex j = (h.matrix() * d.apply(rho)).trace();
    const double scale = std::max(1.0, std::abs(j));
    if (std::abs(j.imag()) > 1e-8 * scale)
        throw DomainError("heat_current: imaginary part " + std::to_string(j.imag()) + " indicates inconsistent inputs");
    return j.real();
}

inline double heat_current(const HermitianOperator& h, const Dissipator& d, const DensityMatrix& rho) {
    return heat_current(h, d, rho.matrix());
}

/// sigma = dS/dt - sum_a J_a / T_a
inline double entropy_production_rate(double entropy_rate, const std::vector<double>& currents,
                                      const std::vector<double>& temperatures) {
    if (currents.size() != temperatures.size())
        throw DomainError("entropy_production_rate: currents and temperatures differ in length");
    double sigma = entropy_rate;
    for (std::size_t i = 0; i < currents.size(); ++i) sigma -= currents[i] / temperatures[i];
    return sigma;
}

struct BathCurrent {
    char label;
    double value;
};

struct SteadyStateReport {
    DensityMatrix rho;
    std::vector<BathCurrent> currents;
    double entropy_rate = 0.0;
    double residual = 0.0;
    double rcond = 0.0;

    double current(char label) const {
        for (const auto& c : currents)
            if (c.label == label) return c.value;
        throw DomainError(std::string("SteadyStateReport: no current for bath '") + label + "'");
    }

    double current_sum() const {
        double s = 0.0;
        for (const auto& c : currents) s += c.value;
        return s;
    }

    double max_abs_current() const {
        double m = 0.0;
        for (const auto& c : currents) m = std::max(m, std::abs(c.value));
        return m;
    }
};

/// Thrown when the Liouvillian kernel is not one-dimensional.
class DegenerateSteadyState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct SteadyStateOptions {
    double degeneracy_rcond = 1e-13; // below this the bordered system is treated as singular
    double max_negative = 1e-8;      // eigenvalues below -max_negative are a solver failure
};

namespace detail {

inline DensityMatrix clean_state(ComplexMatrix rho, double max_negative, const char* who) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    const double lowest = es.eigenvalues()(0);
    if (lowest < -max_negative)
        throw NumericalError(std::string(who) + ": state has eigenvalue " + std::to_string(lowest));
    if (lowest < -kStateTolerance) {
        RealVector lambda = es.eigenvalues().cwiseMax(0.0);
        lambda /= lambda.sum();
        rho = es.eigenvectors() * lambda.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
        rho = 0.5 * (rho + rho.adjoint()).eval();
    }
    return DensityMatrix(std::move(rho));
}

} // namespace detail

/// Unique fixed point of L with per-bath heat currents.
///
/// The trace constraint replaces the first row of L (redundant by trace
/// preservation); a small reciprocal condition number of the bordered system
/// flags a degenerate kernel.
inline SteadyStateReport steady_state(const Liouvillian& l, const SteadyStateOptions& opt = {}) {
    const Index n = l.dim();
    const Index n2 = n * n;
    ComplexMatrix m = l.matrix;
    m.row(0).setZero();
    for (Index i = 0; i < n; ++i) m(0, i + n * i) = 1.0;
    ComplexVector rhs = ComplexVector::Zero(n2);
    rhs(0) = 1.0;

    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    // Eigen's estimate is unreliable once a pivot is exactly zero, so cap it by the pivot ratio.
    const RealVector pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rc = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
    if (!(rc > opt.degeneracy_rcond))
        throw DegenerateSteadyState("steady_state: Liouvillian kernel is degenerate or empty (rcond " +
                                    std::to_string(rc) + ")");
    ComplexVector x = lu.solve(rhs);
    x += lu.solve(rhs - m * x); // one step of iterative refinement
    if (!x.allFinite()) throw NumericalError("steady_state: non-finite solution");

    SteadyStateReport r;
    r.rho = detail::clean_state(unvec(x, n), opt.max_negative, "steady_state");
    r.rcond = rc;
    r.residual = (l.matrix * vec(r.rho.matrix())).cwiseAbs().maxCoeff();
    std::vector<double> js, ts;
    for (const auto& d : l.dissipators) {
        const double j = heat_current(l.current_hamiltonian, d, r.rho);
        r.currents.push_back({d.bath.label, j});
        js.push_back(j);
        ts.push_back(d.bath.temperature);
    }
    r.entropy_rate = entropy_production_rate(0.0, js, ts);
    return r;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
};

/// Exact exponential stepping on a time grid (starts at times[0] with rho0).
///
/// Propagators are cached per distinct step. Trace or positivity violations
/// beyond 1e-6 abort with the offending time.
inline Trajectory evolve(const DensityMatrix& rho0, const Liouvillian& l, const std::vector<double>& times) {
    if (rho0.dim() != l.dim()) throw DomainError("evolve: state dimension mismatch");
    if (times.empty()) throw DomainError("evolve: empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] >= times[i - 1])) throw DomainError("evolve: time grid must be non-decreasing");

    const Index n = l.dim();
    std::map<double, ComplexMatrix> cache;
    Trajectory tr;
    tr.times = times;
    tr.states.reserve(times.size());
    tr.states.push_back(rho0);
    ComplexVector v = vec(rho0.matrix());
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        auto it = cache.find(dt);
        if (it == cache.end()) it = cache.emplace(dt, matrix_exp(l.matrix, Complex{dt, 0.0})).first;
        v = it->second * v;
        ComplexMatrix rho = unvec(v, n);
        try {
            tr.states.emplace_back(std::move(rho), 1e-6);
        } catch (const DomainError& e) {
            throw NumericalError("evolve: invariant violated at t = " + std::to_string(times[i]) + ": " + e.what());
        }
    }
    return tr;
}

/// k = 2g Im<A_c A_h^dag A_w>, the excitation current through a three-body fridge.
inline double internal_current(const MachineModel& machine, const DensityMatrix& rho) {
    if (machine.topology != Topology::fridge)
        throw DomainError("internal_current: requires a three-body fridge");
    const ComplexMatrix b =
        machine.channel('c').lowering * machine.channel('h').lowering.adjoint() * machine.channel('w').lowering;
    return 2.0 * machine.g * (b * rho.matrix()).trace().imag();
}

} // namespace qam
