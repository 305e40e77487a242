// dissipation.hpp — Thermal Lindblad dissipators, local and global

#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "models.hpp"

namespace qam {

enum class DissipationModel { local, global };

inline const char* to_string(DissipationModel m) { return m == DissipationModel::local ? "local" : "global"; }

/// Bosonic bath with spectral density gamma(omega) = kappa (omega / omega_ref)^D.
struct BathSpec {
    char label = 'c';
    double temperature = 1.0;
    double kappa = 1e-3;
    int dimensionality = 1;
    double omega_ref = 1.0;

    void validate() const {
        if (!(temperature > 0.0) || std::isnan(temperature)) throw DomainError("BathSpec: temperature must be positive");
        if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("BathSpec: kappa must be positive");
        if (!(omega_ref > 0.0) || !std::isfinite(omega_ref)) throw DomainError("BathSpec: omega_ref must be positive");
        if (dimensionality < 1 || dimensionality > 3) throw DomainError("BathSpec: D must be 1, 2 or 3");
    }

    double beta() const { return 1.0 / temperature; }
};

struct JumpTerm {
    ComplexMatrix op;
    double rate = 0.0;
    double omega = 0.0; // energy removed from the system by this jump (negative for absorption)
};

struct Dissipator {
    std::vector<JumpTerm> terms;
    DissipationModel flavor = DissipationModel::local;
    BathSpec bath;

    Index dim() const { return terms.empty() ? 0 : terms.front().op.rows(); }

    /// D[rho] = sum rate (L rho L^dag - {L^dag L, rho}/2)
    ComplexMatrix apply(const ComplexMatrix& rho) const {
        ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
        for (const auto& t : terms) {
            const ComplexMatrix ldl = t.op.adjoint() * t.op;
            out += t.rate * (t.op * rho * t.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
        }
        return out;
    }
};

/// n(omega) = 1 / (exp(omega / T) - 1)
inline double bose_occupation(double omega, double temperature) {
    if (!(omega > 0.0)) throw DomainError("bose_occupation: omega must be positive");
    if (!(temperature > 0.0)) throw DomainError("bose_occupation: temperature must be positive");
    return 1.0 / std::expm1(omega / temperature);
}

struct RatePair {
    double down = 0.0; // emission into the bath
    double up = 0.0;   // absorption from the bath
};

inline RatePair rate_pair(double omega, const BathSpec& bath) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("rate_pair: omega must be positive");
    bath.validate();
    const double prefactor = bath.kappa * std::pow(omega / bath.omega_ref, bath.dimensionality);
    const double x = omega / bath.temperature;
    // n + 1 = 1/(1 - e^{-x}) and n = e^{-x}/(1 - e^{-x}); the ratio is e^{-x} by construction
    const double em = std::exp(-x);
    const double np1 = -1.0 / std::expm1(-x);
    return {prefactor * np1, prefactor * np1 * em};
}

/// Bath acting on a single subsystem's own transitions.
inline Dissipator local_dissipator(const MachineModel& machine, char subsystem, const BathSpec& bath) {
    const BathChannel& ch = machine.channel(subsystem);
    const RatePair r = rate_pair(ch.omega, bath);
    Dissipator d;
    d.flavor = DissipationModel::local;
    d.bath = bath;
    for (const auto& jump : ch.local_jumps) {
        d.terms.push_back({jump, r.down, ch.omega});
        d.terms.push_back({jump.adjoint(), r.up, -ch.omega});
    }
    return d;
}

inline Dissipator local_dissipator(const MachineModel& machine, const BathSpec& bath) {
    return local_dissipator(machine, bath.label, bath);
}

/// Bath acting on Bohr transitions of an arbitrary Hamiltonian through coupling operator X.
inline Dissipator global_dissipator(const HermitianOperator& h, const ComplexMatrix& coupling, const BathSpec& bath) {
    if (coupling.rows() != h.dim() || coupling.cols() != h.dim())
        throw DomainError("global_dissipator: coupling operator dimension mismatch");
    if (coupling.cwiseAbs().maxCoeff() == 0.0) throw DomainError("global_dissipator: empty coupling operator");
    bath.validate();

    const auto spec = herm_eig(h);
    const Index n = spec.eigenvalues.size();
    const double scale = std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
    const double tol = 1e-9 * scale;

    // degenerate energy clusters
    struct Cluster {
        double energy;
        ComplexMatrix projector;
    };
    std::vector<Cluster> clusters;
    for (Index k = 0; k < n;) {
        Index stop = k + 1;
        while (stop < n && spec.eigenvalues(stop) - spec.eigenvalues(stop - 1) <= tol) ++stop;
        const auto v = spec.eigenvectors.middleCols(k, stop - k);
        clusters.push_back({spec.eigenvalues.segment(k, stop - k).mean(), v * v.adjoint()});
        k = stop;
    }

    // group positive Bohr frequencies
    struct Bohr {
        double omega;
        ComplexMatrix op;
    };
    std::vector<Bohr> groups;
    for (const auto& lo : clusters) {
        for (const auto& hi : clusters) {
            const double omega = hi.energy - lo.energy;
            if (omega <= tol) continue;
            ComplexMatrix piece = lo.projector * coupling * hi.projector;
            if (piece.cwiseAbs().maxCoeff() < 1e-13) continue;
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const Bohr& b) { return std::abs(b.omega - omega) <= tol; });
            if (it == groups.end())
                groups.push_back({omega, std::move(piece)});
            else
                it->op += piece;
        }
    }
    std::sort(groups.begin(), groups.end(), [](const Bohr& a, const Bohr& b) { return a.omega < b.omega; });

    Dissipator d;
    d.flavor = DissipationModel::global;
    d.bath = bath;
    for (auto& b : groups) {
        if (b.op.cwiseAbs().maxCoeff() < 1e-13) continue;
        const RatePair r = rate_pair(b.omega, bath);
        ComplexMatrix raising = b.op.adjoint();
        d.terms.push_back({std::move(b.op), r.down, b.omega});
        d.terms.push_back({std::move(raising), r.up, -b.omega});
    }
    return d;
}

inline Dissipator global_dissipator(const MachineModel& machine, const BathSpec& bath) {
    return global_dissipator(machine.hamiltonian(), machine.channel(bath.label).coupling(), bath);
}

inline Dissipator make_dissipator(const MachineModel& machine, const BathSpec& bath, DissipationModel model) {
    return model == DissipationModel::local ? local_dissipator(machine, bath) : global_dissipator(machine, bath);
}

} // namespace qam
