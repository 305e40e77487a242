// models.hpp — Hamiltonians of the absorption refrigerators, engine and clock

#pragma once

#include <array>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace qam {

enum class SubsystemKind { qubit, ladder, oscillator };

enum class Topology { three_level, fridge, engine };

inline constexpr Index kMaxHilbertDim = 200;

/// One of the three machine parts, labelled c (cold), h (hot) or w (work).
struct SubsystemSpec {
    char label = 'c';
    SubsystemKind kind = SubsystemKind::qubit;
    Index levels = 2;   // d for ladders, n_max + 1 for oscillators
    double omega = 1.0; // level spacing
};

/// Where a bath attaches and what it sees there.
struct BathChannel {
    char label = 'c';
    double omega = 0.0;            // transition frequency of the subsystem
    ComplexMatrix lowering;        // A_alpha embedded in the full space
    ComplexMatrix local_h;         // H_alpha embedded in the full space
    std::vector<ComplexMatrix> local_jumps; // lowering parts used by the local dissipator

    ComplexMatrix coupling() const { return lowering + lowering.adjoint(); }
};

struct MachineModel {
    std::vector<SubsystemSpec> subsystems; // (c, h, w) order; empty for three_level
    std::vector<Index> dims;
    double g = 0.0;
    Topology topology = Topology::three_level;
    HermitianOperator h_free;
    HermitianOperator h_int;
    std::vector<BathChannel> channels;

    Index dim() const { return h_free.dim(); }

    HermitianOperator hamiltonian() const { return HermitianOperator(h_free.matrix() + h_int.matrix()); }

    const BathChannel& channel(char label) const {
        for (const auto& ch : channels)
            if (ch.label == label) return ch;
        throw DomainError(std::string("MachineModel: no subsystem labelled '") + label + "'");
    }

    bool has_channel(char label) const {
        for (const auto& ch : channels)
            if (ch.label == label) return true;
        return false;
    }

    double omega(char label) const { return channel(label).omega; }
};

/// Engine plus an unstable top ladder level that emits the tick.
struct ClockModel {
    MachineModel engine;
    double decay_rate = 1.0;
    double photon_energy = 0.0;

    Index levels() const { return engine.dims.at(2); }
};

namespace detail {

inline void check_frequencies(double omega_c, double omega_h, const char* who) {
    if (!std::isfinite(omega_c) || !std::isfinite(omega_h) || !(omega_c > 0.0))
        throw DomainError(std::string(who) + ": frequencies must be positive and finite");
    if (!(omega_c < omega_h)) throw DomainError(std::string(who) + ": require omega_c < omega_h");
}

inline ComplexMatrix single_lowering(const SubsystemSpec& s) {
    switch (s.kind) {
    case SubsystemKind::qubit: return ops::sigma_minus();
    case SubsystemKind::ladder: return ops::ladder_lowering(s.levels);
    case SubsystemKind::oscillator: return ops::annihilation(s.levels);
    }
    throw DomainError("unknown subsystem kind");
}

inline ComplexMatrix single_hamiltonian(const SubsystemSpec& s) {
    ComplexMatrix h = ComplexMatrix::Zero(s.levels, s.levels);
    for (Index n = 0; n < s.levels; ++n) h(n, n) = s.omega * static_cast<double>(n);
    return h;
}

// Transition-resolved lowering parts: one |n><n+1| per ladder step, A itself otherwise.
inline std::vector<ComplexMatrix> single_local_jumps(const SubsystemSpec& s) {
    if (s.kind != SubsystemKind::ladder) return {single_lowering(s)};
    std::vector<ComplexMatrix> out;
    for (Index n = 0; n + 1 < s.levels; ++n) out.push_back(ops::outer(s.levels, n, n + 1));
    return out;
}

inline MachineModel assemble(std::vector<SubsystemSpec> specs, double g, Topology topology) {
    MachineModel m;
    m.g = g;
    m.topology = topology;
    Index total = 1;
    for (const auto& s : specs) {
        if (s.levels < 2) throw DomainError("subsystem truncation must keep at least 2 levels");
        if (s.kind == SubsystemKind::qubit && s.levels != 2) throw DomainError("qubit must have 2 levels");
        m.dims.push_back(s.levels);
        total *= s.levels;
    }
    if (total > kMaxHilbertDim)
        throw DomainError("total Hilbert dimension " + std::to_string(total) + " exceeds cap " +
                          std::to_string(kMaxHilbertDim));

    ComplexMatrix h0 = ComplexMatrix::Zero(total, total);
    std::vector<ComplexMatrix> lowering;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        BathChannel ch;
        ch.label = specs[i].label;
        ch.omega = specs[i].omega;
        ch.lowering = ops::embed(single_lowering(specs[i]), m.dims, i);
        ch.local_h = ops::embed(single_hamiltonian(specs[i]), m.dims, i);
        for (const auto& j : single_local_jumps(specs[i])) ch.local_jumps.push_back(ops::embed(j, m.dims, i));
        h0 += ch.local_h;
        lowering.push_back(ch.lowering);
        m.channels.push_back(std::move(ch));
    }

    ComplexMatrix hi = ComplexMatrix::Zero(total, total);
    if (g != 0.0) {
        const auto& ac = lowering[0];
        const auto& ah = lowering[1];
        const auto& aw = lowering[2];
        // fridge: A_c A_h^dag A_w + h.c.; engine: A_c^dag A_h A_w^dag + h.c.
        const ComplexMatrix term = topology == Topology::engine ? ComplexMatrix(ac.adjoint() * ah * aw.adjoint())
                                                                : ComplexMatrix(ac * ah.adjoint() * aw);
        hi = g * (term + term.adjoint());
    }
    m.subsystems = std::move(specs);
    m.h_free = HermitianOperator(std::move(h0));
    m.h_int = HermitianOperator(std::move(hi));
    return m;
}

} // namespace detail

/// Three-level maser fridge with levels (0, omega_c, omega_h).
///
/// Channels: c couples |0><1|, h couples |0><2|, w couples |1><2|.
inline MachineModel build_three_level(double omega_c, double omega_h) {
    detail::check_frequencies(omega_c, omega_h, "build_three_level");
    MachineModel m;
    m.topology = Topology::three_level;
    m.dims = {3};
    ComplexMatrix h = ComplexMatrix::Zero(3, 3);
    h(1, 1) = omega_c;
    h(2, 2) = omega_h;

    auto channel = [](char label, double omega, Index lo, Index hi) {
        BathChannel ch;
        ch.label = label;
        ch.omega = omega;
        ch.lowering = ops::outer(3, lo, hi);
        ch.local_h = ComplexMatrix::Zero(3, 3);
        ch.local_h(hi, hi) = omega; // energy of the transition, up to a shift
        ch.local_jumps = {ch.lowering};
        return ch;
    };
    m.channels = {channel('c', omega_c, 0, 1), channel('h', omega_h, 0, 2), channel('w', omega_h - omega_c, 1, 2)};
    m.h_free = HermitianOperator(std::move(h));
    m.h_int = HermitianOperator(ComplexMatrix::Zero(3, 3));
    return m;
}

/// Kind and truncation of one part of a three-body machine.
struct PartKind {
    SubsystemKind kind = SubsystemKind::qubit;
    Index levels = 2;
};

/// Three-body fridge H = sum_a omega_a A_a^dag A_a + g(A_c A_h^dag A_w + h.c.), omega_w = omega_h - omega_c.
inline MachineModel build_three_body(const std::array<PartKind, 3>& kinds, double omega_c, double omega_h, double g) {
    detail::check_frequencies(omega_c, omega_h, "build_three_body");
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("build_three_body: g must be non-negative");
    const std::array<char, 3> labels{'c', 'h', 'w'};
    const std::array<double, 3> omegas{omega_c, omega_h, omega_h - omega_c};
    std::vector<SubsystemSpec> specs;
    for (std::size_t i = 0; i < 3; ++i) {
        if (kinds[i].kind == SubsystemKind::ladder)
            throw DomainError("build_three_body: parts are qubits or oscillators");
        if (kinds[i].levels < 2) throw DomainError("build_three_body: truncation below 2 levels");
        specs.push_back({labels[i], kinds[i].kind, kinds[i].kind == SubsystemKind::qubit ? 2 : kinds[i].levels,
                         omegas[i]});
    }
    return detail::assemble(std::move(specs), g, Topology::fridge);
}

inline MachineModel build_three_qubit(double omega_c, double omega_h, double g) {
    return build_three_body({PartKind{}, PartKind{}, PartKind{}}, omega_c, omega_h, g);
}

/// Three truncated oscillators with n_max excitations each.
inline MachineModel build_three_oscillator(double omega_c, double omega_h, double g, Index n_max = 3) {
    if (n_max < 1) throw DomainError("build_three_oscillator: n_max must be at least 1");
    const PartKind osc{SubsystemKind::oscillator, n_max + 1};
    return build_three_body({osc, osc, osc}, omega_c, omega_h, g);
}

/// Two-qubit engine lifting a d-level ladder: g(A_c^dag A_h A_w^dag + h.c.).
inline MachineModel build_engine(double omega_c, double omega_h, Index d, double g) {
    detail::check_frequencies(omega_c, omega_h, "build_engine");
    if (d < 2) throw DomainError("build_engine: ladder needs at least 2 levels");
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("build_engine: g must be non-negative");
    std::vector<SubsystemSpec> specs{{'c', SubsystemKind::qubit, 2, omega_c},
                                     {'h', SubsystemKind::qubit, 2, omega_h},
                                     {'w', SubsystemKind::ladder, d, omega_h - omega_c}};
    return detail::assemble(std::move(specs), g, Topology::engine);
}

inline ClockModel build_clock(double omega_c, double omega_h, Index d, double g, double decay_rate) {
    if (d < 3) throw DomainError("build_clock: ladder needs at least 3 levels");
    if (!(decay_rate > 0.0) || !std::isfinite(decay_rate))
        throw DomainError("build_clock: decay rate must be positive");
    ClockModel c;
    c.engine = build_engine(omega_c, omega_h, d, g);
    c.decay_rate = decay_rate;
    c.photon_energy = static_cast<double>(d - 1) * (omega_h - omega_c);
    return c;
}

/// Heat drawn from the hot bath per tick, (d - 1) omega_h.
inline double clock_hot_heat_per_tick(const ClockModel& c) {
    return static_cast<double>(c.levels() - 1) * c.engine.omega('h');
}

} // namespace qam
