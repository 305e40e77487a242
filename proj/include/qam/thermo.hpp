// thermo.hpp — Virtual temperatures, cooling window, Carnot bounds, passive states, ergotropy

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace qam {

/// Signed temperature that may be +inf or -inf; stored through its inverse.
class Temperature {
public:
    enum class Kind { finite, positive_infinite, negative_infinite };

    static Temperature from_value(double t) {
        if (std::isnan(t) || t == 0.0) throw DomainError("Temperature: value must be non-zero and not NaN");
        if (std::isinf(t)) return from_inverse(t > 0 ? 0.0 : -0.0);
        return from_inverse(1.0 / t);
    }

    /// beta = +0 maps to +inf, beta = -0 to -inf.
    static Temperature from_inverse(double beta) {
        if (std::isnan(beta)) throw DomainError("Temperature: inverse is NaN");
        Temperature t;
        t.beta_ = beta;
        return t;
    }

    Kind kind() const {
        if (beta_ != 0.0) return Kind::finite;
        return std::signbit(beta_) ? Kind::negative_infinite : Kind::positive_infinite;
    }

    bool is_finite() const { return kind() == Kind::finite; }
    bool is_negative() const { return std::signbit(beta_); }

    /// Temperature value; +-infinity for the infinite kinds, 0 for beta = +-inf.
    double value() const {
        if (beta_ == 0.0) return std::signbit(beta_) ? -std::numeric_limits<double>::infinity()
                                                     : std::numeric_limits<double>::infinity();
        return 1.0 / beta_;
    }

    double inverse() const { return beta_; }

private:
    double beta_ = 1.0;
};

inline std::string to_string(const Temperature& t) {
    switch (t.kind()) {
    case Temperature::Kind::positive_infinite: return "+inf";
    case Temperature::Kind::negative_infinite: return "-inf";
    case Temperature::Kind::finite: break;
    }
    return std::to_string(t.value());
}

/// T_v = (omega_h - omega_w) / (beta_h omega_h - beta_w omega_w)
///
/// Engine form: pass (omega_h, omega_c, beta_h, beta_c).
inline Temperature virtual_temperature(double omega_hot_leg, double omega_work_leg, double beta_hot, double beta_work) {
    if (!(omega_hot_leg > 0.0) || !(omega_work_leg > 0.0))
        throw DomainError("virtual_temperature: frequencies must be positive");
    const double gap = omega_hot_leg - omega_work_leg;
    if (gap == 0.0) throw DomainError("virtual_temperature: legs must differ");
    const double denom = beta_hot * omega_hot_leg - beta_work * omega_work_leg;
    double beta = denom / gap;
    if (beta == 0.0) beta = std::signbit(gap) ? -0.0 : 0.0;
    return Temperature::from_inverse(beta);
}

/// Virtual temperatures of the two dressed cold transitions omega_c +- g.
inline std::pair<Temperature, Temperature> split_virtual_temperatures(double omega_c, double omega_w, double omega_h,
                                                                       double g, double beta_h, double beta_w) {
    if (!(omega_c > 0.0) || !(omega_w > 0.0) || !(omega_h > 0.0) || !(g >= 0.0))
        throw DomainError("split_virtual_temperatures: inputs must be positive");
    auto one = [&](double sign) {
        const double num = omega_c + sign * g;
        const double den = beta_h * omega_h - beta_w * (omega_w - sign * g);
        if (num == 0.0) throw DomainError("split_virtual_temperatures: zero transition frequency");
        double beta = den / num;
        if (beta == 0.0) beta = std::signbit(num) ? -0.0 : 0.0;
        return Temperature::from_inverse(beta);
    };
    return {one(+1.0), one(-1.0)};
}

namespace detail {
inline void check_fridge_temperatures(double t_c, double t_h, double t_w, const char* who) {
    if (!(t_c > 0.0) || !(t_c < t_h) || !(t_h <= t_w) || !std::isfinite(t_w))
        throw DomainError(std::string(who) + ": require 0 < T_c < T_h <= T_w");
}
} // namespace detail

/// Upper edge of the cooling window on omega_c / omega_w.
inline double cooling_window(double t_c, double t_h, double t_w) {
    detail::check_fridge_temperatures(t_c, t_h, t_w, "cooling_window");
    return t_c * (t_w - t_h) / (t_w * (t_h - t_c));
}

/// Carnot COP; +inf when T_c = T_h.
inline double carnot_cop(double t_c, double t_h, double t_w) {
    if (t_c > 0.0 && t_c == t_h && t_h <= t_w && std::isfinite(t_w)) return std::numeric_limits<double>::infinity();
    detail::check_fridge_temperatures(t_c, t_h, t_w, "carnot_cop");
    return t_c * (t_w - t_h) / (t_w * (t_h - t_c));
}

inline double carnot_efficiency(double t_c, double t_h) {
    if (!(t_c > 0.0) || !(t_c <= t_h) || !std::isfinite(t_h))
        throw DomainError("carnot_efficiency: require 0 < T_c <= T_h");
    return 1.0 - t_c / t_h;
}

/// Populations sorted descending placed on energies sorted ascending, in the H eigenbasis.
inline DensityMatrix passive_state(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.dim() != h.dim()) throw DomainError("passive_state: dimension mismatch");
    RealVector p = rho.eigenvalues().cwiseMax(0.0);
    std::sort(p.data(), p.data() + p.size(), std::greater<>());
    p /= p.sum();
    const auto spec = herm_eig(h);
    ComplexMatrix out = spec.eigenvectors * p.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out), 1e-10);
}

struct ErgotropyReport {
    double work = 0.0;
    DensityMatrix passive;
    double mean_energy = 0.0;
};

/// W = Tr{H (rho - pi(rho))}. Values within rounding of zero (a few ulps of
/// the spectral scale per level) are reported as exactly zero.
inline ErgotropyReport ergotropy(const DensityMatrix& rho, const HermitianOperator& h) {
    ErgotropyReport r;
    r.passive = passive_state(rho, h);
    r.mean_energy = expectation(h.matrix(), rho);
    const double w = r.mean_energy - expectation(h.matrix(), r.passive);
    const double scale = h.matrix().cwiseAbs().maxCoeff() * static_cast<double>(h.dim());
    r.work = w > 100.0 * std::numeric_limits<double>::epsilon() * scale ? w : 0.0;
    return r;
}

inline double ergotropy_change(const DensityMatrix& before, const DensityMatrix& after, const HermitianOperator& h) {
    return ergotropy(after, h).work - ergotropy(before, h).work;
}

/// E - 4 Delta E / sqrt(2 pi), the Gaussian-ladder asymptote.
inline double ladder_ergotropy_asymptotic(double energy, double spread) {
    if (!(energy >= 0.0) || !(spread >= 0.0)) throw DomainError("ladder_ergotropy_asymptotic: negative input");
    return energy - 4.0 * spread / std::sqrt(2.0 * std::numbers::pi);
}

/// Ergotropy of a diagonal state on an equally spaced ladder, energies n * spacing.
inline double diagonal_ergotropy(std::span<const double> populations, double spacing) {
    std::vector<double> sorted(populations.begin(), populations.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double w = 0.0;
    for (std::size_t n = 0; n < sorted.size(); ++n) w += static_cast<double>(n) * (populations[n] - sorted[n]);
    return std::max(0.0, w * spacing);
}

/// omega / ln(p0 / p1); +inf at equal populations, negative under inversion.
inline Temperature effective_temperature(double omega, double p0, double p1) {
    if (!(omega > 0.0)) throw DomainError("effective_temperature: omega must be positive");
    if (!(p0 >= 0.0) || !(p1 >= 0.0) || p0 + p1 == 0.0)
        throw DomainError("effective_temperature: populations must be non-negative");
    if (p0 == p1) return Temperature::from_inverse(0.0);
    const double beta = std::log(p0 / p1) / omega; // +-inf when one population vanishes
    return Temperature::from_inverse(beta);
}

} // namespace qam
