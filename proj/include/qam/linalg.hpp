// linalg.hpp — Dense complex linear algebra for small machine Hilbert spaces

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qam {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Absolute tolerance used for Hermiticity, trace and positivity checks.
inline constexpr double kStateTolerance = 1e-12;

/// Thrown when an input violates a documented precondition.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot produce a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool all_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

inline double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace detail

/// Energy-valued observable (frequency units, hbar = 1).
class HermitianOperator {
public:
    HermitianOperator() = default;

    explicit HermitianOperator(ComplexMatrix m, double tolerance = kStateTolerance)
        : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw DomainError("HermitianOperator: matrix must be square and non-empty");
        if (!detail::all_finite(m_))
            throw DomainError("HermitianOperator: non-finite entry");
        const double defect = detail::hermiticity_defect(m_);
        if (defect > tolerance)
            throw DomainError("HermitianOperator: not Hermitian (defect " + std::to_string(defect) + ")");
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    Index dim() const noexcept { return m_.rows(); }

private:
    ComplexMatrix m_;
};

struct SpectralDecomposition {
    RealVector eigenvalues;    // ascending
    ComplexMatrix eigenvectors; // orthonormal columns
};

/// Eigendecomposition of a Hermitian matrix with deterministic phases and
/// degenerate ordering.
///
/// Each eigenvector is rotated so that its largest-magnitude component is real
/// and positive (ties resolved by lowest index). Within a degenerate cluster
/// (eigenvalues within 1e-12 * max(1, |spectrum|)), vectors are ordered by the
/// real part of their first non-negligible component, descending.
inline SpectralDecomposition herm_eig(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericalError("herm_eig: eigensolver did not converge");

    RealVector values = solver.eigenvalues();
    ComplexMatrix vectors = solver.eigenvectors();
    const Index n = values.size();

    for (Index k = 0; k < n; ++k) {
        Index pivot = 0;
        double best = -1.0;
        for (Index i = 0; i < n; ++i) {
            const double a = std::abs(vectors(i, k));
            if (a > best * (1.0 + 1e-12) + 1e-15) {
                best = a;
                pivot = i;
            }
        }
        const Complex phase = vectors(pivot, k) / std::abs(vectors(pivot, k));
        vectors.col(k) *= std::conj(phase);
    }

    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    const double tie = 1e-12 * scale;
    auto lead = [&](Index k) {
        for (Index i = 0; i < n; ++i)
            if (std::abs(vectors(i, k)) > 1e-10) return vectors(i, k).real();
        return 0.0;
    };

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    Index start = 0;
    while (start < n) {
        Index stop = start + 1;
        while (stop < n && values(stop) - values(stop - 1) <= tie) ++stop;
        std::stable_sort(order.begin() + start, order.begin() + stop,
                         [&](Index a, Index b) { return lead(a) > lead(b); });
        start = stop;
    }

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
        out.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

/// Trace-one positive semidefinite Hermitian operator.
class DensityMatrix {
public:
    DensityMatrix() = default;

    explicit DensityMatrix(ComplexMatrix m, double tolerance = kStateTolerance) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw DomainError("DensityMatrix: matrix must be square and non-empty");
        if (!detail::all_finite(m_)) throw DomainError("DensityMatrix: non-finite entry");
        const double defect = detail::hermiticity_defect(m_);
        if (defect > tolerance)
            throw DomainError("DensityMatrix: not Hermitian (defect " + std::to_string(defect) + ")");
        const double tr_err = std::abs(m_.trace() - Complex{1.0, 0.0});
        if (tr_err > tolerance)
            throw DomainError("DensityMatrix: trace differs from one by " + std::to_string(tr_err));
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_, Eigen::EigenvaluesOnly);
        const double lowest = solver.eigenvalues()(0);
        if (lowest < -tolerance)
            throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(lowest));
    }

    /// Pure state |psi><psi| from a normalised vector.
    static DensityMatrix pure(const ComplexVector& psi) {
        const double norm = psi.norm();
        if (norm == 0.0) throw DomainError("DensityMatrix::pure: zero vector");
        const ComplexVector v = psi / norm;
        return DensityMatrix(v * v.adjoint());
    }

    /// Diagonal state from a probability vector.
    static DensityMatrix diagonal(std::span<const double> populations) {
        ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(populations.size()),
                                              static_cast<Index>(populations.size()));
        for (std::size_t i = 0; i < populations.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = populations[i];
        return DensityMatrix(std::move(m));
    }

    /// Gibbs state exp(-H/T)/Z.
    static DensityMatrix gibbs(const HermitianOperator& h, double temperature) {
        if (!(temperature > 0.0)) throw DomainError("DensityMatrix::gibbs: temperature must be positive");
        const auto spec = herm_eig(h);
        const double e0 = spec.eigenvalues(0);
        RealVector w = (-(spec.eigenvalues.array() - e0) / temperature).exp();
        w /= w.sum();
        ComplexMatrix m = spec.eigenvectors * w.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
        m = 0.5 * (m + m.adjoint()).eval();
        return DensityMatrix(std::move(m));
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    Index dim() const noexcept { return m_.rows(); }

    RealVector eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }

    double population(Index i) const { return m_(i, i).real(); }

private:
    ComplexMatrix m_;
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
    if (factors.size() == 0) return ComplexMatrix::Identity(1, 1);
    auto it = factors.begin();
    ComplexMatrix out = *it++;
    for (; it != factors.end(); ++it) out = kron(out, *it);
    return out;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b - b * a;
}

/// exp(scale * m) by scaling and squaring with a degree-13 Pade approximant.
///
/// Throws NumericalError when the scaled norm is not finite or the result
/// overflows.
inline ComplexMatrix matrix_exp(const ComplexMatrix& m, Complex scale = Complex{1.0, 0.0}) {
    if (m.rows() != m.cols()) throw DomainError("matrix_exp: matrix must be square");
    const Index n = m.rows();
    const ComplexMatrix a = scale * m;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm1)) throw NumericalError("matrix_exp: non-finite norm");
    if (norm1 == 0.0) return ComplexMatrix::Identity(n, n);

    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    int squarings = 0;
    if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    if (squarings > 1000) throw NumericalError("matrix_exp: norm too large");
    const ComplexMatrix s = a / std::ldexp(1.0, squarings);

    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix s2 = s * s;
    const ComplexMatrix s4 = s2 * s2;
    const ComplexMatrix s6 = s4 * s2;
    const ComplexMatrix u_inner = b[13] * s6 + b[11] * s4 + b[9] * s2;
    const ComplexMatrix u = s * (s6 * u_inner + b[7] * s6 + b[5] * s4 + b[3] * s2 + b[1] * id);
    const ComplexMatrix v_inner = b[12] * s6 + b[10] * s4 + b[8] * s2;
    const ComplexMatrix v = s6 * v_inner + b[6] * s6 + b[4] * s4 + b[2] * s2 + b[0] * id;

    ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = (r * r).eval();
    if (!r.allFinite()) throw NumericalError("matrix_exp: result overflowed");
    return r;
}

/// Reduced state of subsystem `keep` for a tensor product of `dims`.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Index> dims, std::size_t keep) {
    if (dims.empty() || keep >= dims.size()) throw DomainError("partial_trace: subsystem index out of range");
    Index total = 1;
    for (Index d : dims) {
        if (d <= 0) throw DomainError("partial_trace: subsystem dimensions must be positive");
        total *= d;
    }
    if (total != rho.dim()) throw DomainError("partial_trace: product of dims does not match state dimension");

    Index before = 1;
    for (std::size_t i = 0; i < keep; ++i) before *= dims[i];
    const Index kept = dims[keep];
    const Index after = total / (before * kept);

    const ComplexMatrix& m = rho.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(kept, kept);
    for (Index a = 0; a < before; ++a)
        for (Index c = 0; c < after; ++c)
            for (Index i = 0; i < kept; ++i)
                for (Index j = 0; j < kept; ++j)
                    out(i, j) += m((a * kept + i) * after + c, (a * kept + j) * after + c);
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out), 1e-10);
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Index> dims, std::size_t keep) {
    const std::vector<Index> d(dims);
    return partial_trace(rho, std::span<const Index>(d), keep);
}

/// -sum lambda ln lambda in nats; eigenvalues below 1e-12 contribute nothing.
inline double von_neumann_entropy(const DensityMatrix& rho) {
    const RealVector lambda = rho.eigenvalues();
    double s = 0.0;
    for (Index i = 0; i < lambda.size(); ++i) {
        const double l = lambda(i);
        if (l > kStateTolerance) s -= l * std::log(l);
    }
    return s;
}

inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    const ComplexMatrix diff = a - b;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_distance(a.matrix(), b.matrix());
}

inline double expectation(const ComplexMatrix& op, const DensityMatrix& rho) {
    return (op * rho.matrix()).trace().real();
}

/// Column-stacking vectorisation: vec(A)[i + n*j] = A(i, j).
inline ComplexVector vec(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Index n) {
    if (v.size() != n * n) throw DomainError("unvec: size mismatch");
    return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

// Standard single-mode operators.
namespace ops {

inline ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

/// sigma^- = |0><1| with |0> the ground state.
inline ComplexMatrix sigma_minus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

inline ComplexMatrix sigma_plus() { return sigma_minus().adjoint(); }

inline ComplexMatrix sigma_x() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

inline ComplexMatrix sigma_y() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = -kI;
    m(1, 0) = kI;
    return m;
}

inline ComplexMatrix sigma_z() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

/// Truncated bosonic annihilation operator on `levels` states.
inline ComplexMatrix annihilation(Index levels) {
    ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
    for (Index n = 1; n < levels; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

/// Equal-amplitude ladder lowering operator sum_n |n><n+1|.
inline ComplexMatrix ladder_lowering(Index levels) {
    ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
    for (Index n = 1; n < levels; ++n) m(n - 1, n) = 1.0;
    return m;
}

/// |i><j| on an n-dimensional space.
inline ComplexMatrix outer(Index n, Index i, Index j) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

/// Operator acting as `op` on factor `site` of a product space, identity elsewhere.
inline ComplexMatrix embed(const ComplexMatrix& op, std::span<const Index> dims, std::size_t site) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (std::size_t i = 0; i < dims.size(); ++i)
        out = kron(out, i == site ? op : ComplexMatrix::Identity(dims[i], dims[i]));
    return out;
}

} // namespace ops

} // namespace qam
