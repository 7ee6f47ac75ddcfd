#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace qctl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;

// Closed control interval [lo, hi] with lo < hi.
class Bounds {
public:
    Bounds(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    bool contains(double u) const noexcept { return u >= lo_ && u <= hi_; }
    double clip(double u) const noexcept;

private:
    double lo_;
    double hi_;
};

class BilinearSystem;

// Dense Hermitian matrix. Only constructible through validate_hermitian.
class HermitianOperator {
public:
    Eigen::Index dim() const noexcept { return m_.rows(); }
    const CMatrix& matrix() const noexcept { return m_; }

    // Spectral norm (largest |eigenvalue|).
    double norm() const;
    double min_eigenvalue() const;

    static HermitianOperator zero(Eigen::Index dim);
    static HermitianOperator identity(Eigen::Index dim);

private:
    explicit HermitianOperator(CMatrix m) : m_(std::move(m)) {}
    friend HermitianOperator validate_hermitian(CMatrix m, double tol);
    friend HermitianOperator hamiltonian(const BilinearSystem& sys, double u);

    CMatrix m_;
};

// Accepts m when max|m_ij - conj(m_ji)| <= tol. Never symmetrizes.
// Throws NonHermitian, or InvalidArgument for non-square / empty input.
HermitianOperator validate_hermitian(CMatrix m, double tol = kHermitianTol);

// dPsi/dt = -i (H0 + u H1) Psi, with u confined to bounds by the improvers.
class BilinearSystem {
public:
    BilinearSystem(HermitianOperator h0, HermitianOperator h1, Bounds bounds);

    Eigen::Index dim() const noexcept { return h0_.dim(); }
    const HermitianOperator& h0() const noexcept { return h0_; }
    const HermitianOperator& h1() const noexcept { return h1_; }
    const Bounds& bounds() const noexcept { return bounds_; }

    // [H0, H1] and H1^2, cached for the singular-arc formulas.
    const CMatrix& drift_commutator() const noexcept { return commutator_; }
    const CMatrix& coupling_squared() const noexcept { return h1_squared_; }

private:
    HermitianOperator h0_;
    HermitianOperator h1_;
    Bounds bounds_;
    CMatrix commutator_;
    CMatrix h1_squared_;
};

HermitianOperator hamiltonian(const BilinearSystem& sys, double u);

// Eigendecomposition of H(u) for one interval. Gives the exact propagator
// and the exact derivative of the interval's propagation with respect to u.
class SpectralStep {
public:
    SpectralStep(const BilinearSystem& sys, double u);

    const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }
    const CMatrix& eigenvectors() const noexcept { return vectors_; }

    // exp(-i H(u) dt)
    CMatrix propagator(double dt) const;

private:
    Eigen::VectorXd values_;
    CMatrix vectors_;
};

// exp(-i H(u) dt); throws InvalidArgument for dt <= 0, EigenFailure if the
// Hermitian eigensolver does not converge.
CMatrix step_propagator(const BilinearSystem& sys, double u, double dt);

CMatrix commutator(const HermitianOperator& p, const HermitianOperator& q);
CMatrix commutator(const CMatrix& p, const CMatrix& q);

}  // namespace qctl
