#include "qctl/operator.hpp"

#include <cmath>
#include <string>

#include "qctl/errors.hpp"

namespace qctl {

NonHermitian::NonHermitian(double max_deviation)
    : Error("operator is not Hermitian (max deviation " + std::to_string(max_deviation) + ")"),
      max_deviation_(max_deviation) {}

NormDrift::NormDrift(double drift)
    : Error("state norm drifted by " + std::to_string(drift)), drift_(drift) {}

NotOrthonormal::NotOrthonormal(double max_gram_deviation)
    : Error("states are not orthonormal (max Gram deviation " +
            std::to_string(max_gram_deviation) + ")"),
      deviation_(max_gram_deviation) {}

NoImprovement::NoImprovement(double gradient_norm, double max_abs_k1, int trials)
    : Error("line search found no decrease after " + std::to_string(trials) +
            " trials (gradient norm " + std::to_string(gradient_norm) + ", max|K1| " +
            std::to_string(max_abs_k1) + ")"),
      gradient_norm_(gradient_norm),
      max_abs_k1_(max_abs_k1),
      trials_(trials) {}

MonotonicityFailure::MonotonicityFailure(double j_before, double j_after, double last_theta)
    : Error("Krotov sweep increased J from " + std::to_string(j_before) + " to " +
            std::to_string(j_after) + " (damping exhausted at theta " +
            std::to_string(last_theta) + "); grid may be too coarse"),
      j_before_(j_before),
      j_after_(j_after),
      last_theta_(last_theta) {}

Bounds::Bounds(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) {
        throw InvalidArgument("control bounds require a < b");
    }
}

double Bounds::clip(double u) const noexcept {
    if (u < lo_) return lo_;
    if (u > hi_) return hi_;
    return u;
}

double HermitianOperator::norm() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double HermitianOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
    return HermitianOperator(CMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
    return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator validate_hermitian(CMatrix m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvalidArgument("operator must be a non-empty square matrix");
    }
    const double deviation = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (!(deviation <= tol)) {
        throw NonHermitian(deviation);
    }
    return HermitianOperator(std::move(m));
}

BilinearSystem::BilinearSystem(HermitianOperator h0, HermitianOperator h1, Bounds bounds)
    : h0_(std::move(h0)), h1_(std::move(h1)), bounds_(bounds) {
    if (h0_.dim() != h1_.dim()) {
        throw DimensionMismatch("drift and coupling operators differ in dimension");
    }
    commutator_ = commutator(h0_, h1_);
    h1_squared_ = h1_.matrix() * h1_.matrix();
}

HermitianOperator hamiltonian(const BilinearSystem& sys, double u) {
    // A real combination of validated Hermitian operators needs no re-check.
    return HermitianOperator(sys.h0().matrix() + u * sys.h1().matrix());
}

SpectralStep::SpectralStep(const BilinearSystem& sys, double u) {
    const CMatrix h = sys.h0().matrix() + u * sys.h1().matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) {
        throw EigenFailure("Hermitian eigendecomposition did not converge");
    }
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

CMatrix SpectralStep::propagator(double dt) const {
    const Eigen::Index n = values_.size();
    CVector phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phases(i) = std::polar(1.0, -values_(i) * dt);
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

CMatrix step_propagator(const BilinearSystem& sys, double u, double dt) {
    if (!(dt > 0.0)) {
        throw InvalidArgument("step_propagator requires dt > 0");
    }
    return SpectralStep(sys, u).propagator(dt);
}

CMatrix commutator(const CMatrix& p, const CMatrix& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) {
        throw DimensionMismatch("commutator operands differ in dimension");
    }
    return p * q - q * p;
}

CMatrix commutator(const HermitianOperator& p, const HermitianOperator& q) {
    return commutator(p.matrix(), q.matrix());
}

}  // namespace qctl
