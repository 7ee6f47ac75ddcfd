#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qctl/objective.hpp"

namespace qctl::testing {

inline constexpr double kPi = std::numbers::pi;

inline CMatrix sigma_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline CMatrix sigma_y() {
    CMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline CMatrix sigma_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline CVector basis(Eigen::Index n, Eigen::Index i) {
    CVector v = CVector::Zero(n);
    v(i) = 1.0;
    return v;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    // Hermitian matrix with spectral norm scaled to `scale`.
    CMatrix hermitian(Eigen::Index n, double scale) {
        CMatrix a(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(normal(), normal());
        CMatrix h = 0.5 * (a + a.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
        const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
        h *= scale / norm;
        return 0.5 * (h + h.adjoint()).eval();
    }

    CVector unit_state(Eigen::Index n) {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(), normal());
        return v / v.norm();
    }

    // Projector onto a random rank-r subspace.
    HermitianOperator projector(Eigen::Index n, Eigen::Index rank) {
        CMatrix a(n, rank);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = Complex(normal(), normal());
        Eigen::HouseholderQR<CMatrix> qr(a);
        const CMatrix q = qr.householderQ() * CMatrix::Identity(n, rank);
        std::vector<CVector> states;
        for (Eigen::Index j = 0; j < rank; ++j) states.push_back(q.col(j));
        return projector_from_states(states, n);
    }

    std::vector<double> controls(std::size_t n, double lo, double hi) {
        std::vector<double> u(n);
        for (double& x : u) x = uniform(lo, hi);
        return u;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Random instance: n-level system, projector objective, bounds [-1, 1].
inline ControlProblem random_problem(Rng& rng, Eigen::Index n, double beta, double h_scale = 1.0) {
    BilinearSystem sys(validate_hermitian(rng.hermitian(n, h_scale)),
                       validate_hermitian(rng.hermitian(n, h_scale)), Bounds(-1.0, 1.0));
    const Eigen::Index rank = std::max<Eigen::Index>(1, n / 2);
    return ControlProblem(std::move(sys), Objective(rng.projector(n, rank), beta),
                          rng.unit_state(n));
}

// Drift-free two-level transfer |0> -> |1> with H = u sigma_x.
inline ControlProblem pulse_area_problem(double lo, double hi, double beta) {
    BilinearSystem sys(validate_hermitian(CMatrix::Zero(2, 2)), validate_hermitian(sigma_x()),
                       Bounds(lo, hi));
    const int target[] = {1};
    return ControlProblem(std::move(sys), Objective(projector_from_indices(target, 2), beta),
                          basis(2, 0));
}

// Detuned two-level system H = sigma_z / 2 + u sigma_x on [-1, 1].
inline ControlProblem detuned_problem(double beta = 0.0) {
    BilinearSystem sys(validate_hermitian(0.5 * sigma_z()), validate_hermitian(sigma_x()),
                       Bounds(-1.0, 1.0));
    const int target[] = {1};
    return ControlProblem(std::move(sys), Objective(projector_from_indices(target, 2), beta),
                          basis(2, 0));
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

}  // namespace qctl::testing
