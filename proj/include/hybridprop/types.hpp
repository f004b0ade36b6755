#pragma once

#include <Eigen/Dense>
#include <complex>

namespace hybridprop {

using Complex = std::complex<double>;

/// Dense quantum observable / Hamiltonian term / propagator in a fixed
/// orthonormal basis. Hermiticity and unitarity are contract requirements
/// checked at API boundaries, not encoded in the type.
using HilbertOperator = Eigen::MatrixXcd;

/// State vector of the quantum subsystem (components in the same basis).
using QuantumState = Eigen::VectorXcd;

using RealVector = Eigen::VectorXd;

/// Phase-space point of the classical subsystem.
struct ClassicalState {
    RealVector q;
    RealVector p;

    ClassicalState() = default;
    ClassicalState(RealVector q_, RealVector p_) : q(std::move(q_)), p(std::move(p_)) {}

    /// Convenience constructor for the single-mode case.
    ClassicalState(double q0, double p0) : q(1), p(1) {
        q(0) = q0;
        p(0) = p0;
    }

    Eigen::Index dim() const { return q.size(); }
};

} // namespace hybridprop
