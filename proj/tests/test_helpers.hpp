#pragma once

#include "hybridprop/operator_algebra.hpp"
#include "hybridprop/types.hpp"

#include <random>

namespace hybridprop::testing {

/// Seeded random Hermitian matrix with entries of order one.
inline HilbertOperator random_hermitian(Eigen::Index n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    HilbertOperator a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = u(rng);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            a(i, j) = Complex(u(rng), u(rng));
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

inline QuantumState random_state(Eigen::Index n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuantumState psi(n);
    for (Eigen::Index j = 0; j < n; ++j)
        psi(j) = Complex(u(rng), u(rng));
    psi.normalize();
    return psi;
}

/// Exact unitary built as a product of seeded complex Givens rotations.
inline HilbertOperator random_unitary(Eigen::Index n, std::mt19937& rng) {
    std::uniform_real_distribution<double> angle(0.0, 6.28318530717958648);
    HilbertOperator u = HilbertOperator::Identity(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double theta = angle(rng), phi = angle(rng);
        HilbertOperator g = HilbertOperator::Identity(n, n);
        g(i, i) = std::cos(theta);
        g(i, i + 1) = -std::sin(theta) * std::exp(Complex(0, phi));
        g(i + 1, i) = std::sin(theta) * std::exp(Complex(0, -phi));
        g(i + 1, i + 1) = std::cos(theta);
        u = g * u;
    }
    return u;
}

inline double max_abs(const HilbertOperator& a) {
    return a.cwiseAbs().maxCoeff();
}

} // namespace hybridprop::testing
