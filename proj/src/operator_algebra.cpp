#include "hybridprop/operator_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridprop {

double hermiticity_defect(const HilbertOperator& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const HilbertOperator& u) {
    HilbertOperator gram = u.adjoint() * u;
    gram.diagonal().array() -= 1.0;
    return gram.cwiseAbs().maxCoeff();
}

double norm_defect(const QuantumState& psi) {
    return std::abs(psi.squaredNorm() - 1.0);
}

void require_square(const HilbertOperator& a, const std::string& name) {
    if (a.rows() != a.cols())
        throw std::invalid_argument(name + " must be square, got " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    if (a.rows() == 0)
        throw std::invalid_argument(name + " must have positive dimension");
}

void require_same_dim(const HilbertOperator& a, const HilbertOperator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("operator dimension mismatch: " +
                                    std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
}

void require_same_dim(const HilbertOperator& a, const QuantumState& psi) {
    if (a.cols() != psi.size())
        throw std::invalid_argument("operator/state dimension mismatch: " +
                                    std::to_string(a.cols()) + " vs " + std::to_string(psi.size()));
}

void require_hermitian(const HilbertOperator& a, double tol, const std::string& name) {
    require_square(a, name);
    const double defect = hermiticity_defect(a);
    if (!(defect <= tol))
        throw std::runtime_error(name + " is not Hermitian: defect " + std::to_string(defect) +
                                 " exceeds tolerance " + std::to_string(tol));
}

void require_unitary(const HilbertOperator& u, double tol, const std::string& name) {
    require_square(u, name);
    const double defect = unitarity_defect(u);
    if (!(defect <= tol))
        throw std::runtime_error(name + " is not unitary: defect " + std::to_string(defect) +
                                 " exceeds tolerance " + std::to_string(tol));
}

void require_normalized(const QuantumState& psi, double tol) {
    if (psi.size() == 0)
        throw std::invalid_argument("state must have positive dimension");
    const double defect = norm_defect(psi);
    if (!(defect <= tol))
        throw std::invalid_argument("state is not normalized: |norm^2 - 1| = " +
                                    std::to_string(defect));
}

HilbertOperator commutator(const HilbertOperator& a, const HilbertOperator& b) {
    require_square(a, "commutator argument A");
    require_square(b, "commutator argument B");
    require_same_dim(a, b);
    return a * b - b * a;
}

Complex expectation(const HilbertOperator& a, const QuantumState& psi) {
    require_square(a, "expectation argument");
    require_same_dim(a, psi);
    // Eigen's dot conjugates the left factor: psi.dot(x) = <psi|x>.
    return psi.dot(a * psi);
}

HilbertOperator conjugate_by_unitary(const HilbertOperator& a, const HilbertOperator& u,
                                     double unitary_tol) {
    require_square(a, "conjugation argument");
    require_same_dim(a, u);
    require_unitary(u, unitary_tol, "conjugating operator");
    return u.adjoint() * a * u;
}

HilbertOperator identity_operator(Eigen::Index n) {
    return HilbertOperator::Identity(n, n);
}

HilbertOperator pauli_x() {
    HilbertOperator s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

HilbertOperator pauli_y() {
    HilbertOperator s(2, 2);
    s << 0, Complex(0, -1), Complex(0, 1), 0;
    return s;
}

HilbertOperator pauli_z() {
    HilbertOperator s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

HilbertOperator lowering_operator(Eigen::Index n) {
    HilbertOperator a = HilbertOperator::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k)
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

HilbertOperator position_operator(Eigen::Index n, double mass, double omega, double hbar) {
    const double scale = std::sqrt(hbar / (2.0 * mass * omega));
    const HilbertOperator a = lowering_operator(n);
    return scale * (a + a.adjoint());
}

HilbertOperator momentum_operator(Eigen::Index n, double mass, double omega, double hbar) {
    const double scale = std::sqrt(hbar * mass * omega / 2.0);
    const HilbertOperator a = lowering_operator(n);
    return Complex(0, 1) * scale * (a.adjoint() - a);
}

} // namespace hybridprop
