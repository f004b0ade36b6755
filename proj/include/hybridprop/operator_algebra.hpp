#pragma once

#include "hybridprop/types.hpp"

#include <string>

namespace hybridprop {

// ---------------------------------------------------------------------------
// Defect measures and contract checks
// ---------------------------------------------------------------------------

/// max_{ij} |A_ij - conj(A_ji)|
double hermiticity_defect(const HilbertOperator& a);

/// max-entry norm of (U^dag U - I)
double unitarity_defect(const HilbertOperator& u);

/// |sum_j |psi_j|^2 - 1|
double norm_defect(const QuantumState& psi);

void require_square(const HilbertOperator& a, const std::string& name);
void require_same_dim(const HilbertOperator& a, const HilbertOperator& b);
void require_same_dim(const HilbertOperator& a, const QuantumState& psi);
void require_hermitian(const HilbertOperator& a, double tol = 1e-12,
                       const std::string& name = "operator");
void require_unitary(const HilbertOperator& u, double tol,
                     const std::string& name = "operator");
void require_normalized(const QuantumState& psi, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

/// AB - BA. Anti-Hermitian when A and B are Hermitian.
HilbertOperator commutator(const HilbertOperator& a, const HilbertOperator& b);

/// <psi|A|psi>. Imaginary part is rounding-level when A is Hermitian.
Complex expectation(const HilbertOperator& a, const QuantumState& psi);

/// U^dag A U. Throws if U fails the unitarity check at `unitary_tol`.
HilbertOperator conjugate_by_unitary(const HilbertOperator& a, const HilbertOperator& u,
                                     double unitary_tol = 1e-8);

// ---------------------------------------------------------------------------
// Stock operators
// ---------------------------------------------------------------------------

HilbertOperator identity_operator(Eigen::Index n);
HilbertOperator pauli_x();
HilbertOperator pauli_y();
HilbertOperator pauli_z();

/// Ladder operator a on the lowest n number states: <k-1|a|k> = sqrt(k).
HilbertOperator lowering_operator(Eigen::Index n);

/// Position operator sqrt(hbar/(2 m omega)) (a + a^dag) on a truncated
/// number basis. Truncation perturbs the canonical commutator at the top
/// level only.
HilbertOperator position_operator(Eigen::Index n, double mass, double omega, double hbar);

/// Momentum operator i sqrt(hbar m omega / 2) (a^dag - a), same truncation.
HilbertOperator momentum_operator(Eigen::Index n, double mass, double omega, double hbar);

} // namespace hybridprop
