#pragma once

#include "hybridprop/model.hpp"
#include "hybridprop/trajectory.hpp"
#include "hybridprop/types.hpp"

namespace hybridprop {

struct MeanFieldState {
    QuantumState psi;
    ClassicalState classical;
    double time = 0.0;
};

struct MeanFieldDerivative {
    QuantumState dpsi;
    RealVector dq;
    RealVector dp;
};

/// Mean-field backreaction on the classical momenta,
///   F_j = -sum_k (df_k/dQ_j)(Q) Re<psi|A_k|psi>.
/// The expectation of a Hermitian operator is real; Re guards rounding.
RealVector hellmann_feynman_force(const HybridModel& model, const QuantumState& psi,
                                  const RealVector& q);

/// Coupled equations of motion:
///   dpsi/dt = (H_q + sum_k f_k(Q) A_k) psi / (i hbar)
///   dQ/dt   = P / m   (componentwise)
///   dP/dt   = hellmann_feynman_force - dV/dQ
MeanFieldDerivative meanfield_rhs(const HybridModel& model, const MeanFieldState& s);

/// Classical fixed-step RK4 over the joint (psi, Q, P) system. psi is never
/// renormalized; its norm is recorded per output row as a diagnostic.
/// Records t, Q, P, <psi|H_i(Q)|psi>, norm(psi), total energy.
Trajectory propagate_meanfield(const HybridModel& model, const MeanFieldState& init,
                               const IntegratorSpec& spec, double t_final,
                               const PropagationOptions& options = {});

} // namespace hybridprop
