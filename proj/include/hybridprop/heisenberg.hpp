#pragma once

#include "hybridprop/model.hpp"
#include "hybridprop/trajectory.hpp"
#include "hybridprop/types.hpp"

#include <vector>

namespace hybridprop {

/// Two interchangeable realizations of the bracket-generated dynamics.
///
/// Unitary mode integrates one propagator U(t) with the Schrodinger-picture
/// generator and obtains Heisenberg operators by conjugation, O(N^3) per step
/// for a single matrix. OperatorOde mode integrates every needed operator
/// directly through its commutator equation of motion — the literal
/// transcription of the Heisenberg-like equations, one matrix per tracked
/// operator. Cross-agreement of the two modes is itself a correctness check.
enum class HeisenbergMode { Unitary, OperatorOde };

struct HeisenbergState {
    HeisenbergMode mode = HeisenbergMode::Unitary;
    /// Unitary mode: the evolving propagator, identity at t0.
    HilbertOperator propagator;
    /// OperatorOde mode: evolved copies of H_q (index 0), each coupling
    /// operator A_k (indices 1..K), then any tracked coordinate operators.
    std::vector<HilbertOperator> heisenberg_ops;
    int tracked_coordinate_ops = 0;
    ClassicalState classical;
    /// The fixed initial wavevector |t0> over which expectations are taken.
    QuantumState initial_ket;
    double time = 0.0;
};

/// Initial state with the pictures coinciding at t0: U = identity,
/// heisenberg_ops = the Schrodinger-picture matrices.
HeisenbergState make_heisenberg_state(const HybridModel& model, const QuantumState& initial_ket,
                                      const ClassicalState& classical, HeisenbergMode mode,
                                      bool track_coordinate_ops = false);

struct HeisenbergDerivative {
    HilbertOperator dpropagator;
    std::vector<HilbertOperator> dops;
    RealVector dq;
    RealVector dp;
};

/// Backreaction on the classical momenta,
///   F_j = -sum_k (df_k/dQ_j)(Q_h) <t0| A_k,h(t) |t0>,
/// with A_k,h = U^dag A_k U (unitary mode, evaluated as an expectation in
/// U|t0>) or the directly evolved matrix (operator mode). Coincides with the
/// Hellmann-Feynman force at t0.
RealVector heisenberg_backreaction_force(const HybridModel& model, const HeisenbergState& s);

/// Unitary mode:    dU/dt  = (H_q + sum_k f_k(Q_h) A_k) U / (i hbar)
/// Operator mode:   dX/dt  = [X, H_q,h + sum_k f_k(Q_h) A_k,h] / (i hbar)
///                  for every tracked operator X (the quasiclassical bracket
///                  reduces to the commutator for constant coefficients)
/// Both modes:      dQ/dt  = P/m,   dP/dt = backreaction force - dV/dQ
HeisenbergDerivative heisenberg_rhs(const HybridModel& model, const HeisenbergState& s);

/// RK4 over (U or operator set, Q_h, P_h). Records t, Q_h, P_h,
/// E_h = sum_k f_k(Q_h) <t0|A_k,h|t0>, the unitarity (or max Hermiticity)
/// defect, and <t0|H_q,h + H_i,h|t0> + T(P_h) + V(Q_h). A unitarity defect
/// above 1e-6 sets the trajectory's accuracy-warning flag.
Trajectory propagate_heisenberg(const HybridModel& model, const HeisenbergState& init,
                                const IntegratorSpec& spec, double t_final,
                                const PropagationOptions& options = {});

/// Same dynamics, but the backreaction replaces the operator expectation of
/// H_i with the scalar coupling evaluated at qbar = <t0|qhat_h(t)|t0>: the
/// force is -sum_k (df_k/dQ) a_k(qbar) where a_k is the coupling operator
/// written as a function of the coordinate. Identical to the main scheme for
/// couplings linear in qhat; genuinely different once the coupling is
/// nonlinear and the state has spread.
Trajectory propagate_alternative(const HybridModel& model, const HeisenbergState& init,
                                 const IntegratorSpec& spec, double t_final,
                                 const PropagationOptions& options = {});

} // namespace hybridprop
