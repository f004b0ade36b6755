#pragma once

#include "hybridprop/operator_algebra.hpp"
#include "hybridprop/types.hpp"

#include <functional>
#include <vector>

namespace hybridprop {

/// Scalar function of the classical phase-space point, g(Q, P).
using PhaseSpaceFunction = std::function<double(const RealVector&, const RealVector&)>;
/// Gradient of such a function with respect to Q or P.
using PhaseSpaceGradient = std::function<RealVector(const RealVector&, const RealVector&)>;

/// One term g_j(Q,P) * B_j of a hybrid observable. Null gradients stand for
/// identically-zero ones (constant coefficient in that variable).
struct ObservableTerm {
    PhaseSpaceFunction coefficient;
    PhaseSpaceGradient grad_q;
    PhaseSpaceGradient grad_p;
    HilbertOperator operator_part;
};

/// Operator-valued function of classical phase space,
///   A(Q,P) = sum_j g_j(Q,P) B_j.
/// Heisenberg-evolved operators are represented with constant coefficients
/// (explicit phase-space dependence only), so for them the quasiclassical
/// bracket reduces to the plain commutator.
struct HybridObservable {
    Eigen::Index dim = 0;
    std::vector<ObservableTerm> terms;

    /// Observable with a single constant-coefficient term (g == 1).
    static HybridObservable constant(HilbertOperator op);
};

/// sum_j g_j(Q,P) B_j at the given phase-space point.
HilbertOperator evaluate(const HybridObservable& obs, const ClassicalState& c);

/// Quasiclassical bracket [A,B] + i hbar {A,B} at the phase-space point c.
/// The Poisson part pairs term coefficients,
///   {A,B} = sum_{j,l} (dg^A_j/dQ . dg^B_l/dP - dg^A_j/dP . dg^B_l/dQ) B^A_j B^B_l,
/// with the operator product in A-then-B order. Antisymmetry under exchange
/// of A and B therefore holds whenever all operator parts of A commute with
/// all operator parts of B; the shipped models stay inside that class.
HilbertOperator qc_bracket(const HybridObservable& a, const HybridObservable& b,
                           const ClassicalState& c, double hbar = 1.0);

/// (1/(i hbar)) [A, H]_qc — the right-hand side of the Heisenberg-like
/// equations of motion generated by the bracket.
HilbertOperator heisenberg_rhs_from_bracket(const HybridObservable& a, const HybridObservable& h,
                                            const ClassicalState& c, double hbar);

/// Central-difference check of all analytic term gradients (step 1e-5,
/// seeded sample points, 1e-6 relative). Throws on disagreement.
void validate_observable_gradients(const HybridObservable& obs, Eigen::Index classical_dim);

} // namespace hybridprop
