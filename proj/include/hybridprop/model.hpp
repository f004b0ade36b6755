#pragma once

#include "hybridprop/operator_algebra.hpp"
#include "hybridprop/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hybridprop {

/// Scalar function of the classical coordinates, f(Q).
using CoordinateFunction = std::function<double(const RealVector&)>;
/// Gradient df/dQ, returned as an M-vector.
using CoordinateGradient = std::function<RealVector(const RealVector&)>;

/// One separable interaction term f_k(Q) * A_k. The analytic gradient must
/// agree with a central finite difference of the coefficient; this is checked
/// when a model is validated.
struct CouplingTerm {
    CoordinateFunction coefficient;
    CoordinateGradient gradient;
    HilbertOperator operator_part;

    /// The operator part written as a scalar function of the expectation of
    /// the designated coordinate operator (e.g. qbar for a linear coupling,
    /// qbar^2 for a quadratic one). Only the alternative-backreaction scheme
    /// needs it; empty otherwise.
    std::function<double(double)> scalarized_operator;
};

/// Classical Hamiltonian H_c = sum_j P_j^2 / (2 m_j) + V(Q).
struct ClassicalHamiltonianSpec {
    RealVector masses;
    CoordinateFunction potential;
    CoordinateGradient potential_gradient;
};

/// The hybrid Hamiltonian as data: quantum part H_q, classical part H_c, and
/// interaction sum_k f_k(Q) A_k. Immutable after construction; safe to share
/// across concurrent trajectory runs.
struct HybridModel {
    HilbertOperator quantum_hamiltonian;
    ClassicalHamiltonianSpec classical;
    std::vector<CouplingTerm> coupling;
    /// Designated coordinate operators (q-hat); needed only by the
    /// alternative-backreaction scheme.
    std::vector<HilbertOperator> coordinate_ops;
    double hbar = 1.0;

    Eigen::Index dim() const { return quantum_hamiltonian.rows(); }
    Eigen::Index classical_dim() const { return classical.masses.size(); }

    /// sum_k f_k(Q) A_k at the given classical coordinates.
    HilbertOperator interaction_operator(const RealVector& q) const;
    /// H_q + sum_k f_k(Q) A_k.
    HilbertOperator quantum_generator(const RealVector& q) const;
    double kinetic_energy(const RealVector& p) const;
};

/// Checks Hermiticity of all operator blocks, positivity of masses and hbar,
/// dimension consistency, and agreement of every analytic gradient with a
/// central finite difference (step 1e-5, 10 seeded sample points, 1e-6
/// relative). Throws on the first violation.
void validate_model(const HybridModel& model);

/// Two-level system coupled to one classical oscillator:
///   H_q = (epsilon/2) sigma_z + (delta/2) sigma_x
///   H_c = P^2/(2m) + (1/2) m omega^2 Q^2
///   H_i = gamma Q sigma_z
HybridModel build_spin_oscillator(double epsilon, double delta, double mass, double omega,
                                  double gamma, double hbar = 1.0);

/// Truncated quantum oscillator coupled to one classical oscillator:
///   H_q = hbar omega_q (a^dag a + 1/2) on n number states
///   H_c = P^2/(2 m_c) + (1/2) m_c omega_c^2 Q^2
///   H_i = lambda Q qhat        (nonlinear == false)
///         lambda Q qhat^2      (nonlinear == true)
/// with qhat = sqrt(hbar/(2 m_q omega_q)) (a + a^dag). The model designates
/// qhat as its coordinate operator.
HybridModel build_oscillator_oscillator(int n, double omega_q, double mass_q, double mass_c,
                                        double omega_c, double lambda, bool nonlinear,
                                        double hbar = 1.0);

/// <psi| H_q + H_i(Q) |psi> + T(P) + V(Q).
double total_meanfield_energy(const HybridModel& model, const QuantumState& psi,
                              const ClassicalState& c);

/// Builds a model from a JSON config. Required key "model" selects the
/// builder; remaining keys bind its parameters. Unknown keys are rejected
/// with the offending key path in the message.
HybridModel load_model(const std::string& config_text);
HybridModel load_model_file(const std::string& path);

} // namespace hybridprop
