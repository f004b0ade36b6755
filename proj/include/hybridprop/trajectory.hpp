#pragma once

#include "hybridprop/types.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybridprop {

enum class IntegrationMethod { Rk4 };

struct IntegratorSpec {
    IntegrationMethod method = IntegrationMethod::Rk4;
    double dt = 1e-3;
    int output_stride = 1;
};

void require_valid(const IntegratorSpec& spec);

struct PropagationOptions {
    /// Store the full quantum payload (state or propagator) at every output
    /// row, enabling post-hoc finite-difference checks.
    bool dense_output = false;
    /// Hold the classical phase-space point fixed so purely quantum
    /// identities can be asserted exactly.
    bool freeze_classical = false;
};

/// One output-grid sample. The fifth column doubles as state norm
/// (mean-field runs) or unitarity/Hermiticity defect (Heisenberg runs).
struct TrajectoryRow {
    double t = 0.0;
    RealVector q;
    RealVector p;
    double interaction_energy = 0.0;
    double norm_or_defect = 0.0;
    double total_energy = 0.0;
};

struct Trajectory {
    std::string scheme;
    double dt = 0.0;
    int output_stride = 1;
    bool frozen_classical = false;
    /// Set when the unitarity defect exceeded 1e-6 at any output row.
    bool accuracy_warning = false;

    std::vector<TrajectoryRow> rows;

    /// The ket the run started from (also the fixed |t0> of Heisenberg runs).
    QuantumState initial_ket;
    /// Dense payloads, one entry per row when dense output was requested.
    std::vector<QuantumState> states;         // mean-field psi(t)
    std::vector<HilbertOperator> propagators; // Heisenberg-unitary U(t)

    /// Final integrator variables, whatever the scheme evolved.
    QuantumState final_psi;
    HilbertOperator final_propagator;
    std::vector<HilbertOperator> final_operators;
    ClassicalState final_classical;
    double final_time = 0.0;

    bool dense() const { return !states.empty() || !propagators.empty(); }
};

/// Thrown when a propagation produces a non-finite value. Carries the rows
/// recorded before the failure so partial output can be preserved.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::string scheme, long step, Trajectory partial);

    std::string scheme;
    long step;
    Trajectory partial;
};

/// CSV schema: t,Q_1..Q_M,P_1..P_M,E_interaction,norm_or_unitarity_defect,
/// total_energy — header mandatory, floats with 17 significant digits so a
/// reload reproduces the doubles exactly.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
std::string trajectory_csv(const Trajectory& traj);

/// Parses rows written by write_trajectory_csv (header required).
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in);

} // namespace hybridprop
