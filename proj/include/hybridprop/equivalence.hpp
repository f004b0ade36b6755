#pragma once

#include "hybridprop/heisenberg.hpp"
#include "hybridprop/meanfield.hpp"
#include "hybridprop/model.hpp"
#include "hybridprop/trajectory.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hybridprop {

/// Max-over-grid deviations between the two schemes' records of Q, P and the
/// interaction energy. time_of_max is the grid time where the largest of the
/// three deviations occurred.
struct DeviationReport {
    double max_abs_delta_q = 0.0;
    double max_abs_delta_p = 0.0;
    double max_abs_delta_e = 0.0;
    double time_of_max = 0.0;
    long grid_points = 0;
};

/// Runs the mean-field scheme and the Heisenberg scheme from identical
/// initial data (same dt, same stride) and reports the deviations of the
/// records. The Heisenberg side defaults to the operator-ODE realization —
/// the literal operator equations — so the comparison pits two genuinely
/// different discretizations of the same exact flow against each other.
/// With `concurrent` the two propagations run as independent tasks; the
/// report is bitwise independent of that choice.
DeviationReport compare_schemes(const HybridModel& model, const QuantumState& initial_psi,
                                const ClassicalState& initial_classical, const IntegratorSpec& spec,
                                double t_final,
                                HeisenbergMode mode = HeisenbergMode::OperatorOde,
                                bool concurrent = false);

struct ConvergencePoint {
    double dt = 0.0;
    DeviationReport report;
};

struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;
    /// Least-squares slope of log(max deviation) versus log(dt), using only
    /// points above the rounding floor.
    double fitted_slope = 0.0;
    bool slope_fit_valid = false;
    /// Non-monotonicity and floor diagnostics; findings, not exceptions.
    std::vector<std::string> findings;
};

/// compare_schemes across a descending list of step sizes (at least three).
/// Deviations below `floor` are excluded from the slope fit and flagged.
ConvergenceStudy convergence_study(const HybridModel& model, const QuantumState& initial_psi,
                                   const ClassicalState& initial_classical,
                                   const std::vector<double>& dt_list, double t_final,
                                   HeisenbergMode mode = HeisenbergMode::OperatorOde,
                                   double floor = 1e-12);

/// For a frozen-Q dense trajectory, the interaction-energy rate must satisfy
///   dE/dt = <[H_i, H_q]> / (i hbar)
/// exactly; returns the max over interior grid points of the centered-
/// difference residual, which scales as O(dt^2). Requires dense output and a
/// constant classical coordinate record.
double energy_rate_check(const HybridModel& model, const Trajectory& traj);

struct BenchmarkRow {
    int basis_size = 0;
    double meanfield_step_seconds = 0.0;
    double heisenberg_step_seconds = 0.0;
    double ratio = 0.0;
    double meanfield_total_seconds = 0.0;
    double heisenberg_total_seconds = 0.0;
    long steps = 0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    int repetitions = 0;
    std::vector<std::string> notes;
};

/// Wall-clock cost of one propagation step for each scheme at each basis
/// size. The step budget is split into at least five timed blocks and the
/// per-step time is the block median; if per-step time lands under 100 ns
/// the budget is grown automatically and noted. Runs strictly sequentially.
BenchmarkReport benchmark_schemes(const std::function<HybridModel(int)>& model_family,
                                  const std::vector<int>& basis_sizes, long steps);

} // namespace hybridprop
