#include "hybridprop/equivalence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace hybridprop {

namespace {

DeviationReport deviations(const Trajectory& a, const Trajectory& b) {
    if (a.rows.size() != b.rows.size())
        throw std::invalid_argument("compare_schemes: schemes produced different grid sizes");
    DeviationReport rep;
    rep.grid_points = static_cast<long>(a.rows.size());
    double worst = -1.0;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const double dq = (a.rows[i].q - b.rows[i].q).cwiseAbs().maxCoeff();
        const double dp = (a.rows[i].p - b.rows[i].p).cwiseAbs().maxCoeff();
        const double de = std::abs(a.rows[i].interaction_energy - b.rows[i].interaction_energy);
        rep.max_abs_delta_q = std::max(rep.max_abs_delta_q, dq);
        rep.max_abs_delta_p = std::max(rep.max_abs_delta_p, dp);
        rep.max_abs_delta_e = std::max(rep.max_abs_delta_e, de);
        const double here = std::max({dq, dp, de});
        if (here > worst) {
            worst = here;
            rep.time_of_max = a.rows[i].t;
        }
    }
    return rep;
}

double max_deviation(const DeviationReport& r) {
    return std::max({r.max_abs_delta_q, r.max_abs_delta_p, r.max_abs_delta_e});
}

} // namespace

DeviationReport compare_schemes(const HybridModel& model, const QuantumState& initial_psi,
                                const ClassicalState& initial_classical, const IntegratorSpec& spec,
                                double t_final, HeisenbergMode mode, bool concurrent) {
    require_valid(spec);
    require_normalized(initial_psi);

    auto run_meanfield = [&]() {
        try {
            MeanFieldState init{initial_psi, initial_classical, 0.0};
            return propagate_meanfield(model, init, spec, t_final);
        } catch (const DivergenceError& e) {
            throw std::runtime_error("compare_schemes: mean-field scheme diverged at step " +
                                     std::to_string(e.step));
        }
    };
    auto run_heisenberg = [&]() {
        try {
            HeisenbergState init = make_heisenberg_state(model, initial_psi, initial_classical, mode);
            return propagate_heisenberg(model, init, spec, t_final);
        } catch (const DivergenceError& e) {
            throw std::runtime_error("compare_schemes: Heisenberg scheme diverged at step " +
                                     std::to_string(e.step));
        }
    };

    Trajectory mf, hs;
    if (concurrent) {
        auto mf_future = std::async(std::launch::async, run_meanfield);
        auto hs_future = std::async(std::launch::async, run_heisenberg);
        mf = mf_future.get();
        hs = hs_future.get();
    } else {
        mf = run_meanfield();
        hs = run_heisenberg();
    }
    return deviations(mf, hs);
}

ConvergenceStudy convergence_study(const HybridModel& model, const QuantumState& initial_psi,
                                   const ClassicalState& initial_classical,
                                   const std::vector<double>& dt_list, double t_final,
                                   HeisenbergMode mode, double floor) {
    if (dt_list.size() < 3)
        throw std::invalid_argument("convergence_study: need at least three step sizes");
    for (size_t i = 0; i + 1 < dt_list.size(); ++i)
        if (!(dt_list[i] > dt_list[i + 1]))
            throw std::invalid_argument("convergence_study: dt list must be strictly descending");
    if (!(dt_list.back() > 0))
        throw std::invalid_argument("convergence_study: step sizes must be positive");

    ConvergenceStudy study;
    for (double dt : dt_list) {
        IntegratorSpec spec;
        spec.dt = dt;
        spec.output_stride = 1;
        study.points.push_back({dt, compare_schemes(model, initial_psi, initial_classical, spec,
                                                    t_final, mode)});
    }

    // Monotonicity: deviations must not grow as dt shrinks, allowing a 10%
    // noise margin near the rounding floor.
    for (size_t i = 0; i + 1 < study.points.size(); ++i) {
        const double coarse = max_deviation(study.points[i].report);
        const double fine = max_deviation(study.points[i + 1].report);
        if (fine > 1.10 * std::max(coarse, floor))
            study.findings.push_back("deviation grew from dt=" + std::to_string(study.points[i].dt) +
                                     " to dt=" + std::to_string(study.points[i + 1].dt));
    }

    std::vector<double> log_dt, log_dev;
    for (const auto& pt : study.points) {
        const double dev = max_deviation(pt.report);
        if (dev > floor) {
            log_dt.push_back(std::log(pt.dt));
            log_dev.push_back(std::log(dev));
        } else {
            study.findings.push_back("deviation at dt=" + std::to_string(pt.dt) +
                                     " is at the rounding floor; excluded from slope fit");
        }
    }
    if (log_dt.size() >= 2) {
        const double n = static_cast<double>(log_dt.size());
        const double sx = std::accumulate(log_dt.begin(), log_dt.end(), 0.0);
        const double sy = std::accumulate(log_dev.begin(), log_dev.end(), 0.0);
        double sxx = 0.0, sxy = 0.0;
        for (size_t i = 0; i < log_dt.size(); ++i) {
            sxx += log_dt[i] * log_dt[i];
            sxy += log_dt[i] * log_dev[i];
        }
        study.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        study.slope_fit_valid = true;
    } else {
        study.findings.push_back("slope fit skipped: fewer than two points above the rounding floor");
    }
    return study;
}

double energy_rate_check(const HybridModel& model, const Trajectory& traj) {
    if (!traj.dense())
        throw std::invalid_argument("energy_rate_check: trajectory lacks dense output");
    if (traj.rows.size() < 3)
        throw std::invalid_argument("energy_rate_check: need at least three grid points");
    const bool unitary = !traj.propagators.empty();
    const size_t n = traj.rows.size();
    if ((unitary ? traj.propagators.size() : traj.states.size()) != n)
        throw std::invalid_argument("energy_rate_check: dense payload size mismatch");

    const RealVector q0 = traj.rows.front().q;
    for (const auto& row : traj.rows)
        if ((row.q - q0).cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument("energy_rate_check: trajectory is not frozen-Q");

    // With Q fixed the commutator is a constant matrix; conjugation by U
    // commutes with the commutator, so one expectation per grid point
    // suffices in either picture.
    const HilbertOperator comm = commutator(model.interaction_operator(q0), model.quantum_hamiltonian);
    const double h = traj.rows[1].t - traj.rows[0].t;
    double residual = 0.0;
    for (size_t k = 1; k + 1 < n; ++k) {
        const double rate_fd =
            (traj.rows[k + 1].interaction_energy - traj.rows[k - 1].interaction_energy) / (2.0 * h);
        QuantumState phi;
        if (unitary)
            phi = traj.propagators[k] * traj.initial_ket;
        else
            phi = traj.states[k];
        const double rate_comm = phi.dot(comm * phi).imag() / model.hbar;
        residual = std::max(residual, std::abs(rate_fd - rate_comm));
    }
    return residual;
}

namespace {

using Clock = std::chrono::steady_clock;

double time_blocks(const std::function<void(long)>& run, long steps, int blocks,
                   std::vector<double>& block_seconds) {
    block_seconds.clear();
    const long per_block = std::max<long>(1, steps / blocks);
    for (int b = 0; b < blocks; ++b) {
        const auto begin = Clock::now();
        run(per_block);
        const auto end = Clock::now();
        block_seconds.push_back(std::chrono::duration<double>(end - begin).count());
    }
    std::vector<double> sorted = block_seconds;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    return median / static_cast<double>(per_block);
}

} // namespace

BenchmarkReport benchmark_schemes(const std::function<HybridModel(int)>& model_family,
                                  const std::vector<int>& basis_sizes, long steps) {
    if (!model_family)
        throw std::invalid_argument("benchmark_schemes: missing model family");
    if (basis_sizes.empty())
        throw std::invalid_argument("benchmark_schemes: basis size list is empty");
    for (size_t i = 0; i + 1 < basis_sizes.size(); ++i)
        if (!(basis_sizes[i] < basis_sizes[i + 1]))
            throw std::invalid_argument("benchmark_schemes: basis sizes must be ascending");
    if (steps < 1000)
        throw std::invalid_argument("benchmark_schemes: need at least 1000 steps for stable timings");

    constexpr int kBlocks = 5;
    constexpr double kMinPerStep = 100e-9;
    IntegratorSpec spec;
    spec.dt = 1e-3;

    BenchmarkReport report;
    report.repetitions = kBlocks;
    for (int n : basis_sizes) {
        const HybridModel model = model_family(n);
        QuantumState psi0 = QuantumState::Zero(model.dim());
        psi0(0) = 1.0;
        const ClassicalState c0(1.0, 0.0);

        auto run_meanfield = [&](long nsteps) {
            IntegratorSpec s = spec;
            s.output_stride = static_cast<int>(std::min<long>(nsteps + 1, 1000000000L));
            MeanFieldState init{psi0, c0, 0.0};
            propagate_meanfield(model, init, s, static_cast<double>(nsteps) * spec.dt);
        };
        auto run_heisenberg = [&](long nsteps) {
            IntegratorSpec s = spec;
            s.output_stride = static_cast<int>(std::min<long>(nsteps + 1, 1000000000L));
            HeisenbergState init = make_heisenberg_state(model, psi0, c0, HeisenbergMode::Unitary);
            propagate_heisenberg(model, init, s, static_cast<double>(nsteps) * spec.dt);
        };

        // Warm caches and code paths outside the timed region.
        run_meanfield(20);
        run_heisenberg(20);

        BenchmarkRow row;
        row.basis_size = n;
        long budget = steps;
        for (int attempt = 0;; ++attempt) {
            std::vector<double> mf_blocks, hs_blocks;
            row.meanfield_step_seconds = time_blocks(run_meanfield, budget, kBlocks, mf_blocks);
            row.heisenberg_step_seconds = time_blocks(run_heisenberg, budget, kBlocks, hs_blocks);
            row.meanfield_total_seconds = std::accumulate(mf_blocks.begin(), mf_blocks.end(), 0.0);
            row.heisenberg_total_seconds = std::accumulate(hs_blocks.begin(), hs_blocks.end(), 0.0);
            row.steps = std::max<long>(1, budget / kBlocks) * kBlocks;
            if (row.meanfield_step_seconds >= kMinPerStep || attempt >= 4)
                break;
            budget *= 4;
            report.notes.push_back("N=" + std::to_string(n) +
                                   ": per-step time under 100 ns, step budget raised to " +
                                   std::to_string(budget));
        }
        row.ratio = row.heisenberg_step_seconds / row.meanfield_step_seconds;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace hybridprop
