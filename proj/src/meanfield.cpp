#include "hybridprop/meanfield.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridprop {

namespace {

constexpr long kMaxSteps = 100000000; // sanity cap on T/dt

long step_count(double t_final, double dt) {
    if (!(t_final > 0))
        throw std::invalid_argument("propagation horizon T must be positive");
    const double ratio = t_final / dt;
    if (ratio > static_cast<double>(kMaxSteps))
        throw std::invalid_argument("T/dt exceeds the sanity cap of 1e8 steps");
    const long n = std::lround(ratio);
    return n > 0 ? n : 1;
}

void check_dims(const HybridModel& model, const QuantumState& psi, const ClassicalState& c) {
    require_same_dim(model.quantum_hamiltonian, psi);
    if (c.dim() != model.classical_dim() || c.p.size() != c.q.size())
        throw std::invalid_argument("classical state dimension mismatch");
}

} // namespace

RealVector hellmann_feynman_force(const HybridModel& model, const QuantumState& psi,
                                  const RealVector& q) {
    require_same_dim(model.quantum_hamiltonian, psi);
    if (q.size() != model.classical_dim())
        throw std::invalid_argument("coordinate vector dimension mismatch");
    RealVector force = RealVector::Zero(q.size());
    for (const auto& term : model.coupling) {
        const double mean = psi.dot(term.operator_part * psi).real();
        force -= term.gradient(q) * mean;
    }
    return force;
}

MeanFieldDerivative meanfield_rhs(const HybridModel& model, const MeanFieldState& s) {
    check_dims(model, s.psi, s.classical);
    MeanFieldDerivative d;
    const HilbertOperator h = model.quantum_generator(s.classical.q);
    d.dpsi = (h * s.psi) / Complex(0, model.hbar);
    d.dq = s.classical.p.array() / model.classical.masses.array();
    d.dp = hellmann_feynman_force(model, s.psi, s.classical.q) -
           model.classical.potential_gradient(s.classical.q);
    return d;
}

Trajectory propagate_meanfield(const HybridModel& model, const MeanFieldState& init,
                               const IntegratorSpec& spec, double t_final,
                               const PropagationOptions& options) {
    require_valid(spec);
    check_dims(model, init.psi, init.classical);
    const long steps = step_count(t_final, spec.dt);
    const double dt = spec.dt;

    Trajectory traj;
    traj.scheme = "meanfield";
    traj.dt = dt;
    traj.output_stride = spec.output_stride;
    traj.frozen_classical = options.freeze_classical;
    traj.initial_ket = init.psi;
    traj.rows.reserve(static_cast<size_t>(steps / spec.output_stride) + 2);

    QuantumState psi = init.psi;
    ClassicalState c = init.classical;

    auto record = [&](double t) {
        TrajectoryRow row;
        row.t = t;
        row.q = c.q;
        row.p = c.p;
        row.interaction_energy = psi.dot(model.interaction_operator(c.q) * psi).real();
        row.norm_or_defect = psi.norm();
        row.total_energy = total_meanfield_energy(model, psi, c);
        traj.rows.push_back(std::move(row));
        if (options.dense_output)
            traj.states.push_back(psi);
    };

    auto stage = [&](const QuantumState& sp, const RealVector& sq, const RealVector& spp) {
        MeanFieldState s{sp, ClassicalState{sq, spp}, 0.0};
        MeanFieldDerivative d = meanfield_rhs(model, s);
        if (options.freeze_classical) {
            d.dq.setZero();
            d.dp.setZero();
        }
        return d;
    };

    record(init.time);
    for (long step = 1; step <= steps; ++step) {
        const MeanFieldDerivative k1 = stage(psi, c.q, c.p);
        const MeanFieldDerivative k2 =
            stage(psi + 0.5 * dt * k1.dpsi, c.q + 0.5 * dt * k1.dq, c.p + 0.5 * dt * k1.dp);
        const MeanFieldDerivative k3 =
            stage(psi + 0.5 * dt * k2.dpsi, c.q + 0.5 * dt * k2.dq, c.p + 0.5 * dt * k2.dp);
        const MeanFieldDerivative k4 =
            stage(psi + dt * k3.dpsi, c.q + dt * k3.dq, c.p + dt * k3.dp);
        psi += (dt / 6.0) * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
        c.q += (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
        c.p += (dt / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);

        if (!psi.allFinite() || !c.q.allFinite() || !c.p.allFinite())
            throw DivergenceError("meanfield", step, std::move(traj));
        if (step % spec.output_stride == 0)
            record(init.time + static_cast<double>(step) * dt);
    }

    traj.final_psi = psi;
    traj.final_classical = c;
    traj.final_time = init.time + static_cast<double>(steps) * dt;
    return traj;
}

} // namespace hybridprop
