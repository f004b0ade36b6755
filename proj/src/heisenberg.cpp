#include "hybridprop/heisenberg.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hybridprop {

namespace {

constexpr double kWarnDefect = 1e-6;
constexpr long kMaxSteps = 100000000;

long step_count(double t_final, double dt) {
    if (!(t_final > 0))
        throw std::invalid_argument("propagation horizon T must be positive");
    if (t_final / dt > static_cast<double>(kMaxSteps))
        throw std::invalid_argument("T/dt exceeds the sanity cap of 1e8 steps");
    const long n = std::lround(t_final / dt);
    return n > 0 ? n : 1;
}

void check_dims(const HybridModel& model, const HeisenbergState& s) {
    require_same_dim(model.quantum_hamiltonian, s.initial_ket);
    if (s.classical.dim() != model.classical_dim())
        throw std::invalid_argument("classical state dimension mismatch");
    if (s.mode == HeisenbergMode::Unitary) {
        if (s.propagator.rows() != model.dim() || s.propagator.cols() != model.dim())
            throw std::invalid_argument("propagator dimension mismatch");
    } else {
        if (s.heisenberg_ops.size() < 1 + model.coupling.size())
            throw std::invalid_argument("operator-ode state must track H_q and every coupling operator");
        for (const auto& op : s.heisenberg_ops)
            if (op.rows() != model.dim() || op.cols() != model.dim())
                throw std::invalid_argument("evolved operator dimension mismatch");
    }
}

// Coupling coefficients at the given coordinates.
std::vector<double> coupling_values(const HybridModel& model, const RealVector& q) {
    std::vector<double> f(model.coupling.size());
    for (size_t k = 0; k < model.coupling.size(); ++k)
        f[k] = model.coupling[k].coefficient(q);
    return f;
}

// <t0|A_k,h(t)|t0> for every coupling term.
std::vector<double> coupling_expectations(const HybridModel& model, const HeisenbergState& s) {
    std::vector<double> mean(model.coupling.size());
    if (s.mode == HeisenbergMode::Unitary) {
        const QuantumState psi_t = s.propagator * s.initial_ket;
        for (size_t k = 0; k < model.coupling.size(); ++k)
            mean[k] = psi_t.dot(model.coupling[k].operator_part * psi_t).real();
    } else {
        for (size_t k = 0; k < model.coupling.size(); ++k)
            mean[k] = s.initial_ket.dot(s.heisenberg_ops[1 + k] * s.initial_ket).real();
    }
    return mean;
}

double coordinate_expectation(const HybridModel& model, const HeisenbergState& s) {
    if (model.coordinate_ops.empty())
        throw std::invalid_argument("model declares no coordinate operator");
    if (s.mode == HeisenbergMode::Unitary) {
        const QuantumState psi_t = s.propagator * s.initial_ket;
        return psi_t.dot(model.coordinate_ops.front() * psi_t).real();
    }
    if (s.tracked_coordinate_ops < 1)
        throw std::invalid_argument("operator-ode state does not track the coordinate operator");
    const HilbertOperator& qh = s.heisenberg_ops[s.heisenberg_ops.size() -
                                                 static_cast<size_t>(s.tracked_coordinate_ops)];
    return s.initial_ket.dot(qh * s.initial_ket).real();
}

RealVector classical_velocity(const HybridModel& model, const ClassicalState& c) {
    return (c.p.array() / model.classical.masses.array()).matrix();
}

// The two backreaction variants share the classical part of the derivative.
enum class ForceRule { Expectation, Scalarized };

RealVector backreaction(const HybridModel& model, const HeisenbergState& s, ForceRule rule) {
    RealVector force = RealVector::Zero(model.classical_dim());
    if (rule == ForceRule::Expectation) {
        const std::vector<double> mean = coupling_expectations(model, s);
        for (size_t k = 0; k < model.coupling.size(); ++k)
            force -= model.coupling[k].gradient(s.classical.q) * mean[k];
    } else {
        const double qbar = coordinate_expectation(model, s);
        for (const auto& term : model.coupling) {
            if (!term.scalarized_operator)
                throw std::invalid_argument("alternative scheme: coupling term lacks a scalar form "
                                            "in the coordinate expectation");
            force -= term.gradient(s.classical.q) * term.scalarized_operator(qbar);
        }
    }
    return force;
}

HeisenbergDerivative rhs_impl(const HybridModel& model, const HeisenbergState& s, ForceRule rule) {
    check_dims(model, s);
    HeisenbergDerivative d;
    const Complex ih(0, model.hbar);
    if (s.mode == HeisenbergMode::Unitary) {
        d.dpropagator.noalias() = model.quantum_generator(s.classical.q) * s.propagator;
        d.dpropagator /= ih;
    } else {
        const std::vector<double> f = coupling_values(model, s.classical.q);
        HilbertOperator h = s.heisenberg_ops[0];
        for (size_t k = 0; k < f.size(); ++k)
            h += f[k] * s.heisenberg_ops[1 + k];
        d.dops.resize(s.heisenberg_ops.size());
        for (size_t j = 0; j < s.heisenberg_ops.size(); ++j) {
            const HilbertOperator& x = s.heisenberg_ops[j];
            HilbertOperator dx(x.rows(), x.cols());
            dx.noalias() = x * h;
            dx.noalias() -= h * x;
            d.dops[j] = dx / ih;
        }
    }
    d.dq = classical_velocity(model, s.classical);
    d.dp = backreaction(model, s, rule) - model.classical.potential_gradient(s.classical.q);
    return d;
}

struct EnergyRecord {
    double interaction = 0.0;
    double total = 0.0;
    double defect = 0.0;
};

EnergyRecord energy_record(const HybridModel& model, const HeisenbergState& s, ForceRule rule) {
    EnergyRecord rec;
    const std::vector<double> f = coupling_values(model, s.classical.q);
    if (rule == ForceRule::Expectation) {
        const std::vector<double> mean = coupling_expectations(model, s);
        for (size_t k = 0; k < f.size(); ++k)
            rec.interaction += f[k] * mean[k];
    } else {
        const double qbar = coordinate_expectation(model, s);
        for (size_t k = 0; k < f.size(); ++k)
            rec.interaction += f[k] * model.coupling[k].scalarized_operator(qbar);
    }
    double quantum = 0.0;
    if (s.mode == HeisenbergMode::Unitary) {
        const QuantumState psi_t = s.propagator * s.initial_ket;
        quantum = psi_t.dot(model.quantum_hamiltonian * psi_t).real();
        rec.defect = unitarity_defect(s.propagator);
    } else {
        quantum = s.initial_ket.dot(s.heisenberg_ops[0] * s.initial_ket).real();
        for (const auto& op : s.heisenberg_ops)
            rec.defect = std::max(rec.defect, hermiticity_defect(op));
    }
    rec.total = quantum + rec.interaction + model.kinetic_energy(s.classical.p) +
                model.classical.potential(s.classical.q);
    return rec;
}

Trajectory propagate_impl(const HybridModel& model, const HeisenbergState& init,
                          const IntegratorSpec& spec, double t_final,
                          const PropagationOptions& options, ForceRule rule,
                          const std::string& scheme_name) {
    require_valid(spec);
    HeisenbergState s = init;
    // The alternative scheme needs the coordinate operator in the evolved
    // set; add it on entry if the caller did not.
    if (rule == ForceRule::Scalarized) {
        if (model.coordinate_ops.empty())
            throw std::invalid_argument("alternative scheme: model declares no coordinate operator");
        if (s.mode == HeisenbergMode::OperatorOde && s.tracked_coordinate_ops == 0) {
            for (const auto& op : model.coordinate_ops)
                s.heisenberg_ops.push_back(op);
            s.tracked_coordinate_ops = static_cast<int>(model.coordinate_ops.size());
        }
    }
    check_dims(model, s);
    require_normalized(s.initial_ket);
    const long steps = step_count(t_final, spec.dt);
    const double dt = spec.dt;

    Trajectory traj;
    traj.scheme = scheme_name;
    traj.dt = dt;
    traj.output_stride = spec.output_stride;
    traj.frozen_classical = options.freeze_classical;
    traj.initial_ket = s.initial_ket;
    traj.rows.reserve(static_cast<size_t>(steps / spec.output_stride) + 2);

    auto record = [&](double t) {
        const EnergyRecord rec = energy_record(model, s, rule);
        TrajectoryRow row;
        row.t = t;
        row.q = s.classical.q;
        row.p = s.classical.p;
        row.interaction_energy = rec.interaction;
        row.norm_or_defect = rec.defect;
        row.total_energy = rec.total;
        traj.rows.push_back(std::move(row));
        if (s.mode == HeisenbergMode::Unitary && rec.defect > kWarnDefect)
            traj.accuracy_warning = true;
        if (options.dense_output && s.mode == HeisenbergMode::Unitary)
            traj.propagators.push_back(s.propagator);
    };

    auto stage = [&](const HeisenbergState& sv) {
        HeisenbergDerivative d = rhs_impl(model, sv, rule);
        if (options.freeze_classical) {
            d.dq.setZero();
            d.dp.setZero();
        }
        return d;
    };

    auto advanced = [&](const HeisenbergState& base, const HeisenbergDerivative& d, double h) {
        HeisenbergState out = base;
        if (base.mode == HeisenbergMode::Unitary) {
            out.propagator += h * d.dpropagator;
        } else {
            for (size_t j = 0; j < out.heisenberg_ops.size(); ++j)
                out.heisenberg_ops[j] += h * d.dops[j];
        }
        out.classical.q += h * d.dq;
        out.classical.p += h * d.dp;
        return out;
    };

    record(s.time);
    const double t0 = s.time;
    for (long step = 1; step <= steps; ++step) {
        const HeisenbergDerivative k1 = stage(s);
        const HeisenbergDerivative k2 = stage(advanced(s, k1, 0.5 * dt));
        const HeisenbergDerivative k3 = stage(advanced(s, k2, 0.5 * dt));
        const HeisenbergDerivative k4 = stage(advanced(s, k3, dt));

        if (s.mode == HeisenbergMode::Unitary) {
            s.propagator +=
                (dt / 6.0) * (k1.dpropagator + 2.0 * k2.dpropagator + 2.0 * k3.dpropagator + k4.dpropagator);
        } else {
            for (size_t j = 0; j < s.heisenberg_ops.size(); ++j)
                s.heisenberg_ops[j] +=
                    (dt / 6.0) * (k1.dops[j] + 2.0 * k2.dops[j] + 2.0 * k3.dops[j] + k4.dops[j]);
        }
        s.classical.q += (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
        s.classical.p += (dt / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
        s.time = t0 + static_cast<double>(step) * dt;

        bool finite = s.classical.q.allFinite() && s.classical.p.allFinite();
        if (finite) {
            if (s.mode == HeisenbergMode::Unitary) {
                finite = s.propagator.allFinite();
            } else {
                for (const auto& op : s.heisenberg_ops)
                    finite = finite && op.allFinite();
            }
        }
        if (!finite)
            throw DivergenceError(scheme_name, step, std::move(traj));
        if (step % spec.output_stride == 0)
            record(s.time);
    }

    if (s.mode == HeisenbergMode::Unitary)
        traj.final_propagator = s.propagator;
    else
        traj.final_operators = s.heisenberg_ops;
    traj.final_classical = s.classical;
    traj.final_time = s.time;
    return traj;
}

} // namespace

HeisenbergState make_heisenberg_state(const HybridModel& model, const QuantumState& initial_ket,
                                      const ClassicalState& classical, HeisenbergMode mode,
                                      bool track_coordinate_ops) {
    require_same_dim(model.quantum_hamiltonian, initial_ket);
    require_normalized(initial_ket);
    if (classical.dim() != model.classical_dim())
        throw std::invalid_argument("classical state dimension mismatch");

    HeisenbergState s;
    s.mode = mode;
    s.classical = classical;
    s.initial_ket = initial_ket;
    if (mode == HeisenbergMode::Unitary) {
        s.propagator = identity_operator(model.dim());
    } else {
        s.heisenberg_ops.push_back(model.quantum_hamiltonian);
        for (const auto& term : model.coupling)
            s.heisenberg_ops.push_back(term.operator_part);
        if (track_coordinate_ops) {
            for (const auto& op : model.coordinate_ops)
                s.heisenberg_ops.push_back(op);
            s.tracked_coordinate_ops = static_cast<int>(model.coordinate_ops.size());
        }
    }
    return s;
}

RealVector heisenberg_backreaction_force(const HybridModel& model, const HeisenbergState& s) {
    check_dims(model, s);
    return backreaction(model, s, ForceRule::Expectation);
}

HeisenbergDerivative heisenberg_rhs(const HybridModel& model, const HeisenbergState& s) {
    return rhs_impl(model, s, ForceRule::Expectation);
}

Trajectory propagate_heisenberg(const HybridModel& model, const HeisenbergState& init,
                                const IntegratorSpec& spec, double t_final,
                                const PropagationOptions& options) {
    const std::string name =
        init.mode == HeisenbergMode::Unitary ? "heisenberg-unitary" : "heisenberg-operator";
    return propagate_impl(model, init, spec, t_final, options, ForceRule::Expectation, name);
}

Trajectory propagate_alternative(const HybridModel& model, const HeisenbergState& init,
                                 const IntegratorSpec& spec, double t_final,
                                 const PropagationOptions& options) {
    return propagate_impl(model, init, spec, t_final, options, ForceRule::Scalarized, "alternative");
}

} // namespace hybridprop
