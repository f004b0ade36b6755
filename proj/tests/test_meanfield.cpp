#include "hybridprop/meanfield.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace hybridprop;

namespace {

// Independent reference for the bilinear-coupling model: Ehrenfest closes on
// (x, y, Q, P) = (<q>, <p>, Q, P) as a 4-dimensional linear system,
//   x' = y/m_q,  y' = -m_q w_q^2 x - l Q,
//   Q' = P/m_c,  P' = -m_c w_c^2 Q - l x,
// integrated here with RK4 at a tenth of the step under test.
struct LinearOracle {
    double mq, wq, mc, wc, l;

    std::vector<std::array<double, 4>> run(std::array<double, 4> s, double dt, long steps,
                                           int refine = 10) const {
        auto rhs = [this](const std::array<double, 4>& v) {
            return std::array<double, 4>{v[1] / mq, -mq * wq * wq * v[0] - l * v[2],
                                         v[3] / mc, -mc * wc * wc * v[2] - l * v[0]};
        };
        auto axpy = [](const std::array<double, 4>& a, double h, const std::array<double, 4>& d) {
            return std::array<double, 4>{a[0] + h * d[0], a[1] + h * d[1], a[2] + h * d[2],
                                         a[3] + h * d[3]};
        };
        const double h = dt / refine;
        std::vector<std::array<double, 4>> out;
        out.push_back(s);
        for (long step = 1; step <= steps * refine; ++step) {
            const auto k1 = rhs(s);
            const auto k2 = rhs(axpy(s, 0.5 * h, k1));
            const auto k3 = rhs(axpy(s, 0.5 * h, k2));
            const auto k4 = rhs(axpy(s, h, k3));
            for (int j = 0; j < 4; ++j)
                s[j] += (h / 6.0) * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
            if (step % refine == 0)
                out.push_back(s);
        }
        return out;
    }
};

QuantumState basis_state(Eigen::Index n, Eigen::Index k) {
    QuantumState psi = QuantumState::Zero(n);
    psi(k) = 1.0;
    return psi;
}

} // namespace

TEST_CASE("Hellmann-Feynman force, hand cases") {
    SUBCASE("no coupling terms at all") {
        HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.1);
        model.coupling.clear();
        QuantumState psi(2);
        psi << 1, 0;
        const RealVector f = hellmann_feynman_force(model, psi, RealVector::Zero(1));
        CHECK(f.size() == 1);
        CHECK(f(0) == 0.0);
    }
    SUBCASE("spin-oscillator in the up state: -gamma") {
        const double gamma = 0.37;
        const HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, gamma);
        QuantumState psi(2);
        psi << 1, 0;
        const RealVector f = hellmann_feynman_force(model, psi, RealVector::Constant(1, 0.8));
        CHECK(f(0) == doctest::Approx(-gamma).epsilon(1e-14));
    }
    SUBCASE("balanced superposition: zero by symmetry") {
        const HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.5);
        QuantumState psi(2);
        psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        const RealVector f = hellmann_feynman_force(model, psi, RealVector::Zero(1));
        CHECK(std::abs(f(0)) <= 1e-15);
    }
}

TEST_CASE("mean-field right-hand side, hand cases") {
    SUBCASE("stationary state rotates in phase only") {
        const HybridModel model = build_spin_oscillator(1.0, 0.0, 1.0, 1.0, 0.0);
        MeanFieldState s{basis_state(2, 0), ClassicalState(0.0, 0.0), 0.0};
        const MeanFieldDerivative d = meanfield_rhs(model, s);
        // eigenvalue epsilon/2 = 0.5: dpsi = (0.5 / i) psi = -0.5 i psi
        CHECK(std::abs(d.dpsi(0) - Complex(0, -0.5)) <= 1e-15);
        CHECK(std::abs(d.dpsi(1)) == 0.0);
    }
    SUBCASE("free classical drift") {
        const double p0 = 0.7, m = 2.0;
        const HybridModel model = build_spin_oscillator(1.0, 0.5, m, 1.0, 0.0);
        MeanFieldState s{basis_state(2, 0), ClassicalState(0.0, p0), 0.0};
        const MeanFieldDerivative d = meanfield_rhs(model, s);
        CHECK(d.dq(0) == doctest::Approx(p0 / m).epsilon(1e-15));
        CHECK(d.dp(0) == 0.0);
    }
    SUBCASE("both force terms add") {
        // psi=(1,0), Q=1, P=0, eps=delta=0, gamma=1, m=1, w=1:
        // dP = -gamma <sigma_z> - m w^2 Q = -1 - 1 = -2
        const HybridModel model = build_spin_oscillator(0.0, 0.0, 1.0, 1.0, 1.0);
        MeanFieldState s{basis_state(2, 0), ClassicalState(1.0, 0.0), 0.0};
        const MeanFieldDerivative d = meanfield_rhs(model, s);
        CHECK(d.dp(0) == doctest::Approx(-2.0).epsilon(1e-15));
    }
}

TEST_CASE("decoupled classical oscillator matches the closed form") {
    const double m = 1.0, w = 1.0, q0 = 1.0, p0 = 0.5;
    const HybridModel model = build_spin_oscillator(1.0, 0.5, m, w, 0.0);
    MeanFieldState init{basis_state(2, 0), ClassicalState(q0, p0), 0.0};
    IntegratorSpec spec;
    spec.dt = 1e-3;
    const Trajectory traj = propagate_meanfield(model, init, spec, 10.0);

    double worst = 0.0;
    for (const auto& row : traj.rows) {
        const double ref = q0 * std::cos(w * row.t) + p0 / (m * w) * std::sin(w * row.t);
        worst = std::max(worst, std::abs(row.q(0) - ref));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("bilinear coupling reproduces the linear-system oracle") {
    const double wq = 1.0, mq = 1.0, mc = 1.0, wc = 1.0, l = 0.2;
    const int n = 16;
    const HybridModel model = build_oscillator_oscillator(n, wq, mq, mc, wc, l, false);
    const HilbertOperator qhat = model.coordinate_ops.at(0);
    const HilbertOperator phat = momentum_operator(n, mq, wq, model.hbar);

    IntegratorSpec spec;
    spec.dt = 1e-3;
    PropagationOptions options;
    options.dense_output = true;
    MeanFieldState init{basis_state(n, 0), ClassicalState(1.0, 0.0), 0.0};
    const Trajectory traj = propagate_meanfield(model, init, spec, 5.0, options);

    const LinearOracle oracle{mq, wq, mc, wc, l};
    const auto ref = oracle.run({0.0, 0.0, 1.0, 0.0}, spec.dt, 5000);
    REQUIRE(ref.size() == traj.rows.size());

    double worst = 0.0;
    for (size_t k = 0; k < traj.rows.size(); ++k) {
        const QuantumState psi = traj.states[k];
        worst = std::max(worst, std::abs(psi.dot(qhat * psi).real() - ref[k][0]));
        worst = std::max(worst, std::abs(psi.dot(phat * psi).real() - ref[k][1]));
        worst = std::max(worst, std::abs(traj.rows[k].q(0) - ref[k][2]));
        worst = std::max(worst, std::abs(traj.rows[k].p(0) - ref[k][3]));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("norm is not renormalized and drifts below 1e-8 over 1e4 steps") {
    const HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.1);
    MeanFieldState init{basis_state(2, 0), ClassicalState(1.0, 0.0), 0.0};
    IntegratorSpec spec;
    spec.dt = 1e-3;
    const Trajectory traj = propagate_meanfield(model, init, spec, 10.0);
    for (const auto& row : traj.rows)
        CHECK(std::abs(row.norm_or_defect - 1.0) <= 1e-8);
}

TEST_CASE("total energy is conserved along coupled runs") {
    IntegratorSpec spec;
    spec.dt = 1e-3;
    const std::vector<HybridModel> models = {
        build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.1),
        build_oscillator_oscillator(16, 1.0, 1.0, 1.0, 1.0, 0.2, false),
    };
    for (const auto& model : models) {
        MeanFieldState init{basis_state(model.dim(), 0), ClassicalState(1.0, 0.0), 0.0};
        const Trajectory traj = propagate_meanfield(model, init, spec, 10.0);
        const double e0 = traj.rows.front().total_energy;
        for (const auto& row : traj.rows)
            CHECK(std::abs(row.total_energy - e0) <= 1e-7);
    }
}

TEST_CASE("interaction-energy rate matches the commutator-plus-drift identity") {
    // Along a moving trajectory dE/dt picks up the classical transport term:
    //   dE/dt = <[H_i, H_q]>/(i hbar) + (Qdot . d/dQ) sum_k f_k <A_k>.
    const HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.1);
    IntegratorSpec spec;
    spec.dt = 1e-3;
    PropagationOptions options;
    options.dense_output = true;
    MeanFieldState init{basis_state(2, 0), ClassicalState(1.0, 0.0), 0.0};
    const Trajectory traj = propagate_meanfield(model, init, spec, 5.0, options);

    auto residual_for = [&](const Trajectory& t) {
        double worst = 0.0;
        for (size_t k = 1; k + 1 < t.rows.size(); ++k) {
            const double fd = (t.rows[k + 1].interaction_energy - t.rows[k - 1].interaction_energy) /
                              (2.0 * t.dt);
            const QuantumState& psi = t.states[k];
            const RealVector& q = t.rows[k].q;
            const HilbertOperator comm = commutator(model.interaction_operator(q),
                                                    model.quantum_hamiltonian);
            double rate = psi.dot(comm * psi).imag() / model.hbar;
            const RealVector qdot = t.rows[k].p.array() / model.classical.masses.array();
            for (const auto& term : model.coupling)
                rate += term.gradient(q).dot(qdot) * psi.dot(term.operator_part * psi).real();
            worst = std::max(worst, std::abs(fd - rate));
        }
        return worst;
    };
    const double res = residual_for(traj);
    CHECK(res <= 5e-8); // measures 2.7e-8 at dt=1e-3

    // The residual is centered-difference limited: 4x smaller when dt halves.
    IntegratorSpec coarse = spec;
    coarse.dt = 2e-3;
    const Trajectory traj2 = propagate_meanfield(model, init, coarse, 5.0, options);
    const double res2 = residual_for(traj2);
    CHECK(res <= 0.35 * res2);
}

TEST_CASE("RK4 order measured against the closed form") {
    const double m = 1.0, w = 1.0;
    const HybridModel model = build_spin_oscillator(1.0, 0.5, m, w, 0.0);
    auto error_at = [&](double dt) {
        IntegratorSpec spec;
        spec.dt = dt;
        MeanFieldState init{basis_state(2, 0), ClassicalState(1.0, 0.0), 0.0};
        const Trajectory traj = propagate_meanfield(model, init, spec, 10.0);
        double worst = 0.0;
        for (const auto& row : traj.rows)
            worst = std::max(worst, std::abs(row.q(0) - std::cos(w * row.t)));
        return worst;
    };
    const double e_coarse = error_at(0.04);
    const double e_fine = error_at(0.02);
    const double factor = e_coarse / e_fine;
    CHECK(factor >= 13.0);
    CHECK(factor <= 19.0);
}

TEST_CASE("initial row is exact and the final state is retrievable") {
    const HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.1);
    MeanFieldState init{basis_state(2, 0), ClassicalState(1.0, -0.25), 0.0};
    IntegratorSpec spec;
    spec.dt = 1e-2;
    PropagationOptions options;
    options.dense_output = true;
    const Trajectory traj = propagate_meanfield(model, init, spec, 1.0, options);

    CHECK(traj.rows.front().t == 0.0);
    CHECK(traj.rows.front().q(0) == 1.0);
    CHECK(traj.rows.front().p(0) == -0.25);
    CHECK(traj.rows.front().norm_or_defect == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(traj.final_time == doctest::Approx(1.0));
    CHECK((traj.final_psi - traj.states.back()).norm() == 0.0);
    CHECK(traj.final_classical.q(0) == traj.rows.back().q(0));
}

TEST_CASE("divergence raises an error carrying the partial trajectory") {
    const HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.1);
    MeanFieldState init{basis_state(2, 0), ClassicalState(1.0, 0.0), 0.0};
    IntegratorSpec spec;
    spec.dt = 10.0; // wildly unstable for omega = 1
    bool thrown = false;
    try {
        propagate_meanfield(model, init, spec, 5000.0);
    } catch (const DivergenceError& e) {
        thrown = true;
        CHECK(e.step >= 1);
        CHECK(e.scheme == "meanfield");
        CHECK(!e.partial.rows.empty());
    }
    CHECK(thrown);
}

TEST_CASE("propagation rejects bad inputs") {
    const HybridModel model = build_spin_oscillator(1.0, 0.5, 1.0, 1.0, 0.1);
    MeanFieldState init{basis_state(2, 0), ClassicalState(1.0, 0.0), 0.0};
    IntegratorSpec bad;
    bad.dt = -1.0;
    CHECK_THROWS_AS(propagate_meanfield(model, init, bad, 1.0), std::invalid_argument);
    IntegratorSpec ok;
    CHECK_THROWS_AS(propagate_meanfield(model, init, ok, -2.0), std::invalid_argument);
    MeanFieldState mismatched{basis_state(3, 0), ClassicalState(1.0, 0.0), 0.0};
    CHECK_THROWS_AS(propagate_meanfield(model, mismatched, ok, 1.0), std::invalid_argument);
}
