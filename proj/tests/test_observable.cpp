#include "hybridprop/observable.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace hybridprop;
using hybridprop::testing::max_abs;

namespace {

// Observable term with coefficient c0 + cq Q_0 + cp P_0 + cqp Q_0 P_0 and
// analytic gradients; enough structure to exercise the Poisson part.
ObservableTerm poly_term(double c0, double cq, double cp, double cqp, HilbertOperator op) {
    ObservableTerm term;
    term.coefficient = [=](const RealVector& q, const RealVector& p) {
        return c0 + cq * q(0) + cp * p(0) + cqp * q(0) * p(0);
    };
    term.grad_q = [=](const RealVector&, const RealVector& p) {
        return RealVector::Constant(1, cq + cqp * p(0)).eval();
    };
    term.grad_p = [=](const RealVector& q, const RealVector&) {
        return RealVector::Constant(1, cp + cqp * q(0)).eval();
    };
    term.operator_part = std::move(op);
    return term;
}

HybridObservable poly_observable(double c0, double cq, double cp, double cqp, HilbertOperator op) {
    HybridObservable obs;
    obs.dim = op.rows();
    obs.terms.push_back(poly_term(c0, cq, cp, cqp, std::move(op)));
    return obs;
}

} // namespace

TEST_CASE("evaluate: constant term, empty list, hand-evaluated sum") {
    const ClassicalState c(2.0, 3.0);

    CHECK(max_abs(evaluate(HybridObservable::constant(pauli_x()), c) - pauli_x()) == 0.0);

    HybridObservable empty;
    empty.dim = 2;
    CHECK(max_abs(evaluate(empty, c)) == 0.0);

    // (Q^2, I) + (P, sigma_z) at Q=2, P=3 -> 4 I + 3 sigma_z
    HybridObservable obs;
    obs.dim = 2;
    ObservableTerm t1;
    t1.coefficient = [](const RealVector& q, const RealVector&) { return q(0) * q(0); };
    t1.grad_q = [](const RealVector& q, const RealVector&) {
        return RealVector::Constant(1, 2.0 * q(0)).eval();
    };
    t1.operator_part = identity_operator(2);
    ObservableTerm t2;
    t2.coefficient = [](const RealVector&, const RealVector& p) { return p(0); };
    t2.grad_p = [](const RealVector&, const RealVector&) {
        return RealVector::Constant(1, 1.0).eval();
    };
    t2.operator_part = pauli_z();
    obs.terms = {t1, t2};
    const HilbertOperator expected = 4.0 * identity_operator(2) + 3.0 * pauli_z();
    CHECK(max_abs(evaluate(obs, c) - expected) <= 1e-15);
}

TEST_CASE("qc bracket reduces to the commutator for constant coefficients") {
    std::mt19937 rng(17u);
    const ClassicalState c(0.7, -1.3);
    for (int k = 0; k < 100; ++k) {
        const HilbertOperator a = hybridprop::testing::random_hermitian(3, rng);
        const HilbertOperator b = hybridprop::testing::random_hermitian(3, rng);
        const HilbertOperator bracket =
            qc_bracket(HybridObservable::constant(a), HybridObservable::constant(b), c);
        CHECK(max_abs(bracket - commutator(a, b)) <= 1e-12);
    }
}

TEST_CASE("qc bracket reduces to i hbar {A,B} I for identity operator parts") {
    // Classical reduction checked against a hand-coded Poisson bracket of the
    // scalar coefficients.
    std::mt19937 rng(18u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double a0 = u(rng), aq = u(rng), ap = u(rng), aqp = u(rng);
        const double b0 = u(rng), bq = u(rng), bp = u(rng), bqp = u(rng);
        const ClassicalState c(u(rng), u(rng));
        const double hbar = 0.5 + std::abs(u(rng));

        const HybridObservable a = poly_observable(a0, aq, ap, aqp, identity_operator(3));
        const HybridObservable b = poly_observable(b0, bq, bp, bqp, identity_operator(3));

        // {g_a, g_b} = dg_a/dQ dg_b/dP - dg_a/dP dg_b/dQ at (Q, P)
        const double ga_q = aq + aqp * c.p(0), ga_p = ap + aqp * c.q(0);
        const double gb_q = bq + bqp * c.p(0), gb_p = bp + bqp * c.q(0);
        const double poisson = ga_q * gb_p - ga_p * gb_q;

        const HilbertOperator bracket = qc_bracket(a, b, c, hbar);
        const HilbertOperator expected = Complex(0, hbar) * poisson * identity_operator(3);
        CHECK(max_abs(bracket - expected) <= 1e-12);
    }
}

TEST_CASE("qc bracket hand cases: Q I with P I, and Q sigma_z with P sigma_z") {
    const ClassicalState c(0.3, 1.9);

    const HybridObservable q_id = poly_observable(0, 1, 0, 0, identity_operator(2));
    const HybridObservable p_id = poly_observable(0, 0, 1, 0, identity_operator(2));
    CHECK(max_abs(qc_bracket(q_id, p_id, c) - Complex(0, 1) * identity_operator(2)) <= 1e-15);

    // Q sigma_z vs P sigma_z: commutator part zero, Poisson part i hbar sigma_z^2 = i hbar I.
    const HybridObservable q_sz = poly_observable(0, 1, 0, 0, pauli_z());
    const HybridObservable p_sz = poly_observable(0, 0, 1, 0, pauli_z());
    CHECK(max_abs(qc_bracket(q_sz, p_sz, c) - Complex(0, 1) * identity_operator(2)) <= 1e-15);
}

TEST_CASE("qc bracket is antisymmetric on commuting operator parts") {
    std::mt19937 rng(19u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        // Diagonal operator parts commute pairwise.
        HilbertOperator da = HilbertOperator::Zero(3, 3);
        HilbertOperator db = HilbertOperator::Zero(3, 3);
        for (int j = 0; j < 3; ++j) {
            da(j, j) = u(rng);
            db(j, j) = u(rng);
        }
        const HybridObservable a = poly_observable(u(rng), u(rng), u(rng), u(rng), da);
        const HybridObservable b = poly_observable(u(rng), u(rng), u(rng), u(rng), db);
        const ClassicalState c(u(rng), u(rng));
        const HilbertOperator ab = qc_bracket(a, b, c);
        const HilbertOperator ba = qc_bracket(b, a, c);
        CHECK(max_abs(ab + ba) <= 1e-12);
    }
}

TEST_CASE("qc bracket is bilinear in each argument") {
    std::mt19937 rng(20u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const HybridObservable a1 =
            poly_observable(u(rng), u(rng), u(rng), u(rng),
                            hybridprop::testing::random_hermitian(2, rng));
        const HybridObservable a2 =
            poly_observable(u(rng), u(rng), u(rng), u(rng),
                            hybridprop::testing::random_hermitian(2, rng));
        const HybridObservable b =
            poly_observable(u(rng), u(rng), u(rng), u(rng),
                            hybridprop::testing::random_hermitian(2, rng));
        const double alpha = u(rng), beta = u(rng);
        const ClassicalState c(u(rng), u(rng));

        // alpha a1 + beta a2 as a two-term observable with scaled coefficients.
        HybridObservable combo;
        combo.dim = 2;
        for (const auto& [obs, w] : {std::pair{&a1, alpha}, std::pair{&a2, beta}}) {
            ObservableTerm term = obs->terms[0];
            const auto base_coeff = term.coefficient;
            const auto base_gq = term.grad_q;
            const auto base_gp = term.grad_p;
            term.coefficient = [base_coeff, w](const RealVector& q, const RealVector& p) {
                return w * base_coeff(q, p);
            };
            term.grad_q = [base_gq, w](const RealVector& q, const RealVector& p) {
                return (w * base_gq(q, p)).eval();
            };
            term.grad_p = [base_gp, w](const RealVector& q, const RealVector& p) {
                return (w * base_gp(q, p)).eval();
            };
            combo.terms.push_back(std::move(term));
        }

        const HilbertOperator lhs = qc_bracket(combo, b, c);
        const HilbertOperator rhs = alpha * qc_bracket(a1, b, c) + beta * qc_bracket(a2, b, c);
        CHECK(max_abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("heisenberg rhs from the bracket") {
    const ClassicalState c(0.0, 0.0);

    SUBCASE("constant-coefficient observable reduces to the plain Heisenberg equation") {
        std::mt19937 rng(21u);
        const HilbertOperator a = hybridprop::testing::random_hermitian(3, rng);
        const HilbertOperator h = hybridprop::testing::random_hermitian(3, rng);
        const double hbar = 0.7;
        const HilbertOperator rhs = heisenberg_rhs_from_bracket(
            HybridObservable::constant(a), HybridObservable::constant(h), c, hbar);
        const HilbertOperator expected = commutator(a, h) / Complex(0, hbar);
        CHECK(max_abs(rhs - expected) <= 1e-13);
        CHECK(hermiticity_defect(rhs) <= 1e-13);
    }

    SUBCASE("sigma_x under (epsilon/2) sigma_z gives -(epsilon/hbar) sigma_y") {
        // (1/i hbar)[sigma_x, (eps/2) sigma_z] = (eps/2 i hbar)(-2 i sigma_y)
        //                                      = -(eps/hbar) sigma_y
        const double eps = 0.8, hbar = 1.0;
        const HilbertOperator rhs = heisenberg_rhs_from_bracket(
            HybridObservable::constant(pauli_x()),
            HybridObservable::constant((eps / 2.0) * pauli_z()), c, hbar);
        CHECK(max_abs(rhs - (-(eps / hbar) * pauli_y())) <= 1e-14);
    }

    SUBCASE("the identity is stationary") {
        std::mt19937 rng(22u);
        const HilbertOperator h = hybridprop::testing::random_hermitian(4, rng);
        const HilbertOperator rhs = heisenberg_rhs_from_bracket(
            HybridObservable::constant(identity_operator(4)), HybridObservable::constant(h), c, 1.0);
        CHECK(max_abs(rhs) <= 1e-15);
    }
}

TEST_CASE("bracket arguments must share a dimension") {
    const ClassicalState c(0.0, 0.0);
    CHECK_THROWS_AS(qc_bracket(HybridObservable::constant(pauli_x()),
                               HybridObservable::constant(identity_operator(3)), c),
                    std::invalid_argument);
}

TEST_CASE("observable gradient validation") {
    HybridObservable good = poly_observable(0.1, 0.5, -0.7, 0.3, pauli_x());
    CHECK_NOTHROW(validate_observable_gradients(good, 1));

    HybridObservable bad = poly_observable(0.1, 0.5, -0.7, 0.3, pauli_x());
    bad.terms[0].grad_q = [](const RealVector&, const RealVector&) {
        return RealVector::Constant(1, 123.0).eval();
    };
    CHECK_THROWS_AS(validate_observable_gradients(bad, 1), std::runtime_error);
}
