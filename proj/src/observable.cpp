#include "hybridprop/observable.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hybridprop {

namespace {

void require_consistent(const HybridObservable& obs, const char* what) {
    if (obs.dim <= 0)
        throw std::invalid_argument(std::string(what) + ": observable dimension must be positive");
    for (const auto& term : obs.terms) {
        if (term.operator_part.rows() != obs.dim || term.operator_part.cols() != obs.dim)
            throw std::invalid_argument(std::string(what) +
                                        ": term operator dimension differs from observable dimension");
        if (!term.coefficient)
            throw std::invalid_argument(std::string(what) + ": term missing coefficient function");
    }
}

RealVector term_grad(const PhaseSpaceGradient& g, const RealVector& q, const RealVector& p) {
    if (!g)
        return RealVector::Zero(q.size());
    return g(q, p);
}

} // namespace

HybridObservable HybridObservable::constant(HilbertOperator op) {
    require_square(op, "constant observable");
    HybridObservable obs;
    obs.dim = op.rows();
    ObservableTerm term;
    term.coefficient = [](const RealVector&, const RealVector&) { return 1.0; };
    term.operator_part = std::move(op);
    obs.terms.push_back(std::move(term));
    return obs;
}

HilbertOperator evaluate(const HybridObservable& obs, const ClassicalState& c) {
    require_consistent(obs, "evaluate");
    HilbertOperator out = HilbertOperator::Zero(obs.dim, obs.dim);
    for (const auto& term : obs.terms)
        out += term.coefficient(c.q, c.p) * term.operator_part;
    return out;
}

HilbertOperator qc_bracket(const HybridObservable& a, const HybridObservable& b,
                           const ClassicalState& c, double hbar) {
    require_consistent(a, "qc_bracket argument A");
    require_consistent(b, "qc_bracket argument B");
    if (a.dim != b.dim)
        throw std::invalid_argument("qc_bracket: observable dimension mismatch");

    const HilbertOperator av = evaluate(a, c);
    const HilbertOperator bv = evaluate(b, c);
    HilbertOperator out = av * bv - bv * av;

    // Poisson part: pairwise over terms, dotting gradients over the classical
    // modes. Operator product fixed to A-then-B order.
    for (const auto& ta : a.terms) {
        const RealVector a_q = term_grad(ta.grad_q, c.q, c.p);
        const RealVector a_p = term_grad(ta.grad_p, c.q, c.p);
        if (a_q.isZero(0.0) && a_p.isZero(0.0))
            continue;
        for (const auto& tb : b.terms) {
            const RealVector b_q = term_grad(tb.grad_q, c.q, c.p);
            const RealVector b_p = term_grad(tb.grad_p, c.q, c.p);
            const double poisson = a_q.dot(b_p) - a_p.dot(b_q);
            if (poisson == 0.0)
                continue;
            out += Complex(0, hbar) * poisson * (ta.operator_part * tb.operator_part);
        }
    }
    return out;
}

HilbertOperator heisenberg_rhs_from_bracket(const HybridObservable& a, const HybridObservable& h,
                                            const ClassicalState& c, double hbar) {
    if (!(hbar > 0))
        throw std::invalid_argument("heisenberg_rhs_from_bracket: hbar must be positive");
    return qc_bracket(a, h, c, hbar) / Complex(0, hbar);
}

void validate_observable_gradients(const HybridObservable& obs, Eigen::Index classical_dim) {
    require_consistent(obs, "validate_observable_gradients");
    constexpr double step = 1e-5;
    constexpr double tol = 1e-6;
    std::mt19937 rng(33550336u);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int s = 0; s < 10; ++s) {
        RealVector q(classical_dim), p(classical_dim);
        for (Eigen::Index j = 0; j < classical_dim; ++j) {
            q(j) = coord(rng);
            p(j) = coord(rng);
        }
        for (size_t t = 0; t < obs.terms.size(); ++t) {
            const auto& term = obs.terms[t];
            const RealVector gq = term_grad(term.grad_q, q, p);
            const RealVector gp = term_grad(term.grad_p, q, p);
            for (Eigen::Index j = 0; j < classical_dim; ++j) {
                RealVector qp = q, qm = q, pp = p, pm = p;
                qp(j) += step;
                qm(j) -= step;
                pp(j) += step;
                pm(j) -= step;
                const double fd_q = (term.coefficient(qp, p) - term.coefficient(qm, p)) / (2 * step);
                const double fd_p = (term.coefficient(q, pp) - term.coefficient(q, pm)) / (2 * step);
                const double scale_q = std::max({std::abs(gq(j)), std::abs(fd_q), 1.0});
                const double scale_p = std::max({std::abs(gp(j)), std::abs(fd_p), 1.0});
                if (!(std::abs(gq(j) - fd_q) <= tol * scale_q) ||
                    !(std::abs(gp(j) - fd_p) <= tol * scale_p))
                    throw std::runtime_error("observable term " + std::to_string(t) +
                                             ": analytic gradient disagrees with central difference");
            }
        }
    }
}

} // namespace hybridprop
