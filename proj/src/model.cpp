#include "hybridprop/model.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hybridprop {

namespace {

constexpr double kAlgebraTol = 1e-12;
constexpr double kGradientStep = 1e-5;
constexpr double kGradientTol = 1e-6;
constexpr int kGradientSamples = 10;

// Central-difference check of an analytic gradient at seeded sample points.
// Relative criterion with an absolute floor so flat functions pass cleanly.
void check_gradient(const CoordinateFunction& f, const CoordinateGradient& grad,
                    Eigen::Index m, const std::string& name) {
    if (!f)
        throw std::invalid_argument(name + ": missing coefficient function");
    if (!grad)
        throw std::invalid_argument(name + ": missing gradient function");
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int s = 0; s < kGradientSamples; ++s) {
        RealVector q(m);
        for (Eigen::Index j = 0; j < m; ++j)
            q(j) = coord(rng);
        const RealVector g = grad(q);
        if (g.size() != m)
            throw std::invalid_argument(name + ": gradient returned wrong dimension");
        for (Eigen::Index j = 0; j < m; ++j) {
            RealVector qp = q, qm = q;
            qp(j) += kGradientStep;
            qm(j) -= kGradientStep;
            const double fd = (f(qp) - f(qm)) / (2.0 * kGradientStep);
            const double scale = std::max({std::abs(g(j)), std::abs(fd), 1.0});
            if (!(std::abs(g(j) - fd) <= kGradientTol * scale))
                throw std::runtime_error(name + ": analytic gradient component " +
                                         std::to_string(j) + " disagrees with central difference (" +
                                         std::to_string(g(j)) + " vs " + std::to_string(fd) + ")");
        }
    }
}

} // namespace

HilbertOperator HybridModel::interaction_operator(const RealVector& q) const {
    HilbertOperator h = HilbertOperator::Zero(dim(), dim());
    for (const auto& term : coupling)
        h += term.coefficient(q) * term.operator_part;
    return h;
}

HilbertOperator HybridModel::quantum_generator(const RealVector& q) const {
    HilbertOperator h = quantum_hamiltonian;
    for (const auto& term : coupling)
        h += term.coefficient(q) * term.operator_part;
    return h;
}

double HybridModel::kinetic_energy(const RealVector& p) const {
    return (p.array().square() / (2.0 * classical.masses.array())).sum();
}

void validate_model(const HybridModel& model) {
    require_hermitian(model.quantum_hamiltonian, kAlgebraTol, "quantum Hamiltonian");
    if (!(model.hbar > 0))
        throw std::invalid_argument("hbar must be positive");
    const Eigen::Index m = model.classical_dim();
    if (m == 0)
        throw std::invalid_argument("classical subsystem must have at least one mode");
    if (!(model.classical.masses.array() > 0).all())
        throw std::invalid_argument("classical masses must be strictly positive");
    check_gradient(model.classical.potential, model.classical.potential_gradient, m,
                   "classical potential");
    for (size_t k = 0; k < model.coupling.size(); ++k) {
        const auto& term = model.coupling[k];
        const std::string name = "coupling term " + std::to_string(k);
        require_hermitian(term.operator_part, kAlgebraTol, name + " operator part");
        require_same_dim(term.operator_part, model.quantum_hamiltonian);
        check_gradient(term.coefficient, term.gradient, m, name);
    }
    for (const auto& op : model.coordinate_ops) {
        require_hermitian(op, kAlgebraTol, "coordinate operator");
        require_same_dim(op, model.quantum_hamiltonian);
    }
    // The assembled generator must stay Hermitian across configurations; with
    // Hermitian blocks and real coefficients this can only fail if a
    // coefficient function misbehaves, so sample a few points anyway.
    std::mt19937 rng(771122u);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int s = 0; s < kGradientSamples; ++s) {
        RealVector q(m);
        for (Eigen::Index j = 0; j < m; ++j)
            q(j) = coord(rng);
        require_hermitian(model.quantum_generator(q), kAlgebraTol, "assembled quantum generator");
    }
}

HybridModel build_spin_oscillator(double epsilon, double delta, double mass, double omega,
                                  double gamma, double hbar) {
    if (!(mass > 0))
        throw std::invalid_argument("spin_oscillator: mass must be positive");
    if (!(omega > 0))
        throw std::invalid_argument("spin_oscillator: omega must be positive");

    HybridModel model;
    model.hbar = hbar;
    model.quantum_hamiltonian = 0.5 * epsilon * pauli_z() + 0.5 * delta * pauli_x();

    model.classical.masses = RealVector::Constant(1, mass);
    const double k = mass * omega * omega;
    model.classical.potential = [k](const RealVector& q) { return 0.5 * k * q(0) * q(0); };
    model.classical.potential_gradient = [k](const RealVector& q) {
        return RealVector::Constant(1, k * q(0)).eval();
    };

    CouplingTerm term;
    term.coefficient = [gamma](const RealVector& q) { return gamma * q(0); };
    term.gradient = [gamma](const RealVector&) { return RealVector::Constant(1, gamma).eval(); };
    term.operator_part = pauli_z();
    model.coupling.push_back(std::move(term));

    validate_model(model);
    return model;
}

HybridModel build_oscillator_oscillator(int n, double omega_q, double mass_q, double mass_c,
                                        double omega_c, double lambda, bool nonlinear,
                                        double hbar) {
    if (n < 4)
        throw std::invalid_argument("oscillator_oscillator: N must be at least 4 "
                                    "(truncation too severe below that)");
    if (!(omega_q > 0) || !(mass_q > 0) || !(mass_c > 0) || !(omega_c > 0))
        throw std::invalid_argument("oscillator_oscillator: masses and frequencies must be positive");

    HybridModel model;
    model.hbar = hbar;
    const HilbertOperator a = lowering_operator(n);
    model.quantum_hamiltonian =
        hbar * omega_q * (a.adjoint() * a + 0.5 * identity_operator(n));

    model.classical.masses = RealVector::Constant(1, mass_c);
    const double k = mass_c * omega_c * omega_c;
    model.classical.potential = [k](const RealVector& q) { return 0.5 * k * q(0) * q(0); };
    model.classical.potential_gradient = [k](const RealVector& q) {
        return RealVector::Constant(1, k * q(0)).eval();
    };

    const HilbertOperator qhat = position_operator(n, mass_q, omega_q, hbar);

    CouplingTerm term;
    term.coefficient = [lambda](const RealVector& q) { return lambda * q(0); };
    term.gradient = [lambda](const RealVector&) { return RealVector::Constant(1, lambda).eval(); };
    if (nonlinear) {
        term.operator_part = qhat * qhat;
        term.scalarized_operator = [](double qbar) { return qbar * qbar; };
    } else {
        term.operator_part = qhat;
        term.scalarized_operator = [](double qbar) { return qbar; };
    }
    model.coupling.push_back(std::move(term));
    model.coordinate_ops.push_back(qhat);

    validate_model(model);
    return model;
}

double total_meanfield_energy(const HybridModel& model, const QuantumState& psi,
                              const ClassicalState& c) {
    require_same_dim(model.quantum_hamiltonian, psi);
    if (c.dim() != model.classical_dim())
        throw std::invalid_argument("classical state dimension mismatch");
    const Complex quantum = expectation(model.quantum_generator(c.q), psi);
    return quantum.real() + model.kinetic_energy(c.p) + model.classical.potential(c.q);
}

namespace {

using nlohmann::json;

double require_number(const json& cfg, const std::string& key) {
    if (!cfg.contains(key))
        throw std::invalid_argument("model config: missing key \"" + key + "\"");
    if (!cfg.at(key).is_number())
        throw std::invalid_argument("model config: key \"" + key + "\" must be a number");
    return cfg.at(key).get<double>();
}

void reject_unknown_keys(const json& cfg, const std::set<std::string>& allowed) {
    for (const auto& item : cfg.items()) {
        if (!allowed.count(item.key()))
            throw std::invalid_argument("model config: unknown key \"" + item.key() + "\"");
    }
}

} // namespace

HybridModel load_model(const std::string& config_text) {
    json cfg;
    try {
        cfg = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model config: parse error: ") + e.what());
    }
    if (!cfg.is_object())
        throw std::invalid_argument("model config: top level must be an object");
    if (!cfg.contains("model") || !cfg.at("model").is_string())
        throw std::invalid_argument("model config: missing string key \"model\"");
    const std::string name = cfg.at("model").get<std::string>();
    const double hbar = cfg.contains("hbar") ? require_number(cfg, "hbar") : 1.0;

    if (name == "spin_oscillator") {
        reject_unknown_keys(cfg, {"model", "epsilon", "delta", "mass", "omega", "gamma", "hbar"});
        const double epsilon = require_number(cfg, "epsilon");
        const double delta = require_number(cfg, "delta");
        const double mass = require_number(cfg, "mass");
        const double omega = require_number(cfg, "omega");
        const double gamma = require_number(cfg, "gamma");
        return build_spin_oscillator(epsilon, delta, mass, omega, gamma, hbar);
    }
    if (name == "oscillator_oscillator") {
        reject_unknown_keys(cfg, {"model", "N", "omega_q", "mass_q", "mass_c", "omega_c", "lambda",
                                  "nonlinear", "hbar"});
        if (!cfg.contains("N") || !cfg.at("N").is_number_integer())
            throw std::invalid_argument("model config: key \"N\" must be an integer");
        bool nonlinear = false;
        if (cfg.contains("nonlinear")) {
            if (!cfg.at("nonlinear").is_boolean())
                throw std::invalid_argument("model config: key \"nonlinear\" must be a boolean");
            nonlinear = cfg.at("nonlinear").get<bool>();
        }
        const int n = cfg.at("N").get<int>();
        const double omega_q = require_number(cfg, "omega_q");
        const double mass_q = require_number(cfg, "mass_q");
        const double mass_c = require_number(cfg, "mass_c");
        const double omega_c = require_number(cfg, "omega_c");
        const double lambda = require_number(cfg, "lambda");
        return build_oscillator_oscillator(n, omega_q, mass_q, mass_c, omega_c, lambda,
                                           nonlinear, hbar);
    }
    throw std::invalid_argument("model config: unknown model \"" + name + "\"");
}

HybridModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open model config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model(buf.str());
}

} // namespace hybridprop
