#include "hybridprop/cli.hpp"

#include "hybridprop/equivalence.hpp"
#include "hybridprop/heisenberg.hpp"
#include "hybridprop/meanfield.hpp"
#include "hybridprop/trajectory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace hybridprop::cli {

namespace {

using nlohmann::json;

constexpr double kGroundTol = 1e-12;
constexpr int kGroundMaxIter = 50000;

// Rotate the dominant component onto the positive real axis so successive
// iterates are comparable.
void fix_phase(QuantumState& v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const Complex pivot = v(imax);
    if (std::abs(pivot) > 0)
        v *= std::conj(pivot) / std::abs(pivot);
}

} // namespace

QuantumState ground_state(const HilbertOperator& h) {
    require_hermitian(h, 1e-12, "ground-state Hamiltonian");
    const Eigen::Index n = h.rows();
    // Gershgorin bound puts the shift strictly below the lowest eigenvalue,
    // so the iteration converges to the bottom of the spectrum.
    const double bound = h.cwiseAbs().rowwise().sum().maxCoeff();
    const double shift = -(bound + 1.0);
    Eigen::PartialPivLU<HilbertOperator> lu(h - shift * identity_operator(n));

    QuantumState v = QuantumState::Zero(n);
    v(0) = 1.0;
    for (int iter = 0; iter < kGroundMaxIter; ++iter) {
        QuantumState w = lu.solve(v);
        w.normalize();
        fix_phase(w);
        if ((w - v).norm() <= kGroundTol)
            return w;
        v = std::move(w);
    }
    throw std::runtime_error("ground_state: inverse-power iteration did not converge");
}

namespace {

Complex parse_complex_amplitude(std::string tok) {
    std::erase_if(tok, [](unsigned char ch) { return std::isspace(ch); });
    if (tok.empty())
        throw std::invalid_argument("initial state: empty amplitude");
    // Accept "a", "bi", "a+bi", "a-bi" (also the engineering 'j' suffix).
    auto parse_real = [](const std::string& s) {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument("initial state: bad number \"" + s + "\"");
        return v;
    };
    const bool imaginary_tail = tok.back() == 'i' || tok.back() == 'j';
    if (!imaginary_tail)
        return Complex(parse_real(tok), 0.0);
    tok.pop_back();
    // Split at the last sign that is not a leading sign or part of an exponent.
    size_t split = std::string::npos;
    for (size_t i = tok.size(); i-- > 1;) {
        if ((tok[i] == '+' || tok[i] == '-') && tok[i - 1] != 'e' && tok[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) {
        if (tok.empty() || tok == "+" || tok == "-")
            tok += "1";
        return Complex(0.0, parse_real(tok));
    }
    std::string imag = tok.substr(split);
    if (imag == "+" || imag == "-")
        imag += "1";
    return Complex(parse_real(tok.substr(0, split)), parse_real(imag));
}

} // namespace

QuantumState parse_initial_state(const std::string& spec, const HybridModel& model,
                                 std::ostream& warn) {
    const Eigen::Index n = model.dim();
    if (spec == "ground")
        return ground_state(model.quantum_hamiltonian);

    if (spec.find(',') == std::string::npos && spec.find('i') == std::string::npos &&
        spec.find('j') == std::string::npos && spec.find('.') == std::string::npos) {
        // Plain integer: basis index.
        int index = 0;
        const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
        if (ec == std::errc() && ptr == spec.data() + spec.size()) {
            if (index < 0 || index >= n)
                throw std::invalid_argument("initial state: basis index " + std::to_string(index) +
                                            " out of range for dimension " + std::to_string(n));
            QuantumState psi = QuantumState::Zero(n);
            psi(index) = 1.0;
            return psi;
        }
    }

    std::vector<Complex> amps;
    std::string tok;
    std::istringstream stream(spec);
    while (std::getline(stream, tok, ','))
        amps.push_back(parse_complex_amplitude(tok));
    if (static_cast<Eigen::Index>(amps.size()) != n)
        throw std::invalid_argument("initial state: got " + std::to_string(amps.size()) +
                                    " amplitudes for dimension " + std::to_string(n));
    QuantumState psi(n);
    for (Eigen::Index j = 0; j < n; ++j)
        psi(j) = amps[static_cast<size_t>(j)];
    const double norm = psi.norm();
    if (norm == 0.0)
        throw std::invalid_argument("initial state: zero vector");
    if (std::abs(norm - 1.0) > 1e-9)
        warn << "warning: initial state renormalized (norm was " << norm << ")\n";
    psi /= norm;
    return psi;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open output file: " + tmp);
        out << content;
        if (!out)
            throw std::runtime_error("failed writing output file: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

namespace {

struct RunConfig {
    std::string model_path;
    std::string scheme;
    double dt = 1e-3;
    double t_final = 10.0;
    int output_stride = 1;
    std::string initial_state = "0";
    std::vector<double> initial_q;
    std::vector<double> initial_p;
    std::string output_path;
    bool dense_output = false;
    std::vector<int> bench_sizes{8, 32, 128};
    long bench_steps = 2000;
};

int thread_budget() {
    if (const char* env = std::getenv("HYBRIDPROP_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            return v;
    }
    return 1;
}

ClassicalState initial_classical(const RunConfig& cfg, const HybridModel& model) {
    const Eigen::Index m = model.classical_dim();
    RealVector q = RealVector::Zero(m);
    RealVector p = RealVector::Zero(m);
    auto fill = [m](RealVector& target, const std::vector<double>& values, const char* what) {
        if (values.empty())
            return;
        if (static_cast<Eigen::Index>(values.size()) != m)
            throw std::invalid_argument(std::string(what) + " has " + std::to_string(values.size()) +
                                        " entries for " + std::to_string(m) + " classical modes");
        for (Eigen::Index j = 0; j < m; ++j)
            target(j) = values[static_cast<size_t>(j)];
    };
    fill(q, cfg.initial_q, "--Q0");
    fill(p, cfg.initial_p, "--P0");
    return ClassicalState{q, p};
}

std::string report_json(const DeviationReport& rep) {
    json j;
    j["maxAbsDeltaQ"] = rep.max_abs_delta_q;
    j["maxAbsDeltaP"] = rep.max_abs_delta_p;
    j["maxAbsDeltaE"] = rep.max_abs_delta_e;
    j["timeOfMax"] = rep.time_of_max;
    j["gridPoints"] = rep.grid_points;
    return j.dump(2) + "\n";
}

std::string bench_csv(const BenchmarkReport& rep) {
    std::string out = "basisSize,meanfieldStepSeconds,heisenbergStepSeconds,ratio\n";
    char buf[160];
    for (const auto& row : rep.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.basis_size,
                      row.meanfield_step_seconds, row.heisenberg_step_seconds, row.ratio);
        out += buf;
    }
    return out;
}

void write_meta(const std::string& out_path, const json& meta) {
    atomic_write_file(out_path + ".meta.json", meta.dump(2) + "\n");
}

int run_trajectory_scheme(const RunConfig& cfg, const HybridModel& model, std::ostream& out,
                          std::ostream& err) {
    const QuantumState psi0 = parse_initial_state(cfg.initial_state, model, err);
    const ClassicalState c0 = initial_classical(cfg, model);
    IntegratorSpec spec;
    spec.dt = cfg.dt;
    spec.output_stride = cfg.output_stride;
    PropagationOptions options;
    options.dense_output = cfg.dense_output;

    auto propagate = [&]() -> Trajectory {
        if (cfg.scheme == "meanfield") {
            MeanFieldState init{psi0, c0, 0.0};
            return propagate_meanfield(model, init, spec, cfg.t_final, options);
        }
        const HeisenbergMode mode = cfg.scheme == "heisenberg-operator" ? HeisenbergMode::OperatorOde
                                                                        : HeisenbergMode::Unitary;
        HeisenbergState init = make_heisenberg_state(model, psi0, c0, mode,
                                                     cfg.scheme == "alternative");
        if (cfg.scheme == "alternative")
            return propagate_alternative(model, init, spec, cfg.t_final, options);
        return propagate_heisenberg(model, init, spec, cfg.t_final, options);
    };

    try {
        const Trajectory traj = propagate();
        atomic_write_file(cfg.output_path, trajectory_csv(traj));
        if (traj.accuracy_warning) {
            write_meta(cfg.output_path, json{{"scheme", traj.scheme}, {"accuracyWarning", true}});
            err << "warning: unitarity defect exceeded 1e-6 during the run\n";
        }
        out << "wrote " << traj.rows.size() << " rows to " << cfg.output_path << "\n";
        return 0;
    } catch (const DivergenceError& e) {
        atomic_write_file(cfg.output_path, trajectory_csv(e.partial));
        write_meta(cfg.output_path, json{{"scheme", e.scheme},
                                         {"diverged", true},
                                         {"divergenceStep", e.step}});
        err << e.what() << "; partial output preserved in " << cfg.output_path << "\n";
        return 2;
    }
}

int run_compare(const RunConfig& cfg, const HybridModel& model, std::ostream& out,
                std::ostream& err) {
    const QuantumState psi0 = parse_initial_state(cfg.initial_state, model, err);
    const ClassicalState c0 = initial_classical(cfg, model);
    IntegratorSpec spec;
    spec.dt = cfg.dt;
    spec.output_stride = cfg.output_stride;
    const bool concurrent = thread_budget() >= 2;
    const DeviationReport rep = compare_schemes(model, psi0, c0, spec, cfg.t_final,
                                                HeisenbergMode::OperatorOde, concurrent);
    atomic_write_file(cfg.output_path, report_json(rep));
    out << "wrote deviation report to " << cfg.output_path << "\n";
    return 0;
}

int run_check(const RunConfig& cfg, const HybridModel& model, std::ostream& out,
              std::ostream& err) {
    const QuantumState psi0 = parse_initial_state(cfg.initial_state, model, err);
    const ClassicalState c0 = initial_classical(cfg, model);
    IntegratorSpec spec;
    spec.dt = cfg.dt;
    spec.output_stride = 1; // the centered difference needs every grid point
    PropagationOptions options;
    options.dense_output = true;
    options.freeze_classical = true;

    MeanFieldState mf_init{psi0, c0, 0.0};
    const Trajectory mf = propagate_meanfield(model, mf_init, spec, cfg.t_final, options);
    HeisenbergState hs_init = make_heisenberg_state(model, psi0, c0, HeisenbergMode::Unitary);
    const Trajectory hs = propagate_heisenberg(model, hs_init, spec, cfg.t_final, options);

    json j;
    j["dt"] = cfg.dt;
    j["T"] = cfg.t_final;
    j["meanfieldResidual"] = energy_rate_check(model, mf);
    j["heisenbergResidual"] = energy_rate_check(model, hs);
    atomic_write_file(cfg.output_path, j.dump(2) + "\n");
    out << "wrote energy-rate residuals to " << cfg.output_path << "\n";
    return 0;
}

int run_bench(const RunConfig& cfg, const HybridModel&, const json& model_cfg, std::ostream& out,
              std::ostream& err) {
    if (model_cfg.value("model", "") != "oscillator_oscillator")
        throw std::invalid_argument("bench: needs an oscillator_oscillator model config "
                                    "(the basis size is the benchmark parameter)");
    auto family = [&model_cfg](int n) {
        json cfg_n = model_cfg;
        cfg_n["N"] = n;
        return load_model(cfg_n.dump());
    };
    const BenchmarkReport rep = benchmark_schemes(family, cfg.bench_sizes, cfg.bench_steps);
    atomic_write_file(cfg.output_path, bench_csv(rep));
    for (const auto& note : rep.notes)
        err << "note: " << note << "\n";
    out << "wrote benchmark report to " << cfg.output_path << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"hybridprop — quantum-classical hybrid propagation"};
    app.require_subcommand(1);

    RunConfig cfg;
    CLI::App* run = app.add_subcommand("run", "propagate a model or compare schemes");
    run->add_option("--model", cfg.model_path, "model config file (JSON)")->required();
    run->add_option("--scheme", cfg.scheme, "one of: meanfield, heisenberg-unitary, "
                                            "heisenberg-operator, alternative, compare, bench, check")
        ->required()
        ->check(CLI::IsMember({"meanfield", "heisenberg-unitary", "heisenberg-operator",
                               "alternative", "compare", "bench", "check"}));
    run->add_option("--dt", cfg.dt, "integration step")->check(CLI::PositiveNumber);
    run->add_option("--T", cfg.t_final, "propagation horizon")->check(CLI::PositiveNumber);
    run->add_option("--stride", cfg.output_stride, "output every k-th step")
        ->check(CLI::PositiveNumber);
    run->add_option("--state", cfg.initial_state,
                    "initial quantum state: \"ground\", a basis index, or amplitudes");
    run->add_option("--Q0", cfg.initial_q, "initial coordinates (comma separated)")->delimiter(',');
    run->add_option("--P0", cfg.initial_p, "initial momenta (comma separated)")->delimiter(',');
    run->add_option("--out", cfg.output_path, "output file")->required();
    run->add_flag("--dense", cfg.dense_output, "store the quantum payload at every output row");
    run->add_option("--N", cfg.bench_sizes, "bench: basis sizes (comma separated)")->delimiter(',');
    run->add_option("--steps", cfg.bench_steps, "bench: step budget per scheme and size");

    std::vector<const char*> argv;
    argv.push_back("hybridprop");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        err << "run 'hybridprop run --help' for the full flag list\n";
        return 1;
    }

    try {
        std::ifstream in(cfg.model_path);
        if (!in)
            throw std::invalid_argument("cannot open model config file: " + cfg.model_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string config_text = buf.str();
        const HybridModel model = load_model(config_text);

        if (cfg.scheme == "compare")
            return run_compare(cfg, model, out, err);
        if (cfg.scheme == "check")
            return run_check(cfg, model, out, err);
        if (cfg.scheme == "bench")
            return run_bench(cfg, model, json::parse(config_text), out, err);
        return run_trajectory_scheme(cfg, model, out, err);
    } catch (const DivergenceError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace hybridprop::cli
