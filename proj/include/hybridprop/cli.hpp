#pragma once

#include "hybridprop/model.hpp"
#include "hybridprop/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hybridprop::cli {

/// Lowest eigenvector of a Hermitian operator by inverse-power iteration
/// with a fixed shift below the spectrum, seeded with basis vector 0,
/// converged to 1e-12. Deterministic; no general eigensolver involved.
QuantumState ground_state(const HilbertOperator& h);

/// Initial-state spec: "ground", a basis index, or a comma-separated list of
/// complex amplitudes ("0.6,0.8i,-0.1+0.2i"). Amplitude lists are normalized;
/// a warning line goes to `warn` when renormalization moved the norm by more
/// than 1e-9.
QuantumState parse_initial_state(const std::string& spec, const HybridModel& model,
                                 std::ostream& warn);

/// Writes via a temp file and rename so readers never observe partial output.
void atomic_write_file(const std::string& path, const std::string& content);

/// Entry point behind the binary. Exit codes: 0 success, 1 usage or input
/// error, 2 numerical divergence (partial output preserved, metadata flag
/// written alongside).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hybridprop::cli
