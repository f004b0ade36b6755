#include "hybridprop/trajectory.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace hybridprop {

void require_valid(const IntegratorSpec& spec) {
    if (!(spec.dt > 0))
        throw std::invalid_argument("integrator: dt must be positive");
    if (spec.output_stride < 1)
        throw std::invalid_argument("integrator: output stride must be at least 1");
}

DivergenceError::DivergenceError(std::string scheme_, long step_, Trajectory partial_)
    : std::runtime_error("propagation diverged (non-finite value) at step " +
                         std::to_string(step_) + " [" + scheme_ + "]"),
      scheme(std::move(scheme_)),
      step(step_),
      partial(std::move(partial_)) {}

namespace {

void append_double(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

} // namespace

std::string trajectory_csv(const Trajectory& traj) {
    std::string out;
    const Eigen::Index m = traj.rows.empty() ? 1 : traj.rows.front().q.size();
    out += "t";
    for (Eigen::Index j = 1; j <= m; ++j)
        out += ",Q_" + std::to_string(j);
    for (Eigen::Index j = 1; j <= m; ++j)
        out += ",P_" + std::to_string(j);
    out += ",E_interaction,norm_or_unitarity_defect,total_energy\n";
    for (const auto& row : traj.rows) {
        std::string line;
        append_double(line, row.t);
        for (Eigen::Index j = 0; j < m; ++j) {
            line += ',';
            append_double(line, row.q(j));
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            line += ',';
            append_double(line, row.p(j));
        }
        line += ',';
        append_double(line, row.interaction_energy);
        line += ',';
        append_double(line, row.norm_or_defect);
        line += ',';
        append_double(line, row.total_energy);
        line += '\n';
        out += line;
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << trajectory_csv(traj);
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw std::invalid_argument("trajectory CSV: missing header");
    // Column count determines M: t + 2M + 3 trailing columns.
    size_t columns = 1;
    for (char ch : header)
        if (ch == ',')
            ++columns;
    if (columns < 6 || (columns - 4) % 2 != 0)
        throw std::invalid_argument("trajectory CSV: unexpected column count in header");
    const size_t m = (columns - 4) / 2;

    std::vector<TrajectoryRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(fields, field, ','))
            values.push_back(std::stod(field));
        if (values.size() != columns)
            throw std::invalid_argument("trajectory CSV: row has " + std::to_string(values.size()) +
                                        " fields, expected " + std::to_string(columns));
        TrajectoryRow row;
        row.t = values[0];
        row.q = RealVector(m);
        row.p = RealVector(m);
        for (size_t j = 0; j < m; ++j)
            row.q(static_cast<Eigen::Index>(j)) = values[1 + j];
        for (size_t j = 0; j < m; ++j)
            row.p(static_cast<Eigen::Index>(j)) = values[1 + m + j];
        row.interaction_energy = values[1 + 2 * m];
        row.norm_or_defect = values[2 + 2 * m];
        row.total_energy = values[3 + 2 * m];
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace hybridprop
