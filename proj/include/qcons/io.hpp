#pragma once

// CSV / JSON writers for trajectories and sphere fields. Numbers use the
// shortest round-trip decimal form, '.' separator, LF line endings, so equal
// inputs give byte-identical files.

#include "qcons/bloch.hpp"
#include "qcons/integrator.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace qcons {

std::string format_double(double v);

std::string trajectory_csv_header(int n_levels, int n_constraints);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const nlohmann::json& config);
nlohmann::json trajectory_to_json(const Trajectory& traj, const nlohmann::json& config);

void write_field_csv(std::ostream& os, const FieldGrid& grid, const nlohmann::json& config);
nlohmann::json field_to_json(const FieldGrid& grid, const nlohmann::json& config);

}  // namespace qcons
