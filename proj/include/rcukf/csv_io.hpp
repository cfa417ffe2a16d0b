#pragma once

#include <string>

#include "rcukf/trajectory.hpp"

namespace rcukf {

/// Shortest base-10 representation that round-trips the exact float64 value.
std::string format_double(double v);

/// Strict float64 parse of an entire token. Throws IoError on trailing junk.
double parse_double(const std::string& token, const std::string& context);

/// Trajectory CSV: header `t,x0,x1,...`, one row per step.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

} // namespace rcukf
