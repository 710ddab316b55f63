#pragma once

#include <string>
#include <vector>

#include "qsim/evolution.hpp"
#include "qsim/state_vector.hpp"

namespace qsim {

// Tab-separated, one header row, %.17g values (doubles round-trip exactly).
// Trajectory columns: step, time, then per site total_dim probabilities,
// <phi>, <phi^2>, leakage.
void emit_trajectory(const TrajectoryRecord& record, const QuditSpec& spec, int sites,
                     const std::string& path);

// Joint distribution: linear basis index, per-site levels q0..q{L-1}, probability.
void emit_distribution(const StateVector& state, const std::string& path);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table read_table(const std::string& path);

}  // namespace qsim
