#include "qsim/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsim {

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void emit_trajectory(const TrajectoryRecord& record, const QuditSpec& spec, int sites,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_trajectory: cannot write " + path);
    out << "step\ttime";
    for (int j = 0; j < sites; ++j) {
        for (int lev = 0; lev < spec.total_dim(); ++lev) out << "\tp" << j << "_" << lev;
        out << "\tphi" << j << "\tphi2_" << j << "\tleak" << j;
    }
    out << "\n";
    for (const TrajectorySample& s : record.samples) {
        out << s.step << "\t" << format_value(s.time);
        for (int j = 0; j < sites; ++j) {
            for (double p : s.marginals[j]) out << "\t" << format_value(p);
            out << "\t" << format_value(s.phi_mean[j]) << "\t" << format_value(s.phi_second[j])
                << "\t" << format_value(s.leakage[j]);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("emit_trajectory: write failed for " + path);
}

void emit_distribution(const StateVector& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_distribution: cannot write " + path);
    out << "index";
    for (int j = 0; j < state.sites(); ++j) out << "\tq" << j;
    out << "\tprobability\n";
    for (std::size_t i = 0; i < state.dim(); ++i) {
        out << i;
        for (int j = 0; j < state.sites(); ++j) out << "\t" << state.level_at(i, j);
        out << "\t" << format_value(std::norm(state.amplitudes()[i])) << "\n";
    }
    if (!out) throw std::runtime_error("emit_distribution: write failed for " + path);
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_table: cannot open " + path);
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_table: empty file " + path);
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, '\t')) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, '\t')) row.push_back(std::stod(cell));
        if (row.size() != table.header.size())
            throw std::runtime_error("read_table: ragged row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace qsim
