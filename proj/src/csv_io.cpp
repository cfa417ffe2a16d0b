#include "rcukf/csv_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rcukf/errors.hpp"

namespace rcukf {

std::string format_double(double v) {
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc())
        throw IoError("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

double parse_double(const std::string& token, const std::string& context) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw IoError(context + ": invalid float64 value '" + token + "'");
    return value;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");

    out << 't';
    for (int d = 0; d < traj.dim(); ++d)
        out << ",x" << d;
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_double(traj.times[k]);
        for (Eigen::Index d = 0; d < traj.states[k].size(); ++d)
            out << ',' << format_double(traj.states[k](d));
        out << '\n';
    }
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line))
        throw IoError("'" + path + "': missing header line");
    if (line.rfind("t,", 0) != 0 && line != "t")
        throw IoError("'" + path + "': expected header starting with 't,'");
    const int dim = static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (dim < 1)
        throw IoError("'" + path + "': trajectory has no state columns");

    Trajectory traj;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ','))
            values.push_back(parse_double(cell, "'" + path + "' row " + std::to_string(row)));
        if (static_cast<int>(values.size()) != dim + 1)
            throw IoError("'" + path + "' row " + std::to_string(row) +
                          ": expected " + std::to_string(dim + 1) + " columns");
        Eigen::VectorXd state(dim);
        for (int d = 0; d < dim; ++d)
            state(d) = values[static_cast<std::size_t>(d) + 1];
        traj.push_back(values[0], std::move(state));
    }
    return traj;
}

} // namespace rcukf
