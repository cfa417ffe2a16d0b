#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace rcukf {

/// Time-indexed sequence of state vectors with uniform spacing.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }

    /// State dimension; 0 when empty.
    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }

    /// Sample spacing; 0 when fewer than two samples.
    double dt() const { return times.size() < 2 ? 0.0 : times[1] - times[0]; }

    void push_back(double t, Eigen::VectorXd s) {
        times.push_back(t);
        states.push_back(std::move(s));
    }
};

} // namespace rcukf
