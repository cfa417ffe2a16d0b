#include "rcukf/systems.hpp"

#include <cmath>
#include <random>

#include "rcukf/errors.hpp"

namespace rcukf {

std::string to_string(SystemKind kind) {
    switch (kind) {
    case SystemKind::Lorenz: return "lorenz";
    case SystemKind::Rossler: return "rossler";
    case SystemKind::MackeyGlass: return "mackey-glass";
    case SystemKind::Lissajous: return "lissajous";
    }
    throw ConfigError("unknown system kind");
}

SystemKind system_kind_from_string(const std::string& name) {
    if (name == "lorenz") return SystemKind::Lorenz;
    if (name == "rossler") return SystemKind::Rossler;
    if (name == "mackey-glass" || name == "mackey_glass") return SystemKind::MackeyGlass;
    if (name == "lissajous") return SystemKind::Lissajous;
    throw ConfigError("unknown system '" + name +
                      "' (expected lorenz, rossler, mackey-glass or lissajous)");
}

SystemSpec SystemSpec::standard(SystemKind kind) {
    SystemSpec spec;
    spec.kind = kind;
    switch (kind) {
    case SystemKind::Lorenz:
    case SystemKind::Rossler:
        spec.dt = 0.01;
        spec.process_noise_std = std::sqrt(0.1);
        break;
    case SystemKind::MackeyGlass:
        spec.dt = 1.0;
        spec.process_noise_std = std::sqrt(0.01);
        break;
    case SystemKind::Lissajous:
        spec.dt = 0.01;
        spec.process_noise_std = std::sqrt(0.1);
        break;
    }
    return spec;
}

int SystemSpec::dim() const {
    switch (kind) {
    case SystemKind::Lorenz:
    case SystemKind::Rossler: return 3;
    case SystemKind::MackeyGlass: return 1;
    case SystemKind::Lissajous: return 2;
    }
    throw ConfigError("unknown system kind");
}

Eigen::VectorXd SystemSpec::default_initial() const {
    switch (kind) {
    case SystemKind::Lorenz:
    case SystemKind::Rossler: return Eigen::Vector3d(1.0, 1.0, 1.0);
    case SystemKind::MackeyGlass: return Eigen::VectorXd::Constant(1, 1.2);
    case SystemKind::Lissajous: return rcukf::lissajous(0.0, lissajous.amplitude);
    }
    throw ConfigError("unknown system kind");
}

void SystemSpec::validate() const {
    if (!(dt > 0.0))
        throw ConfigError("system spec: dt must be positive");
    if (process_noise_std < 0.0)
        throw ConfigError("system spec: process noise std must be non-negative");
    if (kind == SystemKind::MackeyGlass) {
        if (!(mackey_glass.tau > 0.0))
            throw ConfigError("system spec: Mackey-Glass tau must be positive");
        if (std::llround(mackey_glass.tau / dt) < 1)
            throw ConfigError("system spec: Mackey-Glass delay buffer must span >= 1 step");
    }
}

Eigen::Vector3d lorenz_derivative(const Eigen::Vector3d& s, const LorenzParams& p) {
    return {p.sigma * (s.y() - s.x()),
            s.x() * (p.rho - s.z()) - s.y(),
            s.x() * s.y() - p.beta * s.z()};
}

Eigen::Vector3d rossler_derivative(const Eigen::Vector3d& s, const RosslerParams& p) {
    return {-(s.y() + s.z()),
            s.x() + p.a * s.y(),
            p.b + s.z() * (s.x() - p.c)};
}

Eigen::Vector3d lorenz_step(const Eigen::Vector3d& s, const LorenzParams& p, double dt) {
    return s + dt * lorenz_derivative(s, p);
}

Eigen::Vector3d rossler_step(const Eigen::Vector3d& s, const RosslerParams& p, double dt) {
    return s + dt * rossler_derivative(s, p);
}

double mackey_glass_step(std::span<const double> history,
                         const MackeyGlassParams& p, double dt) {
    const long delay = std::llround(p.tau / dt);
    if (delay < 1)
        throw ConfigError("mackey_glass_step: tau/dt must round to >= 1");
    if (history.size() < static_cast<std::size_t>(delay) + 1)
        throw ConfigError("mackey_glass_step: insufficient history (need " +
                          std::to_string(delay + 1) + " values)");

    const double current = history[history.size() - 1];
    const double delayed = history[history.size() - 1 - static_cast<std::size_t>(delay)];
    const double derivative =
        p.beta * delayed / (1.0 + std::pow(delayed, p.exponent)) - p.gamma * current;
    return current + dt * derivative;
}

Eigen::Vector2d lissajous(double t, double amplitude) {
    return {amplitude * std::sin(t), amplitude * std::sin(2.0 * t)};
}

Trajectory generate(const SystemSpec& spec, int n_points, const Eigen::VectorXd& initial) {
    spec.validate();
    if (n_points < 1)
        throw ConfigError("generate: n_points must be >= 1");

    Eigen::VectorXd start = initial.size() == 0 ? spec.default_initial() : initial;
    if (start.size() != spec.dim())
        throw ConfigError("generate: initial state dimension mismatch");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double noise_scale = spec.dt * spec.process_noise_std;
    auto noise = [&](int dims) {
        Eigen::VectorXd v(dims);
        for (int d = 0; d < dims; ++d)
            v(d) = noise_scale == 0.0 ? 0.0 : noise_scale * gauss(rng);
        return v;
    };

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(n_points));
    traj.states.reserve(static_cast<std::size_t>(n_points));
    traj.push_back(0.0, start);

    auto check_finite = [](const Eigen::VectorXd& s, int step) {
        if (!s.allFinite())
            throw NumericalError("generate: state diverged at step " + std::to_string(step));
    };

    switch (spec.kind) {
    case SystemKind::Lorenz:
    case SystemKind::Rossler: {
        Eigen::Vector3d s = start;
        for (int k = 1; k < n_points; ++k) {
            s = spec.kind == SystemKind::Lorenz ? lorenz_step(s, spec.lorenz, spec.dt)
                                                : rossler_step(s, spec.rossler, spec.dt);
            s += noise(3);
            check_finite(s, k);
            traj.push_back(k * spec.dt, s);
        }
        break;
    }
    case SystemKind::MackeyGlass: {
        const long delay = std::llround(spec.mackey_glass.tau / spec.dt);
        // Constant pre-history: the initial value repeated across the delay window.
        std::vector<double> history(static_cast<std::size_t>(delay) + 1, start(0));
        for (int k = 1; k < n_points; ++k) {
            double next = mackey_glass_step(history, spec.mackey_glass, spec.dt);
            next += noise(1)(0);
            history.push_back(next);
            Eigen::VectorXd s(1);
            s << next;
            check_finite(s, k);
            traj.push_back(k * spec.dt, s);
        }
        break;
    }
    case SystemKind::Lissajous: {
        // The exact reference curve plus an integrated noise drift, matching
        // the Euler convention of the differential systems: each step adds
        // dt * noise to the state, and the state carries it forward.
        Eigen::Vector2d drift = Eigen::Vector2d::Zero();
        for (int k = 1; k < n_points; ++k) {
            drift += noise(2);
            Eigen::Vector2d s = lissajous(k * spec.dt, spec.lissajous.amplitude) + drift;
            check_finite(s, k);
            traj.push_back(k * spec.dt, s);
        }
        break;
    }
    }
    return traj;
}

std::vector<Eigen::VectorXd> add_measurement_noise(const Trajectory& traj,
                                                   double noise_std,
                                                   std::uint64_t seed) {
    if (noise_std < 0.0)
        throw ConfigError("add_measurement_noise: std must be non-negative");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(traj.size());
    for (const auto& s : traj.states) {
        Eigen::VectorXd noisy = s;
        if (noise_std > 0.0)
            for (Eigen::Index d = 0; d < noisy.size(); ++d)
                noisy(d) += noise_std * gauss(rng);
        out.push_back(std::move(noisy));
    }
    return out;
}

} // namespace rcukf
