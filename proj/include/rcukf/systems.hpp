#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcukf/trajectory.hpp"

namespace rcukf {

enum class SystemKind { Lorenz, Rossler, MackeyGlass, Lissajous };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

struct RosslerParams {
    double a = 0.2;
    double b = 0.2;
    double c = 5.7;
};

struct MackeyGlassParams {
    double beta = 0.2;
    double gamma = 0.1;
    double tau = 17.0;
    double exponent = 10.0;
};

struct LissajousParams {
    double amplitude = 1.0;
};

/// Ground-truth generator description: which system, its parameters, the
/// Euler step, the process noise level (std dev of the noise term in the
/// differential equation) and the noise seed.
struct SystemSpec {
    SystemKind kind = SystemKind::Lorenz;
    LorenzParams lorenz;
    RosslerParams rossler;
    MackeyGlassParams mackey_glass;
    LissajousParams lissajous;
    double dt = 0.01;
    double process_noise_std = 0.0;
    std::uint64_t seed = 0;

    /// Conventional benchmark setup for a system: textbook parameters,
    /// dt = 0.01 (Mackey-Glass: dt = 1 so the delay buffer spans 17 steps)
    /// and the default process noise level.
    static SystemSpec standard(SystemKind kind);

    int dim() const;
    Eigen::VectorXd default_initial() const;
    void validate() const;
};

Eigen::Vector3d lorenz_derivative(const Eigen::Vector3d& s, const LorenzParams& p);
Eigen::Vector3d rossler_derivative(const Eigen::Vector3d& s, const RosslerParams& p);

/// One noise-free Euler step. Pure.
Eigen::Vector3d lorenz_step(const Eigen::Vector3d& s, const LorenzParams& p, double dt);
Eigen::Vector3d rossler_step(const Eigen::Vector3d& s, const RosslerParams& p, double dt);

/// One noise-free Euler step of the delay equation
/// dx/dt = beta x(t-tau) / (1 + x(t-tau)^n) - gamma x(t).
/// `history` must hold at least round(tau/dt) + 1 values ending at x(t);
/// the delayed value is read round(tau/dt) entries back.
double mackey_glass_step(std::span<const double> history,
                         const MackeyGlassParams& p, double dt);

/// Reference point (R sin t, R sin 2t).
Eigen::Vector2d lissajous(double t, double amplitude);

/// Simulates n_points states starting from `initial` (system default when
/// empty). Gaussian noise of the configured std enters the derivative each
/// step, i.e. the state increment gains dt * noise; the Lissajous reference
/// accumulates the same increments as a drift on top of the exact curve.
/// Deterministic per seed. Throws NumericalError with the step index if the
/// state leaves the finite range.
Trajectory generate(const SystemSpec& spec, int n_points,
                    const Eigen::VectorXd& initial = Eigen::VectorXd());

/// Copy of the trajectory states with i.i.d. N(0, std^2) noise per element.
/// The trajectory itself is untouched.
std::vector<Eigen::VectorXd> add_measurement_noise(const Trajectory& traj,
                                                   double noise_std,
                                                   std::uint64_t seed);

} // namespace rcukf
