#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rcukf/reservoir.hpp"
#include "rcukf/trajectory.hpp"
#include "rcukf/ukf.hpp"

namespace rcukf {

/// Reservoir-state bookkeeping across filter steps.
///
/// SharedState keeps a single reservoir state, advanced once per step with
/// the posterior mean and cloned to every sigma point; PerSigma keeps all
/// 2n+1 propagated reservoir states index-aligned between steps.
enum class PropagationMode { SharedState, PerSigma };

struct RcukfConfig {
    UkfParams params;
    NoiseModel noise;                   // Q: n x n, R: m x m
    Eigen::MatrixXd initial_covariance; // P0, n x n
    PropagationMode mode = PropagationMode::SharedState;
    MeasurementFn measurement_fn;       // identity when empty
};

/// Unscented Kalman filter whose process model is a trained reservoir:
/// each sigma point is pushed through the reservoir dynamics and read out,
/// then the standard predict / measurement-update cycle runs on the
/// propagated set.
///
/// The reservoir may take extra input channels beyond the state (a known
/// control or reference signal); those exogenous values are appended to
/// every sigma point before propagation and must then be supplied to
/// warmup/step/run.
class RcukfEstimator {
public:
    RcukfEstimator(Reservoir reservoir, RcukfConfig cfg);

    /// Drives the reservoir state(s) through `history` from zero, sets the
    /// belief mean to the final history state and the covariance to P0.
    /// Must run before step(). Throws ConfigError on empty history.
    /// `exogenous` pairs with the history states when the reservoir has
    /// exogenous channels.
    void warmup(const Trajectory& history,
                const std::vector<Eigen::VectorXd>& exogenous = {});

    /// One filter step: sigma points from the current belief, reservoir
    /// propagation, predict, measurement update, reservoir bookkeeping.
    GaussianBelief step(const Eigen::VectorXd& z,
                        const Eigen::VectorXd& exogenous = Eigen::VectorXd());

    /// Sequential step() over all measurements; returns posterior means.
    /// A failing step aborts with its index in the error message.
    Trajectory run(const std::vector<Eigen::VectorXd>& measurements,
                   double t0 = 0.0, double dt = 1.0,
                   const std::vector<Eigen::VectorXd>& exogenous = {});

    /// Filter loop with the measurement update skipped: the predicted belief
    /// becomes the posterior each step. Baseline for measuring what the
    /// measurement feedback contributes.
    Trajectory run_predict_only(int steps, double t0 = 0.0, double dt = 1.0);

    bool warmed() const { return warmed_; }
    const GaussianBelief& belief() const { return belief_; }
    const Reservoir& reservoir() const { return reservoir_; }
    PropagationMode mode() const { return cfg_.mode; }
    int exogenous_dim() const { return exogenous_dim_; }
    const Eigen::VectorXd& shared_reservoir_state() const { return shared_state_; }
    const std::vector<Eigen::VectorXd>& sigma_reservoir_states() const { return sigma_states_; }

private:
    GaussianBelief advance(const Eigen::VectorXd* z, const Eigen::VectorXd& exogenous);
    Eigen::VectorXd reservoir_input(const Eigen::VectorXd& state,
                                    const Eigen::VectorXd& exogenous) const;

    Reservoir reservoir_;
    RcukfConfig cfg_;
    SigmaWeights weights_;
    GaussianBelief belief_;
    Eigen::VectorXd shared_state_;            // SharedState mode
    std::vector<Eigen::VectorXd> sigma_states_; // PerSigma mode, 2n+1 entries
    int exogenous_dim_ = 0;
    bool warmed_ = false;
};

} // namespace rcukf
