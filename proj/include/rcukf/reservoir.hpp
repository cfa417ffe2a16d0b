#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <vector>

#include "rcukf/trajectory.hpp"

namespace rcukf {

struct ReservoirConfig {
    int reservoir_size = 300;
    int input_dim = 1;
    int output_dim = 1;
    double leak_rate = 1.0;       // in (0, 1]
    double spectral_radius = 0.9; // target rho(W), in (0, 1)
    double input_scale = 1.0;     // multiplies W_in after init
    double connectivity = 0.1;    // fraction of nonzero recurrent weights, in (0, 1]
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainConfig {
    double ridge_delta = 1e-6; // >= 0
    int washout = 100;         // initial teacher-forced steps discarded

    void validate() const;
};

/// Descriptive scalars attached to explicit weights when rebuilding a
/// reservoir (model loading, tests). output_dim <= 0 means "derive": from
/// the readout rows when present, from the input columns otherwise.
struct ReservoirDescriptor {
    double leak_rate = 1.0;
    double target_spectral_radius = 0.0; // 0 when unknown
    double input_scale = 1.0;
    double connectivity = 1.0;
    std::uint64_t seed = 0;
    int output_dim = 0;
};

/// Echo state network: fixed random input and recurrent weights, leaky-tanh
/// state update, ridge-trained linear readout.
///
/// W_in entries are i.i.d. uniform on [-1, 1] times input_scale. W entries
/// are i.i.d. uniform on [-1, 1] with a (1 - connectivity) fraction zeroed,
/// rescaled so rho(W) equals the configured target. Construction is
/// deterministic for a fixed seed.
class Reservoir {
public:
    explicit Reservoir(const ReservoirConfig& cfg);

    /// Builds a reservoir from explicit weights. Passing readout weights
    /// marks the reservoir trained.
    static Reservoir from_weights(Eigen::MatrixXd input_weights,
                                  const Eigen::MatrixXd& recurrent_weights,
                                  const ReservoirDescriptor& desc = {},
                                  std::optional<Eigen::MatrixXd> readout_weights = std::nullopt);

    int size() const { return static_cast<int>(recurrent_.rows()); }
    int input_dim() const { return static_cast<int>(input_weights_.cols()); }
    int output_dim() const { return output_dim_; }
    double leak_rate() const { return leak_rate_; }
    double target_spectral_radius() const { return target_radius_; }
    double input_scale() const { return input_scale_; }
    double connectivity() const { return connectivity_; }
    std::uint64_t seed() const { return seed_; }
    bool trained() const { return readout_weights_.has_value(); }

    const Eigen::SparseMatrix<double>& recurrent_weights() const { return recurrent_; }
    const Eigen::MatrixXd& input_weights() const { return input_weights_; }
    /// Throws ConfigError when the reservoir is untrained.
    const Eigen::MatrixXd& readout_weights() const;

    const Eigen::VectorXd& state() const { return state_; }
    void set_state(Eigen::VectorXd r);
    void reset_state() { state_.setZero(); }

    /// r' = (1 - alpha) r + alpha tanh(W r + W_in x). Pure; no member state touched.
    Eigen::VectorXd step_state(const Eigen::VectorXd& r, const Eigen::VectorXd& x) const;

    /// Advances the internal state with input x and returns it.
    const Eigen::VectorXd& update_state(const Eigen::VectorXd& x);

    /// y = W_out r for the current state. Throws ConfigError when untrained.
    Eigen::VectorXd readout() const;

    /// Teacher-forced ridge training of the readout.
    ///
    /// Resets the state to zero, drives through all inputs, collects states
    /// from index `washout` on, and solves the regularized least-squares
    /// system in closed form. Leaves the state warmed at the end of the
    /// drive and remembers targets.back() as the autonomous feedback seed.
    void train(const std::vector<Eigen::VectorXd>& inputs,
               const std::vector<Eigen::VectorXd>& targets,
               const TrainConfig& cfg);

    /// Per-output-dimension mean squared one-step residual on the training
    /// set (post-washout). Available after train().
    const Eigen::VectorXd& training_residual_variance() const;

    /// Closed-loop generation: feeds each prediction back as the next input.
    /// The first step consumes the last training target; requires
    /// input_dim == output_dim and a trained readout. Works on a copy of the
    /// current (warmed) state. steps == 0 yields an empty trajectory.
    Trajectory predict_autonomous(int steps, double t0 = 0.0, double dt = 1.0) const;

    /// Closed-loop generation from an explicit first input, for models whose
    /// training context is not available (e.g. loaded from file).
    Trajectory free_run(const Eigen::VectorXd& first_input, int steps,
                        double t0 = 0.0, double dt = 1.0) const;

private:
    Reservoir() = default;

    Eigen::MatrixXd input_weights_;          // n_r x n
    Eigen::SparseMatrix<double> recurrent_;  // n_r x n_r
    std::optional<Eigen::MatrixXd> readout_weights_; // m x n_r once trained
    Eigen::VectorXd state_;                  // n_r
    Eigen::VectorXd residual_variance_;      // m, after train
    std::optional<Eigen::VectorXd> feedback_seed_;   // last training target
    int output_dim_ = 0;
    double leak_rate_ = 1.0;
    double target_radius_ = 0.0; // 0 when unknown (from_weights)
    double input_scale_ = 1.0;
    double connectivity_ = 1.0;
    std::uint64_t seed_ = 0;
};

/// Closed-form ridge readout: solves (S S^T + delta I) X = S T^T and returns
/// X^T, the m x n_r readout, with S the n_r x N state matrix and T the m x N
/// target matrix. Throws NumericalError when the normal matrix is singular
/// (possible only at delta = 0).
Eigen::MatrixXd ridge_readout(const Eigen::MatrixXd& states,
                              const Eigen::MatrixXd& targets,
                              double delta);

/// Mean squared prediction error plus delta * ||readout||_F^2.
/// Kept as an optimality oracle for the trained readout.
double ridge_loss(const std::vector<Eigen::VectorXd>& predictions,
                  const std::vector<Eigen::VectorXd>& targets,
                  const Eigen::MatrixXd& readout, double delta);

/// Per-dimension mean squared one-step residual of a trained reservoir over
/// a teacher-forced pass, discarding `washout` initial steps. Drives a copy;
/// the reservoir is untouched.
Eigen::VectorXd one_step_residual_variance(const Reservoir& reservoir,
                                           const std::vector<Eigen::VectorXd>& inputs,
                                           const std::vector<Eigen::VectorXd>& targets,
                                           int washout);

} // namespace rcukf
