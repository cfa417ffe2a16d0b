#include "rcukf/reservoir.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>
#include <utility>

#include "rcukf/errors.hpp"
#include "rcukf/spectral.hpp"

namespace rcukf {

namespace {

constexpr int kMaxInitAttempts = 16;
constexpr double kDegenerateRadius = 1e-12;

Eigen::SparseMatrix<double> sparsify(const Eigen::MatrixXd& dense) {
    Eigen::SparseMatrix<double> sparse(dense.rows(), dense.cols());
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index i = 0; i < dense.rows(); ++i)
        for (Eigen::Index j = 0; j < dense.cols(); ++j)
            if (dense(i, j) != 0.0)
                triplets.emplace_back(i, j, dense(i, j));
    sparse.setFromTriplets(triplets.begin(), triplets.end());
    sparse.makeCompressed();
    return sparse;
}

} // namespace

void ReservoirConfig::validate() const {
    if (reservoir_size < 1 || input_dim < 1 || output_dim < 1)
        throw ConfigError("reservoir config: all dimensions must be >= 1");
    if (!(leak_rate > 0.0) || leak_rate > 1.0)
        throw ConfigError("reservoir config: leak_rate must be in (0, 1]");
    if (!(spectral_radius > 0.0) || !(spectral_radius < 1.0))
        throw ConfigError("reservoir config: spectral_radius must be in (0, 1)");
    if (!(input_scale > 0.0))
        throw ConfigError("reservoir config: input_scale must be positive");
    if (!(connectivity > 0.0) || connectivity > 1.0)
        throw ConfigError("reservoir config: connectivity must be in (0, 1]");
}

void TrainConfig::validate() const {
    if (ridge_delta < 0.0)
        throw ConfigError("train config: ridge_delta must be non-negative");
    if (washout < 0)
        throw ConfigError("train config: washout must be non-negative");
}

Reservoir::Reservoir(const ReservoirConfig& cfg) {
    cfg.validate();

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> symmetric(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n_r = cfg.reservoir_size;

    input_weights_.resize(n_r, cfg.input_dim);
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < cfg.input_dim; ++j)
            input_weights_(i, j) = cfg.input_scale * symmetric(rng);

    // The recurrent draw can come out with a (near-)zero spectral radius,
    // which cannot be rescaled; redraw a bounded number of times.
    Eigen::MatrixXd recurrent(n_r, n_r);
    double radius = 0.0;
    int attempt = 0;
    for (; attempt < kMaxInitAttempts; ++attempt) {
        recurrent.setZero();
        for (int i = 0; i < n_r; ++i)
            for (int j = 0; j < n_r; ++j)
                if (unit(rng) < cfg.connectivity)
                    recurrent(i, j) = symmetric(rng);
        radius = spectral_radius(recurrent);
        if (radius > kDegenerateRadius)
            break;
    }
    if (attempt == kMaxInitAttempts)
        throw NumericalError(
            "reservoir init: recurrent matrix spectral radius is zero after " +
            std::to_string(kMaxInitAttempts) + " draws; increase connectivity or size");

    recurrent *= cfg.spectral_radius / radius;
    recurrent_ = sparsify(recurrent);

    state_ = Eigen::VectorXd::Zero(n_r);
    output_dim_ = cfg.output_dim;
    leak_rate_ = cfg.leak_rate;
    target_radius_ = cfg.spectral_radius;
    input_scale_ = cfg.input_scale;
    connectivity_ = cfg.connectivity;
    seed_ = cfg.seed;
}

Reservoir Reservoir::from_weights(Eigen::MatrixXd input_weights,
                                  const Eigen::MatrixXd& recurrent_weights,
                                  const ReservoirDescriptor& desc,
                                  std::optional<Eigen::MatrixXd> readout_weights) {
    if (recurrent_weights.rows() != recurrent_weights.cols())
        throw ConfigError("from_weights: recurrent matrix must be square");
    if (input_weights.rows() != recurrent_weights.rows())
        throw ConfigError("from_weights: input weight rows must match reservoir size");
    if (!(desc.leak_rate > 0.0) || desc.leak_rate > 1.0)
        throw ConfigError("from_weights: leak_rate must be in (0, 1]");
    if (readout_weights && readout_weights->cols() != recurrent_weights.rows())
        throw ConfigError("from_weights: readout columns must match reservoir size");
    if (readout_weights && desc.output_dim > 0 && readout_weights->rows() != desc.output_dim)
        throw ConfigError("from_weights: readout rows disagree with output_dim");
    if (!input_weights.allFinite() || !recurrent_weights.allFinite() ||
        (readout_weights && !readout_weights->allFinite()))
        throw ConfigError("from_weights: weights must be finite");

    Reservoir r;
    r.output_dim_ = readout_weights    ? static_cast<int>(readout_weights->rows())
                  : desc.output_dim > 0 ? desc.output_dim
                                        : static_cast<int>(input_weights.cols());
    r.input_weights_ = std::move(input_weights);
    r.recurrent_ = sparsify(recurrent_weights);
    r.readout_weights_ = std::move(readout_weights);
    r.state_ = Eigen::VectorXd::Zero(r.recurrent_.rows());
    r.leak_rate_ = desc.leak_rate;
    r.target_radius_ = desc.target_spectral_radius;
    r.input_scale_ = desc.input_scale;
    r.connectivity_ = desc.connectivity;
    r.seed_ = desc.seed;
    return r;
}

const Eigen::MatrixXd& Reservoir::readout_weights() const {
    if (!readout_weights_)
        throw ConfigError("reservoir readout requested before training");
    return *readout_weights_;
}

void Reservoir::set_state(Eigen::VectorXd r) {
    if (r.size() != size())
        throw ConfigError("set_state: dimension mismatch");
    state_ = std::move(r);
}

Eigen::VectorXd Reservoir::step_state(const Eigen::VectorXd& r,
                                      const Eigen::VectorXd& x) const {
    if (r.size() != size())
        throw ConfigError("step_state: reservoir state dimension mismatch");
    if (x.size() != input_dim())
        throw ConfigError("step_state: input dimension mismatch");
    Eigen::VectorXd preactivation = recurrent_ * r + input_weights_ * x;
    return (1.0 - leak_rate_) * r + leak_rate_ * preactivation.array().tanh().matrix();
}

const Eigen::VectorXd& Reservoir::update_state(const Eigen::VectorXd& x) {
    state_ = step_state(state_, x);
    return state_;
}

Eigen::VectorXd Reservoir::readout() const {
    return readout_weights() * state_;
}

void Reservoir::train(const std::vector<Eigen::VectorXd>& inputs,
                      const std::vector<Eigen::VectorXd>& targets,
                      const TrainConfig& cfg) {
    cfg.validate();
    if (inputs.size() != targets.size())
        throw ConfigError("train: inputs and targets must have equal length");
    const int steps = static_cast<int>(inputs.size());
    if (steps <= cfg.washout)
        throw ConfigError("train: sequence length must exceed the washout");

    const int collected = steps - cfg.washout;
    Eigen::MatrixXd states(size(), collected);
    Eigen::MatrixXd target_mat(output_dim_, collected);

    reset_state();
    for (int k = 0; k < steps; ++k) {
        if (targets[static_cast<std::size_t>(k)].size() != output_dim_)
            throw ConfigError("train: target dimension mismatch at step " + std::to_string(k));
        update_state(inputs[static_cast<std::size_t>(k)]);
        if (k >= cfg.washout) {
            states.col(k - cfg.washout) = state_;
            target_mat.col(k - cfg.washout) = targets[static_cast<std::size_t>(k)];
        }
    }

    readout_weights_ = ridge_readout(states, target_mat, cfg.ridge_delta);

    const Eigen::MatrixXd residual = target_mat - *readout_weights_ * states;
    residual_variance_ = residual.array().square().rowwise().mean();
    feedback_seed_ = targets.back();
}

const Eigen::VectorXd& Reservoir::training_residual_variance() const {
    if (residual_variance_.size() == 0)
        throw ConfigError("training residual variance requested before training");
    return residual_variance_;
}

Trajectory Reservoir::predict_autonomous(int steps, double t0, double dt) const {
    if (!feedback_seed_)
        throw ConfigError("predict_autonomous: reservoir has no training context");
    return free_run(*feedback_seed_, steps, t0, dt);
}

Trajectory Reservoir::free_run(const Eigen::VectorXd& first_input, int steps,
                               double t0, double dt) const {
    if (!trained())
        throw ConfigError("free_run: reservoir is untrained");
    if (input_dim() != output_dim())
        throw ConfigError("free_run: feedback requires input_dim == output_dim");
    if (steps < 0)
        throw ConfigError("free_run: steps must be non-negative");

    Trajectory out;
    out.times.reserve(static_cast<std::size_t>(steps));
    out.states.reserve(static_cast<std::size_t>(steps));

    Eigen::VectorXd r = state_;
    Eigen::VectorXd x = first_input;
    for (int k = 0; k < steps; ++k) {
        r = step_state(r, x);
        x = *readout_weights_ * r;
        out.push_back(t0 + k * dt, x);
    }
    return out;
}

Eigen::MatrixXd ridge_readout(const Eigen::MatrixXd& states,
                              const Eigen::MatrixXd& targets,
                              double delta) {
    if (states.cols() != targets.cols())
        throw ConfigError("ridge_readout: states and targets must have equal columns");
    if (delta < 0.0)
        throw ConfigError("ridge_readout: delta must be non-negative");

    Eigen::MatrixXd normal = states * states.transpose();
    normal.diagonal().array() += delta;

    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) {
        if (delta == 0.0)
            throw NumericalError(
                "ridge_readout: normal matrix is singular at delta = 0; use delta > 0");
        throw NumericalError("ridge_readout: Cholesky factorization failed");
    }
    return llt.solve(states * targets.transpose()).transpose();
}

double ridge_loss(const std::vector<Eigen::VectorXd>& predictions,
                  const std::vector<Eigen::VectorXd>& targets,
                  const Eigen::MatrixXd& readout, double delta) {
    if (predictions.size() != targets.size())
        throw ConfigError("ridge_loss: sequence length mismatch");
    if (predictions.empty())
        throw ConfigError("ridge_loss: empty sequences");

    double mse = 0.0;
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        if (predictions[k].size() != targets[k].size())
            throw ConfigError("ridge_loss: dimension mismatch at step " + std::to_string(k));
        mse += (predictions[k] - targets[k]).squaredNorm();
    }
    mse /= static_cast<double>(predictions.size());
    return mse + delta * readout.squaredNorm();
}

Eigen::VectorXd one_step_residual_variance(const Reservoir& reservoir,
                                           const std::vector<Eigen::VectorXd>& inputs,
                                           const std::vector<Eigen::VectorXd>& targets,
                                           int washout) {
    if (inputs.size() != targets.size())
        throw ConfigError("residual variance: sequence length mismatch");
    const int steps = static_cast<int>(inputs.size());
    if (steps <= washout)
        throw ConfigError("residual variance: sequence length must exceed the washout");

    const Eigen::MatrixXd& w_out = reservoir.readout_weights();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(reservoir.size());
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(reservoir.output_dim());
    for (int k = 0; k < steps; ++k) {
        r = reservoir.step_state(r, inputs[static_cast<std::size_t>(k)]);
        if (k >= washout)
            sums += (targets[static_cast<std::size_t>(k)] - w_out * r).array().square().matrix();
    }
    return sums / static_cast<double>(steps - washout);
}

} // namespace rcukf
