#include "rcukf/estimator.hpp"

#include <string>
#include <utility>

#include "rcukf/errors.hpp"

namespace rcukf {

RcukfEstimator::RcukfEstimator(Reservoir reservoir, RcukfConfig cfg)
    : reservoir_(std::move(reservoir)), cfg_(std::move(cfg)) {
    if (!reservoir_.trained())
        throw ConfigError("rcukf: reservoir must be trained");
    const int n = reservoir_.output_dim();
    exogenous_dim_ = reservoir_.input_dim() - n;
    if (exogenous_dim_ < 0)
        throw ConfigError("rcukf: reservoir input must cover the predicted state");
    if (cfg_.noise.process.rows() != n || cfg_.noise.process.cols() != n)
        throw ConfigError("rcukf: process noise must be n x n");
    if (cfg_.initial_covariance.rows() != n || cfg_.initial_covariance.cols() != n)
        throw ConfigError("rcukf: initial covariance must be n x n");
    if (cfg_.noise.measurement.rows() != cfg_.noise.measurement.cols() ||
        cfg_.noise.measurement.rows() < 1)
        throw ConfigError("rcukf: measurement noise must be square and non-empty");
    cfg_.params.validate(n);
    weights_ = sigma_weights(cfg_.params, n);
}

Eigen::VectorXd RcukfEstimator::reservoir_input(const Eigen::VectorXd& state,
                                                const Eigen::VectorXd& exogenous) const {
    if (exogenous.size() != exogenous_dim_)
        throw ConfigError("rcukf: expected " + std::to_string(exogenous_dim_) +
                          " exogenous input values, got " + std::to_string(exogenous.size()));
    if (exogenous_dim_ == 0)
        return state;
    Eigen::VectorXd joined(state.size() + exogenous.size());
    joined << state, exogenous;
    return joined;
}

void RcukfEstimator::warmup(const Trajectory& history,
                            const std::vector<Eigen::VectorXd>& exogenous) {
    if (history.empty())
        throw ConfigError("rcukf warmup: history must be non-empty");
    if (history.dim() != reservoir_.output_dim())
        throw ConfigError("rcukf warmup: history dimension mismatch");
    if (exogenous_dim_ > 0 && exogenous.size() != history.size())
        throw ConfigError("rcukf warmup: exogenous sequence must match history length");

    Eigen::VectorXd r = Eigen::VectorXd::Zero(reservoir_.size());
    for (std::size_t k = 0; k < history.size(); ++k) {
        const Eigen::VectorXd exo =
            exogenous_dim_ > 0 ? exogenous[k] : Eigen::VectorXd();
        r = reservoir_.step_state(r, reservoir_input(history.states[k], exo));
    }

    shared_state_ = r;
    sigma_states_.assign(static_cast<std::size_t>(2 * reservoir_.output_dim() + 1), r);
    belief_.mean = history.states.back();
    belief_.cov = cfg_.initial_covariance;
    warmed_ = true;
}

GaussianBelief RcukfEstimator::advance(const Eigen::VectorXd* z,
                                       const Eigen::VectorXd& exogenous) {
    if (!warmed_)
        throw ConfigError("rcukf: step before warmup");

    const auto points = sigma_points(belief_, cfg_.params);

    // Each sigma point runs one reservoir step and is read out as the
    // propagated state-space point.
    std::vector<Eigen::VectorXd> reservoir_states(points.size());
    std::vector<Eigen::VectorXd> propagated(points.size());
    const Eigen::MatrixXd& w_out = reservoir_.readout_weights();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Eigen::VectorXd& r_prev =
            cfg_.mode == PropagationMode::SharedState ? shared_state_ : sigma_states_[i];
        reservoir_states[i] =
            reservoir_.step_state(r_prev, reservoir_input(points[i], exogenous));
        propagated[i] = w_out * reservoir_states[i];
    }

    const GaussianBelief predicted = predict(propagated, weights_, cfg_.noise.process);
    const GaussianBelief posterior =
        z ? update(predicted, propagated, weights_, *z, cfg_.measurement_fn,
                   cfg_.noise.measurement)
          : predicted;

    if (cfg_.mode == PropagationMode::SharedState)
        shared_state_ = reservoir_.step_state(
            shared_state_, reservoir_input(posterior.mean, exogenous));
    else
        sigma_states_ = std::move(reservoir_states);

    belief_ = posterior;
    return posterior;
}

GaussianBelief RcukfEstimator::step(const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& exogenous) {
    if (!z.allFinite())
        throw ConfigError("rcukf step: measurement has non-finite entries");
    return advance(&z, exogenous);
}

Trajectory RcukfEstimator::run(const std::vector<Eigen::VectorXd>& measurements,
                               double t0, double dt,
                               const std::vector<Eigen::VectorXd>& exogenous) {
    if (exogenous_dim_ > 0 && exogenous.size() != measurements.size())
        throw ConfigError("rcukf run: exogenous sequence must match measurement count");
    Trajectory out;
    out.times.reserve(measurements.size());
    out.states.reserve(measurements.size());
    for (std::size_t k = 0; k < measurements.size(); ++k) {
        const Eigen::VectorXd exo =
            exogenous_dim_ > 0 ? exogenous[k] : Eigen::VectorXd();
        try {
            out.push_back(t0 + static_cast<double>(k) * dt, step(measurements[k], exo).mean);
        } catch (const NumericalError& e) {
            throw NumericalError("rcukf run failed at step " + std::to_string(k) + ": " +
                                 e.what());
        }
    }
    return out;
}

Trajectory RcukfEstimator::run_predict_only(int steps, double t0, double dt) {
    if (steps < 0)
        throw ConfigError("rcukf run_predict_only: steps must be non-negative");
    if (exogenous_dim_ > 0)
        throw ConfigError("rcukf run_predict_only: not available with exogenous inputs");
    Trajectory out;
    out.times.reserve(static_cast<std::size_t>(steps));
    out.states.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k)
        out.push_back(t0 + k * dt, advance(nullptr, Eigen::VectorXd()).mean);
    return out;
}

} // namespace rcukf
