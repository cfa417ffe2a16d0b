#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace rcukf {

/// Scaled unscented transform parameters. lambda is derived on demand and
/// never stored.
struct UkfParams {
    double eta = 1e-3;  // sigma point spread, in [1e-4, 1]
    double kappa = 0.0; // secondary scaling, typically 0 or 3 - n
    double zeta = 2.0;  // prior-knowledge weight term, 2 for Gaussian

    double lambda(int n) const { return eta * eta * (n + kappa) - n; }

    /// Checks eta range and n + lambda > 0 for dimension n.
    void validate(int n) const;
};

/// Mean and covariance weights for the 2n+1 sigma points.
struct SigmaWeights {
    Eigen::VectorXd mean;
    Eigen::VectorXd cov;
};

/// State estimate and covariance at one time step.
struct GaussianBelief {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    int dim() const { return static_cast<int>(mean.size()); }
};

/// Process and measurement noise covariances.
struct NoiseModel {
    Eigen::MatrixXd process;     // Q, n x n
    Eigen::MatrixXd measurement; // R, m x m
};

using MeasurementFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Lower Cholesky factor of the symmetrized matrix, retrying with
/// escalating diagonal jitter (1e-12 up to 1e-6). A zero matrix factors to
/// zero. Throws NumericalError when the matrix is not PSD within jitter.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& p);

/// Mean/covariance weights: W_m(0) = lambda/(n+lambda),
/// W_c(0) = W_m(0) + (1 - eta^2 + zeta), all others 1/(2(n+lambda)).
SigmaWeights sigma_weights(const UkfParams& params, int n);

/// 2n+1 sigma points: the mean, then mean +/- columns of
/// sqrt((n+lambda) P) via lower Cholesky.
std::vector<Eigen::VectorXd> sigma_points(const GaussianBelief& belief,
                                          const UkfParams& params);

/// Weighted mean/covariance of propagated sigma points plus process noise.
/// The mean is accumulated in deviations from the first point, which is
/// algebraically identical (weights sum to one) and avoids the cancellation
/// of the large center weight at small eta.
GaussianBelief predict(const std::vector<Eigen::VectorXd>& propagated,
                       const SigmaWeights& weights,
                       const Eigen::MatrixXd& process_noise);

/// Measurement update: maps the sigma set through h, forms the innovation
/// and cross covariances, and applies the gain K = P_xz P_zz^-1 (computed
/// as a Cholesky solve, never an explicit inverse).
GaussianBelief update(const GaussianBelief& prior,
                      const std::vector<Eigen::VectorXd>& propagated,
                      const SigmaWeights& weights,
                      const Eigen::VectorXd& z,
                      const MeasurementFn& h,
                      const Eigen::MatrixXd& measurement_noise);

} // namespace rcukf
