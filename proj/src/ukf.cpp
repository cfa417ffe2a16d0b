#include "rcukf/ukf.hpp"

#include <Eigen/Cholesky>
#include <array>
#include <cmath>

#include "rcukf/errors.hpp"

namespace rcukf {

namespace {

constexpr std::array<double, 5> kJitterSchedule = {0.0, 1e-12, 1e-10, 1e-8, 1e-6};

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& p) {
    return 0.5 * (p + p.transpose());
}

} // namespace

void UkfParams::validate(int n) const {
    if (n < 1)
        throw ConfigError("ukf params: state dimension must be >= 1");
    if (eta < 1e-4 || eta > 1.0)
        throw ConfigError("ukf params: eta must be in [1e-4, 1]");
    if (!(n + lambda(n) > 0.0))
        throw ConfigError("ukf params: n + lambda must be positive");
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& p) {
    if (p.rows() != p.cols())
        throw ConfigError("cholesky_with_jitter: matrix must be square");
    const Eigen::MatrixXd sym = symmetrized(p);
    if (sym.cwiseAbs().maxCoeff() == 0.0)
        return Eigen::MatrixXd::Zero(p.rows(), p.cols());

    for (double jitter : kJitterSchedule) {
        Eigen::MatrixXd candidate = sym;
        candidate.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(candidate);
        if (llt.info() == Eigen::Success)
            return llt.matrixL();
    }
    throw NumericalError("covariance is not positive semi-definite within jitter");
}

SigmaWeights sigma_weights(const UkfParams& params, int n) {
    params.validate(n);
    const double lambda = params.lambda(n);
    const double denom = n + lambda;
    const int count = 2 * n + 1;

    SigmaWeights w;
    w.mean = Eigen::VectorXd::Constant(count, 1.0 / (2.0 * denom));
    w.cov = w.mean;
    w.mean(0) = lambda / denom;
    w.cov(0) = lambda / denom + (1.0 - params.eta * params.eta + params.zeta);
    return w;
}

std::vector<Eigen::VectorXd> sigma_points(const GaussianBelief& belief,
                                          const UkfParams& params) {
    const int n = belief.dim();
    params.validate(n);
    if (belief.cov.rows() != n || belief.cov.cols() != n)
        throw ConfigError("sigma_points: covariance shape does not match the mean");

    const double scale = std::sqrt(n + params.lambda(n));
    const Eigen::MatrixXd root = scale * cholesky_with_jitter(belief.cov);

    std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(2 * n + 1));
    points[0] = belief.mean;
    for (int i = 0; i < n; ++i) {
        points[static_cast<std::size_t>(1 + i)] = belief.mean + root.col(i);
        points[static_cast<std::size_t>(1 + n + i)] = belief.mean - root.col(i);
    }
    return points;
}

GaussianBelief predict(const std::vector<Eigen::VectorXd>& propagated,
                       const SigmaWeights& weights,
                       const Eigen::MatrixXd& process_noise) {
    if (propagated.empty() || propagated.size() % 2 == 0)
        throw ConfigError("predict: expected 2n+1 sigma points");
    if (static_cast<Eigen::Index>(propagated.size()) != weights.mean.size())
        throw ConfigError("predict: weight count does not match sigma point count");

    const int dim = static_cast<int>(propagated.front().size());
    if (process_noise.rows() != dim || process_noise.cols() != dim)
        throw ConfigError("predict: process noise shape mismatch");

    // Accumulate the mean in deviations from the center point: identical by
    // the unit weight sum, but immune to the large negative center weight at
    // small eta.
    Eigen::VectorXd mean = propagated[0];
    for (std::size_t i = 1; i < propagated.size(); ++i)
        mean += weights.mean(static_cast<Eigen::Index>(i)) * (propagated[i] - propagated[0]);

    Eigen::MatrixXd cov = process_noise;
    for (std::size_t i = 0; i < propagated.size(); ++i) {
        const Eigen::VectorXd d = propagated[i] - mean;
        cov += weights.cov(static_cast<Eigen::Index>(i)) * d * d.transpose();
    }
    return {std::move(mean), symmetrized(cov)};
}

GaussianBelief update(const GaussianBelief& prior,
                      const std::vector<Eigen::VectorXd>& propagated,
                      const SigmaWeights& weights,
                      const Eigen::VectorXd& z,
                      const MeasurementFn& h,
                      const Eigen::MatrixXd& measurement_noise) {
    if (propagated.empty() || propagated.size() % 2 == 0)
        throw ConfigError("update: expected 2n+1 sigma points");
    if (static_cast<Eigen::Index>(propagated.size()) != weights.mean.size())
        throw ConfigError("update: weight count does not match sigma point count");
    if (!z.allFinite())
        throw ConfigError("update: measurement has non-finite entries");

    std::vector<Eigen::VectorXd> measured(propagated.size());
    for (std::size_t i = 0; i < propagated.size(); ++i)
        measured[i] = h ? h(propagated[i]) : propagated[i];

    const int m = static_cast<int>(measured.front().size());
    if (z.size() != m)
        throw ConfigError("update: measurement dimension mismatch");
    if (measurement_noise.rows() != m || measurement_noise.cols() != m)
        throw ConfigError("update: measurement noise shape mismatch");

    Eigen::VectorXd z_pred = measured[0];
    for (std::size_t i = 1; i < measured.size(); ++i)
        z_pred += weights.mean(static_cast<Eigen::Index>(i)) * (measured[i] - measured[0]);

    Eigen::MatrixXd innovation_cov = measurement_noise;
    Eigen::MatrixXd cross_cov = Eigen::MatrixXd::Zero(prior.dim(), m);
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double wc = weights.cov(static_cast<Eigen::Index>(i));
        const Eigen::VectorXd dz = measured[i] - z_pred;
        innovation_cov += wc * dz * dz.transpose();
        cross_cov += wc * (propagated[i] - prior.mean) * dz.transpose();
    }
    innovation_cov = symmetrized(innovation_cov);

    // K = P_xz P_zz^-1 via a Cholesky solve of P_zz K^T = P_xz^T.
    Eigen::MatrixXd gain;
    {
        const Eigen::MatrixXd root = cholesky_with_jitter(innovation_cov);
        if ((root.diagonal().array() == 0.0).any())
            throw NumericalError("update: singular innovation covariance");
        Eigen::MatrixXd kt = root.triangularView<Eigen::Lower>().solve(cross_cov.transpose());
        root.transpose().triangularView<Eigen::Upper>().solveInPlace(kt);
        gain = kt.transpose();
    }

    GaussianBelief posterior;
    posterior.mean = prior.mean + gain * (z - z_pred);
    posterior.cov = symmetrized(prior.cov - gain * innovation_cov * gain.transpose());
    return posterior;
}

} // namespace rcukf
