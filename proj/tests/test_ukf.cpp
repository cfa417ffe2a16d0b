#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rcukf/errors.hpp"
#include "rcukf/ukf.hpp"

using namespace rcukf;

namespace {

std::vector<Eigen::VectorXd> apply_linear(const std::vector<Eigen::VectorXd>& points,
                                          const Eigen::MatrixXd& a) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(points.size());
    for (const auto& p : points)
        out.push_back(a * p);
    return out;
}

} // namespace

TEST_CASE("sigma weights: hand evaluation at n = 1") {
    UkfParams params;
    params.eta = 1.0;
    params.kappa = 0.0;
    params.zeta = 2.0;

    const SigmaWeights w = sigma_weights(params, 1);
    REQUIRE(w.mean.size() == 3);
    CHECK(w.mean(0) == doctest::Approx(0.0));
    CHECK(w.mean(1) == doctest::Approx(0.5));
    CHECK(w.mean(2) == doctest::Approx(0.5));
    CHECK(w.cov(0) == doctest::Approx(2.0));
    CHECK(w.cov(1) == doctest::Approx(0.5));
    CHECK(w.cov(2) == doctest::Approx(0.5));
}

TEST_CASE("sigma weights sum to one") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> eta_dist(1e-4, 1.0);
    for (int n : {1, 2, 3, 5, 9}) {
        for (int trial = 0; trial < 20; ++trial) {
            UkfParams params;
            params.eta = eta_dist(rng);
            params.kappa = trial % 2 == 0 ? 0.0 : 3.0 - n;
            if (!(n + params.lambda(n) > 0.0))
                continue;
            const SigmaWeights w = sigma_weights(params, n);
            CHECK(std::abs(w.mean.sum() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("center covariance weight equals center mean weight when eta=1, zeta=0") {
    UkfParams params;
    params.eta = 1.0;
    params.kappa = 0.0;
    params.zeta = 0.0;
    const SigmaWeights w = sigma_weights(params, 3);
    CHECK(w.cov(0) == doctest::Approx(w.mean(0)).epsilon(1e-15));
}

TEST_CASE("sigma weights reject non-positive n + lambda") {
    UkfParams params;
    params.eta = 1e-4;
    params.kappa = -5.0; // n + kappa < 0 for n <= 5
    CHECK_THROWS_AS(sigma_weights(params, 3), ConfigError);
    params.eta = 2.0;
    CHECK_THROWS_AS(sigma_weights(params, 3), ConfigError);
}

TEST_CASE("sigma points: unit scalar belief") {
    UkfParams params;
    params.eta = 1.0;
    params.kappa = 0.0;

    GaussianBelief belief;
    belief.mean = Eigen::VectorXd::Zero(1);
    belief.cov = Eigen::MatrixXd::Identity(1, 1);

    const auto points = sigma_points(belief, params);
    REQUIRE(points.size() == 3);
    CHECK(points[0](0) == doctest::Approx(0.0));
    CHECK(points[1](0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(points[2](0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("sigma points: zero covariance collapses onto the mean") {
    UkfParams params;
    GaussianBelief belief;
    belief.mean = Eigen::Vector3d(1.0, -2.0, 0.5);
    belief.cov = Eigen::Matrix3d::Zero();

    const auto points = sigma_points(belief, params);
    for (const auto& p : points)
        CHECK((p - belief.mean).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("moment reconstruction on random PSD covariances") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        GaussianBelief belief;
        belief.mean = oracle::random_vector(n, rng);
        belief.cov = oracle::random_psd(n, rng);

        UkfParams params;
        params.eta = trial % 2 == 0 ? 1e-3 : 1.0;

        const auto points = sigma_points(belief, params);
        const SigmaWeights w = sigma_weights(params, n);
        const GaussianBelief rebuilt = predict(points, w, Eigen::MatrixXd::Zero(n, n));

        CHECK((rebuilt.mean - belief.mean).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((rebuilt.cov - belief.cov).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("predict: identical points collapse covariance to Q") {
    UkfParams params;
    const SigmaWeights w = sigma_weights(params, 2);
    const Eigen::Vector2d c(0.7, -1.1);
    std::vector<Eigen::VectorXd> points(5, c);

    SUBCASE("Q = 0") {
        const GaussianBelief out = predict(points, w, Eigen::Matrix2d::Zero());
        CHECK((out.mean - c).cwiseAbs().maxCoeff() == 0.0);
        CHECK(out.cov.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("Q passes through") {
        Eigen::Matrix2d q;
        q << 0.3, 0.1, 0.1, 0.2;
        const GaussianBelief out = predict(points, w, q);
        CHECK((out.cov - q).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("predict under a linear map matches A P A^T + Q") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3;
        GaussianBelief belief;
        belief.mean = oracle::random_vector(n, rng);
        belief.cov = oracle::random_psd(n, rng);
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = oracle::random_vector(1, rng)(0);
        const Eigen::MatrixXd q = oracle::random_psd(n, rng, 1e-2);

        UkfParams params;
        const auto points = sigma_points(belief, params);
        const SigmaWeights w = sigma_weights(params, n);
        const GaussianBelief out = predict(apply_linear(points, a), w, q);

        const Eigen::MatrixXd expected = a * belief.cov * a.transpose() + q;
        CHECK((out.mean - a * belief.mean).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((out.cov - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("update limits") {
    UkfParams params;
    params.eta = 1.0; // benign weights for the limit checks
    const int n = 2;
    GaussianBelief prior;
    prior.mean = Eigen::Vector2d(1.0, -1.0);
    prior.cov = Eigen::Matrix2d::Identity() * 0.5;

    const auto points = sigma_points(prior, params);
    const SigmaWeights w = sigma_weights(params, n);
    const GaussianBelief rebuilt = predict(points, w, Eigen::Matrix2d::Zero());
    const Eigen::Vector2d z(2.0, 0.5);

    SUBCASE("uninformative measurement keeps the prior mean") {
        const GaussianBelief post =
            update(rebuilt, points, w, z, {}, 1e12 * Eigen::Matrix2d::Identity());
        CHECK((post.mean - prior.mean).cwiseAbs().maxCoeff() < 1e-3);
    }

    SUBCASE("perfect measurement adopts z") {
        const GaussianBelief post =
            update(rebuilt, points, w, z, {}, Eigen::Matrix2d::Zero());
        CHECK((post.mean - z).cwiseAbs().maxCoeff() < 1e-8);
    }

    SUBCASE("zero innovation keeps the prior mean exactly") {
        const GaussianBelief post = update(rebuilt, points, w, rebuilt.mean, {},
                                           0.01 * Eigen::Matrix2d::Identity());
        CHECK((post.mean - rebuilt.mean).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("scalar update matches the closed-form Kalman step") {
    UkfParams params;
    GaussianBelief prior;
    prior.mean = Eigen::VectorXd::Constant(1, 2.0);
    prior.cov = Eigen::MatrixXd::Constant(1, 1, 0.25);

    const auto points = sigma_points(prior, params);
    const SigmaWeights w = sigma_weights(params, 1);
    const GaussianBelief rebuilt = predict(points, w, Eigen::MatrixXd::Zero(1, 1));

    const double r = 0.1;
    const double z = 2.8;
    const GaussianBelief post =
        update(rebuilt, points, w, Eigen::VectorXd::Constant(1, z), {},
               Eigen::MatrixXd::Constant(1, 1, r));

    const double k = 0.25 / (0.25 + r);
    CHECK(post.mean(0) == doctest::Approx(2.0 + k * (z - 2.0)).epsilon(1e-8));
    CHECK(post.cov(0, 0) == doctest::Approx(0.25 - k * 0.25).epsilon(1e-8));
}

TEST_CASE("UKF equals the Kalman filter on random linear-Gaussian systems") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (double eta : {1.0, 1e-3}) {
        const int n = 3;
        const int m = 2;

        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = gauss(rng);
        a *= 0.9 / std::sqrt(static_cast<double>(n)); // keep the system stable-ish
        Eigen::MatrixXd h(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                h(i, j) = gauss(rng);
        const Eigen::MatrixXd q = oracle::random_psd(n, rng, 1e-2);
        const Eigen::MatrixXd r = oracle::random_psd(m, rng, 1e-2);

        oracle::LinearKalman kf{a, h, q, r, Eigen::VectorXd::Zero(n),
                                Eigen::MatrixXd::Identity(n, n)};

        UkfParams params;
        params.eta = eta;
        const SigmaWeights w = sigma_weights(params, n);
        GaussianBelief belief{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};

        const MeasurementFn h_fn = [&h](const Eigen::VectorXd& x) { return h * x; };

        Eigen::VectorXd truth = oracle::random_vector(n, rng);
        for (int step = 0; step < 100; ++step) {
            truth = a * truth + oracle::random_vector(n, rng) * 0.1;
            const Eigen::VectorXd z = h * truth + oracle::random_vector(m, rng) * 0.1;

            kf.step(z);

            const auto prior_points = sigma_points(belief, params);
            const GaussianBelief predicted =
                predict(apply_linear(prior_points, a), w, q);
            const auto update_points = sigma_points(predicted, params);
            belief = update(predicted, update_points, w, z, h_fn, r);

            CHECK((belief.mean - kf.x).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((belief.cov - kf.p).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("posterior covariance stays symmetric PSD across random updates") {
    std::mt19937_64 rng(17);
    UkfParams params;
    const int n = 3;
    const SigmaWeights w = sigma_weights(params, n);

    GaussianBelief belief{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};
    const Eigen::MatrixXd q = 1e-3 * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = 0.04 * Eigen::MatrixXd::Identity(n, n);

    for (int step = 0; step < 200; ++step) {
        const auto points = sigma_points(belief, params);
        std::vector<Eigen::VectorXd> propagated;
        propagated.reserve(points.size());
        for (const auto& p : points)
            propagated.push_back(p.array().tanh().matrix()); // arbitrary nonlinear map
        const GaussianBelief predicted = predict(propagated, w, q);
        belief = update(predicted, propagated, w, oracle::random_vector(n, rng), {}, r);

        CHECK((belief.cov - belief.cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        Eigen::MatrixXd jittered = belief.cov;
        jittered.diagonal().array() += 1e-9;
        CHECK(Eigen::LLT<Eigen::MatrixXd>(jittered).info() == Eigen::Success);
    }
}

TEST_CASE("non-PSD covariance is rejected after the jitter schedule") {
    Eigen::Matrix2d negative;
    negative << -1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(cholesky_with_jitter(negative), NumericalError);
}
