#include "rcukf/spectral.hpp"

#include <Eigen/Eigenvalues>

#include "rcukf/errors.hpp"

namespace rcukf {

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw ConfigError("spectral_radius: matrix must be square");
    if (m.rows() == 0)
        return 0.0;
    if (!m.allFinite())
        throw NumericalError("spectral_radius: matrix has non-finite entries");

    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("spectral_radius: eigensolver failed to converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace rcukf
