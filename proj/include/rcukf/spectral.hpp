#pragma once

#include <Eigen/Dense>

namespace rcukf {

/// Spectral radius (largest eigenvalue modulus) of a square matrix.
///
/// Uses a dense eigensolver. Random reservoir matrices usually carry a
/// complex dominant eigenvalue pair with a narrow modulus gap, so plain
/// power iteration oscillates and cannot certify the radius to the
/// tolerances this library promises; at desk-scale reservoir sizes the
/// dense solve is a one-off millisecond cost at construction.
double spectral_radius(const Eigen::MatrixXd& m);

} // namespace rcukf
