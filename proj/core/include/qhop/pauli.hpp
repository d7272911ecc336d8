#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace qhop {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

/// sigma(0) = identity, sigma(1..3) = Pauli matrices in the standard basis
/// (sigma3 diagonal).  Any other index throws.
const Mat2& sigma(int mu);

/// v . sigma for a real 3-vector.
Mat2 pauli_dot(const std::array<double, 3>& v);

/// Antisymmetric spin metric epsilon = i sigma2 = [[0,1],[-1,0]].
/// Satisfies epsilon sigma^mu^T epsilon^{-1} covariance relations used by
/// the bilinear-invariant machinery in connection.hpp.
const Mat2& spin_metric();

/// Normalised +1 eigenvector of (axis . sigma); axis need not be unit
/// length but must be nonzero.  Phase convention: the component of larger
/// modulus is real and positive.
Vec2 spin_up_along(const std::array<double, 3>& axis);

/// Normalised -1 eigenvector, orthogonal to spin_up_along(axis).
Vec2 spin_down_along(const std::array<double, 3>& axis);

}  // namespace qhop
