#pragma once

#include <vector>

#include "qhop/field.hpp"
#include "qhop/pauli.hpp"

namespace qhop {

/// Proper rotation of the cubic lattice: a signed permutation matrix with
/// determinant +1.  Entries are exact integers, so composition and
/// direction mapping are exact.
struct CubicRotation {
    // m[r][c], one nonzero entry (+-1) per row and column.
    std::array<std::array<int, 3>, 3> m{};

    static CubicRotation identity();
    CubicRotation operator*(const CubicRotation& other) const;
    bool operator==(const CubicRotation&) const = default;

    int det() const;
    int trace() const;

    /// Image of a signed axis direction n in {+-1,+-2,+-3}: the direction m
    /// with m^ = R n^.  Direction 0 maps to 0.
    int map_direction(int n) const;

    /// Matrix as doubles (column a = image of the a-th axis).
    Eigen::Matrix3d matrix() const;
};

/// All 24 proper cubic rotations, deterministically ordered.  Closed under
/// composition; contains the identity and the 90-degree generators.
std::vector<CubicRotation> enumerate_cubic_group();

/// The group element paired with the spin rotation (I + i sigma^axis)/sqrt(2);
/// axis in {1,2,3}.  Two of these generate the whole group.
CubicRotation rotation_90(int axis);

/// Spin-1/2 rotation paired with r: the unitary u, fixed up to overall
/// sign, satisfying  u sigma^a u^{-1} = sum_m R_ma sigma^m  within 1e-12.
/// For a 90-degree rotation about axis n the convention gives
/// (I + i sigma^n)/sqrt(2).
Mat2 spin_double_cover(const CubicRotation& r);

/// The 3x3 rotation realised by conjugation with u on the Pauli vector:
/// R_ma = 1/2 Re tr(sigma^m u sigma^a u^dagger).  Inverse check for
/// spin_double_cover.
Eigen::Matrix3d conjugation_rotation(const Mat2& u);

/// Active rotation of a spinor field: psi'(R x) = u psi(x), with R acting
/// on site coordinates modulo the periodic extents (the origin is the
/// fixed point).  Requires equal extents on all rotated axes.
SpinorField rotate_field(const SpinorField& f, const CubicRotation& r, const Mat2& u);

}  // namespace qhop
