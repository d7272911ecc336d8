#include "qhop/cubic_group.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qhop {

CubicRotation CubicRotation::identity() {
    CubicRotation r;
    for (int i = 0; i < 3; ++i) r.m[size_t(i)][size_t(i)] = 1;
    return r;
}

CubicRotation CubicRotation::operator*(const CubicRotation& other) const {
    CubicRotation out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int v = 0;
            for (int k = 0; k < 3; ++k) v += m[size_t(i)][size_t(k)] * other.m[size_t(k)][size_t(j)];
            out.m[size_t(i)][size_t(j)] = v;
        }
    return out;
}

int CubicRotation::det() const {
    const auto& a = m;
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

int CubicRotation::trace() const { return m[0][0] + m[1][1] + m[2][2]; }

int CubicRotation::map_direction(int n) const {
    if (n == 0) return 0;
    const int axis = std::abs(n) - 1;
    if (axis > 2) throw std::invalid_argument("direction must be 0 or +-1..+-3");
    const int sign = n > 0 ? 1 : -1;
    for (int i = 0; i < 3; ++i) {
        const int v = m[size_t(i)][size_t(axis)];
        if (v != 0) return (i + 1) * sign * v;
    }
    throw std::logic_error("signed permutation matrix has an empty column");
}

Eigen::Matrix3d CubicRotation::matrix() const {
    Eigen::Matrix3d out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = double(m[size_t(i)][size_t(j)]);
    return out;
}

std::vector<CubicRotation> enumerate_cubic_group() {
    std::vector<CubicRotation> group;
    int perm[3] = {0, 1, 2};
    std::sort(perm, perm + 3);
    do {
        for (int signs = 0; signs < 8; ++signs) {
            CubicRotation r;
            for (int i = 0; i < 3; ++i)
                r.m[size_t(i)][size_t(perm[i])] = (signs >> i) & 1 ? -1 : 1;
            if (r.det() == 1) group.push_back(r);
        }
    } while (std::next_permutation(perm, perm + 3));

    std::sort(group.begin(), group.end(), [](const CubicRotation& a, const CubicRotation& b) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (a.m[size_t(i)][size_t(j)] != b.m[size_t(i)][size_t(j)])
                    return a.m[size_t(i)][size_t(j)] < b.m[size_t(i)][size_t(j)];
        return false;
    });
    return group;
}

CubicRotation rotation_90(int axis) {
    // The element whose spin lift is (I + i sigma^axis)/sqrt(2); its action
    // on the Pauli vector rotates the plane perpendicular to `axis` by 90
    // degrees (sigma1 -> -sigma2 for axis 3).
    CubicRotation r;
    auto set = [&r](int i, int j, int v) { r.m[size_t(i)][size_t(j)] = v; };
    switch (axis) {
        case 1: set(0, 0, 1); set(1, 2, 1); set(2, 1, -1); break;
        case 2: set(0, 2, -1); set(1, 1, 1); set(2, 0, 1); break;
        case 3: set(0, 1, 1); set(1, 0, -1); set(2, 2, 1); break;
        default: throw std::invalid_argument("rotation axis must be 1, 2 or 3");
    }
    return r;
}

Eigen::Matrix3d conjugation_rotation(const Mat2& u) {
    const Mat2 udag = u.adjoint();
    Eigen::Matrix3d r;
    for (int mrow = 1; mrow <= 3; ++mrow)
        for (int acol = 1; acol <= 3; ++acol)
            r(mrow - 1, acol - 1) = 0.5 * (sigma(mrow) * u * sigma(acol) * udag).trace().real();
    return r;
}

Mat2 spin_double_cover(const CubicRotation& r) {
    if (r.det() != 1) throw std::invalid_argument("not a proper rotation");

    const int tr = r.trace();
    Mat2 u;
    if (tr == 3) {
        u = sigma(0);
    } else if (tr == -1) {
        // 180-degree rotation: R = 2 n n^T - I.  Recover the axis from the
        // diagonal, fixing relative signs from the off-diagonal entries.
        std::array<double, 3> n{};
        int pivot = 0;
        for (int i = 0; i < 3; ++i) {
            n[size_t(i)] = std::sqrt(std::max(0.0, (r.m[size_t(i)][size_t(i)] + 1) / 2.0));
            if (n[size_t(i)] > n[size_t(pivot)]) pivot = i;
        }
        for (int i = 0; i < 3; ++i) {
            if (i == pivot) continue;
            if (n[size_t(i)] > 0)
                n[size_t(i)] = r.m[size_t(pivot)][size_t(i)] / (2.0 * n[size_t(pivot)]);
        }
        u = cdouble(0, -1) * pauli_dot(n);
    } else {
        // theta in (0, pi): axis from the antisymmetric part of R.
        const double theta = std::acos((tr - 1) / 2.0);
        const double s2 = 2.0 * std::sin(theta);
        const std::array<double, 3> n{
            (r.m[2][1] - r.m[1][2]) / s2,
            (r.m[0][2] - r.m[2][0]) / s2,
            (r.m[1][0] - r.m[0][1]) / s2,
        };
        u = std::cos(theta / 2) * sigma(0) - cdouble(0, 1) * std::sin(theta / 2) * pauli_dot(n);
    }

    // Conjugation must reproduce r on the Pauli vector.
    if ((conjugation_rotation(u) - r.matrix()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::logic_error("spin lift failed its pairing invariant");
    return u;
}

SpinorField rotate_field(const SpinorField& f, const CubicRotation& r, const Mat2& u) {
    const LatticeSpec& lat = f.lattice;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const bool used = i < lat.dim && j < lat.dim;
            const int v = r.m[size_t(i)][size_t(j)];
            if (!used && v != (i == j ? 1 : 0))
                throw std::invalid_argument("rotation mixes axes beyond the lattice dimension");
            if (used && i != j && v != 0 && lat.extent[size_t(i)] != lat.extent[size_t(j)])
                throw std::invalid_argument("rotation mixes axes of unequal extent");
        }

    SpinorField g = SpinorField::zero(lat);
    g.diverged = f.diverged;
    for (SiteIndex s = 0; s < lat.size(); ++s) {
        const auto c = site_coords(lat, s);
        std::array<int, 3> img{};
        for (int i = 0; i < 3; ++i) {
            int v = 0;
            for (int j = 0; j < 3; ++j) v += r.m[size_t(i)][size_t(j)] * c[size_t(j)];
            const int n = lat.extent[size_t(i)];
            img[size_t(i)] = ((v % n) + n) % n;
        }
        const SiteIndex t = site_index(lat, img);
        g.at(t, 0) = u(0, 0) * f.at(s, 0) + u(0, 1) * f.at(s, 1);
        g.at(t, 1) = u(1, 0) * f.at(s, 0) + u(1, 1) * f.at(s, 1);
    }
    return g;
}

}  // namespace qhop
