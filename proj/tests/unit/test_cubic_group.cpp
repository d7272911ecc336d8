#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "qhop/cubic_group.hpp"
#include "qhop/dft.hpp"
#include "testutil.hpp"

using namespace qhop;

TEST_CASE("the proper cubic group has 24 elements, closed, with identity") {
    const auto group = enumerate_cubic_group();
    CHECK(group.size() == 24);

    std::set<std::array<std::array<int, 3>, 3>> seen;
    for (const auto& r : group) {
        CHECK(r.det() == 1);
        seen.insert(r.m);
    }
    CHECK(seen.size() == 24);
    CHECK(std::count(group.begin(), group.end(), CubicRotation::identity()) == 1);

    for (const auto& r1 : group)
        for (const auto& r2 : group)
            CHECK(std::count(group.begin(), group.end(), r1 * r2) == 1);

    for (int axis : {1, 2, 3})
        CHECK(std::count(group.begin(), group.end(), rotation_90(axis)) == 1);
}

TEST_CASE("direction mapping matches the matrix action") {
    const auto group = enumerate_cubic_group();
    for (const auto& r : group) {
        std::set<int> images;
        for (int n : {+1, -1, +2, -2, +3, -3}) {
            const int m = r.map_direction(n);
            images.insert(m);
            // Column |n|-1 of the matrix, signed.
            const int axis = std::abs(n) - 1;
            const int s = n > 0 ? 1 : -1;
            std::array<int, 3> v{};
            for (int i = 0; i < 3; ++i) v[size_t(i)] = s * r.m[size_t(i)][size_t(axis)];
            const int maxis = int(std::find_if(v.begin(), v.end(), [](int x) { return x != 0; }) -
                                  v.begin());
            CHECK(std::abs(m) == maxis + 1);
            CHECK((m > 0 ? 1 : -1) == v[size_t(maxis)]);
        }
        CHECK(images.size() == 6);
        CHECK(r.map_direction(0) == 0);
    }
}

TEST_CASE("spin double cover: convention, pairing, homomorphism up to sign") {
    const cdouble I{0, 1};

    CHECK((spin_double_cover(CubicRotation::identity()) - Mat2::Identity()).norm() < 1e-14);

    const Mat2 u3 = spin_double_cover(rotation_90(3));
    const Mat2 expect3 = (Mat2::Identity() + I * sigma(3)) / std::sqrt(2.0);
    CHECK(std::min((u3 - expect3).norm(), (u3 + expect3).norm()) < 1e-14);
    // It rotates sigma1 into -sigma2: a 90-degree turn of the (1,2) plane.
    CHECK((u3 * sigma(1) * u3.adjoint() + sigma(2)).norm() < 1e-13);

    const auto group = enumerate_cubic_group();
    for (const auto& r : group) {
        const Mat2 u = spin_double_cover(r);
        CHECK((u * u.adjoint() - Mat2::Identity()).norm() < 1e-13);
        // Conjugation reproduces the 3x3 matrix.
        CHECK((conjugation_rotation(u) - r.matrix()).norm() < 1e-12);
    }

    for (const auto& r1 : group)
        for (const auto& r2 : group) {
            const Mat2 lhs = spin_double_cover(r1 * r2);
            const Mat2 rhs = spin_double_cover(r1) * spin_double_cover(r2);
            CHECK(std::min((lhs - rhs).norm(), (lhs + rhs).norm()) < 1e-12);
        }
}

TEST_CASE("rotating a field: inverses, orders, and spin transport") {
    const auto lat = LatticeSpec::cube(3, 4);
    const auto f = qhop::testing::random_spinor_field(lat, 83);

    const auto r = rotation_90(1) * rotation_90(3);
    const Mat2 u = spin_double_cover(r);

    // Four applications of a 90-degree rotation restore the field up to the
    // double-cover sign (u^4 = -1 for 90-degree spin rotations).
    auto g = f;
    const auto r3 = rotation_90(3);
    const Mat2 u3 = spin_double_cover(r3);
    for (int k = 0; k < 4; ++k) g = rotate_field(g, r3, u3);
    double diff = 0;
    for (size_t i = 0; i < f.amp.size(); ++i) diff = std::max(diff, std::abs(g.amp[i] + f.amp[i]));
    CHECK(diff < 1e-13);

    // Rotation preserves the norm and is inverted by the transpose element.
    const auto h = rotate_field(f, r, u);
    CHECK(norm_sq(h) == doctest::Approx(norm_sq(f)).epsilon(1e-13));

    CubicRotation rinv;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rinv.m[size_t(i)][size_t(j)] = r.m[size_t(j)][size_t(i)];
    // The lift of the inverse rotation is u^{-1} only up to the double-cover
    // sign, so compare against +-f.
    const auto back = rotate_field(h, rinv, spin_double_cover(rinv));
    double d = 0, dneg = 0;
    for (size_t i = 0; i < f.amp.size(); ++i) {
        d = std::max(d, std::abs(back.amp[i] - f.amp[i]));
        dneg = std::max(dneg, std::abs(back.amp[i] + f.amp[i]));
    }
    CHECK(std::min(d, dneg) < 1e-13);
}
