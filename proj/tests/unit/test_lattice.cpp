#include "doctest.h"

#include <numbers>
#include <set>
#include <stdexcept>

#include "qhop/lattice.hpp"

using namespace qhop;

TEST_CASE("site enumeration is row-major with the last axis fastest") {
    const auto lat = LatticeSpec::box(3, {2, 3, 4});
    CHECK(lat.size() == 24);
    CHECK(site_index(lat, {0, 0, 1}) == 1);
    CHECK(site_index(lat, {0, 1, 0}) == 4);
    CHECK(site_index(lat, {1, 0, 0}) == 12);
    for (SiteIndex s = 0; s < lat.size(); ++s)
        CHECK(site_index(lat, site_coords(lat, s)) == s);
}

TEST_CASE("neighbor wraps periodically") {
    const auto lat = LatticeSpec::cube(3, 4);
    const SiteIndex origin = site_index(lat, {0, 0, 0});
    CHECK(site_coords(lat, neighbor(lat, origin, -1)) == std::array<int, 3>{3, 0, 0});
    CHECK(site_coords(lat, neighbor(lat, origin, +1)) == std::array<int, 3>{1, 0, 0});

    const auto line = LatticeSpec::cube(1, 2);
    CHECK(neighbor(line, 1, +1) == 0);

    CHECK(neighbor(lat, 17, 0) == 17);
}

TEST_CASE("opposite steps invert each other and each step is a bijection") {
    const auto lat = LatticeSpec::box(3, {3, 4, 5});
    for (int axis = 1; axis <= 3; ++axis) {
        std::set<SiteIndex> images;
        for (SiteIndex s = 0; s < lat.size(); ++s) {
            CHECK(neighbor(lat, neighbor(lat, s, +axis), -axis) == s);
            images.insert(neighbor(lat, s, +axis));
        }
        CHECK(SiteIndex(images.size()) == lat.size());
    }
}

TEST_CASE("invalid directions and invalid specs throw") {
    const auto lat = LatticeSpec::cube(2, 4);
    CHECK_THROWS_AS(neighbor(lat, 0, +3), std::invalid_argument);
    CHECK_THROWS_AS(neighbor(lat, 0, -3), std::invalid_argument);
    CHECK_THROWS_AS(neighbor(lat, 0, 7), std::invalid_argument);

    LatticeSpec bad = lat;
    bad.dim = 4;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = lat;
    bad.spacing = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = lat;
    bad.extent = {4, 4, 2};  // unused third axis must stay at 1
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("momentum grid carries signed wavenumbers in [-N/2, N/2)") {
    const double pi = std::numbers::pi;

    const auto even = MomentumGrid(LatticeSpec::cube(1, 8, 0.5));
    std::set<int> ks;
    for (SiteIndex m = 0; m < even.size(); ++m) {
        const int k = even.wavenumbers(m)[0];
        ks.insert(k);
        CHECK(k >= -4);
        CHECK(k < 4);
        CHECK(even.momentum(m)[0] == doctest::Approx(2 * pi * k / (8 * 0.5)).epsilon(1e-15));
        // First Brillouin zone [-pi/a, pi/a).
        CHECK(even.momentum(m)[0] >= -pi / 0.5);
        CHECK(even.momentum(m)[0] < pi / 0.5);
    }
    CHECK(ks.size() == 8);
    CHECK(even.wavenumbers(4)[0] == -4);

    const auto odd = MomentumGrid(LatticeSpec::cube(1, 5));
    CHECK(odd.wavenumbers(2)[0] == 2);
    CHECK(odd.wavenumbers(3)[0] == -2);
}
