#include "qhop/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qhop {

void validate(const LatticeSpec& lat) {
    if (lat.dim < 1 || lat.dim > 3)
        throw std::invalid_argument("lattice dim must be 1, 2 or 3, got " + std::to_string(lat.dim));
    for (int j = 0; j < 3; ++j) {
        if (j < lat.dim && lat.extent[j] < 1)
            throw std::invalid_argument("lattice extent must be >= 1 on every used axis");
        if (j >= lat.dim && lat.extent[j] != 1)
            throw std::invalid_argument("lattice extent beyond dim must be 1");
    }
    if (!(lat.spacing > 0.0))
        throw std::invalid_argument("lattice spacing must be positive");
}

LatticeSpec LatticeSpec::cube(int dim, int n, double spacing) {
    LatticeSpec lat;
    lat.dim = dim;
    lat.spacing = spacing;
    for (int j = 0; j < 3; ++j) lat.extent[j] = j < dim ? n : 1;
    validate(lat);
    return lat;
}

LatticeSpec LatticeSpec::box(int dim, std::array<int, 3> extent, double spacing) {
    LatticeSpec lat;
    lat.dim = dim;
    lat.extent = extent;
    lat.spacing = spacing;
    validate(lat);
    return lat;
}

std::array<int, 3> site_coords(const LatticeSpec& lat, SiteIndex site) {
    if (site < 0 || site >= lat.size())
        throw std::out_of_range("site index out of range");
    const auto n3 = lat.extent[2];
    const auto n2 = lat.extent[1];
    std::array<int, 3> c{};
    c[2] = int(site % n3);
    site /= n3;
    c[1] = int(site % n2);
    c[0] = int(site / n2);
    return c;
}

SiteIndex site_index(const LatticeSpec& lat, const std::array<int, 3>& coords) {
    for (int j = 0; j < 3; ++j)
        if (coords[j] < 0 || coords[j] >= lat.extent[j])
            throw std::out_of_range("site coordinate out of range");
    return (SiteIndex(coords[0]) * lat.extent[1] + coords[1]) * lat.extent[2] + coords[2];
}

SiteIndex neighbor(const LatticeSpec& lat, SiteIndex site, int direction) {
    if (direction == 0) return site;
    const int axis = std::abs(direction) - 1;
    if (axis >= lat.dim)
        throw std::invalid_argument("neighbor direction " + std::to_string(direction) +
                                    " invalid for dim " + std::to_string(lat.dim));
    auto c = site_coords(lat, site);
    const int n = lat.extent[axis];
    c[axis] = direction > 0 ? (c[axis] + 1) % n : (c[axis] + n - 1) % n;
    return site_index(lat, c);
}

std::array<int, 3> MomentumGrid::wavenumbers(SiteIndex mode) const {
    auto m = site_coords(lattice, mode);
    std::array<int, 3> k{};
    for (int j = 0; j < 3; ++j) {
        const int n = lattice.extent[j];
        k[j] = m[j] < (n + 1) / 2 ? m[j] : m[j] - n;
    }
    return k;
}

std::array<double, 3> MomentumGrid::momentum(SiteIndex mode) const {
    const auto k = wavenumbers(mode);
    std::array<double, 3> p{};
    for (int j = 0; j < 3; ++j)
        p[j] = 2.0 * std::numbers::pi * k[j] / (lattice.extent[j] * lattice.spacing);
    return p;
}

}  // namespace qhop
