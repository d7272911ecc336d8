#pragma once

#include <array>
#include <cstdint>

namespace qhop {

using SiteIndex = std::int64_t;

/// Periodic hypercubic lattice in 1-3 spatial dimensions.
///
/// Sites are enumerated row-major over coordinates (n1, n2, n3):
///     index = (n1 * N2 + n2) * N3 + n3
/// with the extent of unused axes fixed to 1, so the last axis always
/// varies fastest.  This matches the layout expected by FFTW and is the
/// enumeration every field and momentum-grid container in this library
/// uses.
struct LatticeSpec {
    int dim = 3;
    std::array<int, 3> extent{1, 1, 1};
    double spacing = 1.0;

    /// Cubic lattice, n sites per axis.
    static LatticeSpec cube(int dim, int n, double spacing = 1.0);
    /// Anisotropic extents; entries beyond dim must be 1 (or omitted).
    static LatticeSpec box(int dim, std::array<int, 3> extent, double spacing = 1.0);

    SiteIndex size() const {
        return SiteIndex(extent[0]) * extent[1] * extent[2];
    }

    bool operator==(const LatticeSpec&) const = default;
};

/// Throws std::invalid_argument unless dim in 1..3, every used extent >= 1,
/// unused extents == 1, and spacing > 0.
void validate(const LatticeSpec& lat);

std::array<int, 3> site_coords(const LatticeSpec& lat, SiteIndex site);
SiteIndex site_index(const LatticeSpec& lat, const std::array<int, 3>& coords);

/// Nearest neighbour of `site` one step along `direction`, with periodic
/// wrap-around.  Directions are the signed axes +1,-1,...,+dim,-dim;
/// direction 0 returns the site itself.  Out-of-range directions throw.
SiteIndex neighbor(const LatticeSpec& lat, SiteIndex site, int direction);

/// Momentum values attached to the DFT modes of a lattice.
///
/// Mode m = (m1, m2, m3) (row-major, same enumeration as sites) carries
///     p_j = 2 pi k_j / (N_j a),
/// where the signed wavenumber k_j is m_j for m_j < (N_j + 1) / 2 and
/// m_j - N_j otherwise, i.e. k_j in [-N_j/2, N_j/2).
struct MomentumGrid {
    LatticeSpec lattice;

    explicit MomentumGrid(const LatticeSpec& lat) : lattice(lat) { validate(lat); }

    std::array<int, 3> wavenumbers(SiteIndex mode) const;
    std::array<double, 3> momentum(SiteIndex mode) const;

    SiteIndex size() const { return lattice.size(); }
};

}  // namespace qhop
