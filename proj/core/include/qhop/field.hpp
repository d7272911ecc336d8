#pragma once

#include <complex>
#include <vector>

#include "qhop/lattice.hpp"

namespace qhop {

using cdouble = std::complex<double>;

/// One complex amplitude per site, row-major site order.
struct ScalarField {
    LatticeSpec lattice;
    std::vector<cdouble> amp;
    /// Set by evolution routines when an amplitude stopped being finite or
    /// the norm grew past any physically meaningful scale.
    bool diverged = false;

    static ScalarField zero(const LatticeSpec& lat);
    cdouble& at(SiteIndex s) { return amp[size_t(s)]; }
    const cdouble& at(SiteIndex s) const { return amp[size_t(s)]; }
};

/// Two complex amplitudes per site, interleaved: amp[2*site + c] is spin
/// component c (0 = up, 1 = down along axis 3).
struct SpinorField {
    LatticeSpec lattice;
    std::vector<cdouble> amp;
    bool diverged = false;

    static SpinorField zero(const LatticeSpec& lat);
    cdouble& at(SiteIndex s, int c) { return amp[size_t(2 * s + c)]; }
    const cdouble& at(SiteIndex s, int c) const { return amp[size_t(2 * s + c)]; }
};

/// Lattice-measure squared norm: sum_x |psi(x)|^2 * a^dim.  Conserved by
/// unitary evolution and, because the mode transform is unitary, equal to
/// the same sum taken over momentum modes.
double norm_sq(const ScalarField& f);
double norm_sq(const SpinorField& f);

bool all_finite(const ScalarField& f);
bool all_finite(const SpinorField& f);

/// Momentum-space envelope of a wave packet centred at momentum p0.
///
///   gaussian:   amp(p) ~ exp(-|p - p0|^2 / (4 sigma_p^2))
///   power_law:  amp(p) ~ (1 + |p - p0|)^(-exponent)
///
/// |p - p0| is measured with minimal-image wrapping on the Brillouin-zone
/// torus, so a packet centred near the zone edge is still localised.
struct PacketProfile {
    enum class Kind { gaussian, power_law };
    Kind kind = Kind::gaussian;
    double sigma_p = 0.3;   // gaussian width
    double exponent = 2.0;  // power-law fall-off

    static PacketProfile gaussian(double sigma_p);
    static PacketProfile power_law(double exponent);

    double amplitude(double dp) const;
};

/// Periodic distance |p - p0| on the momentum torus of `lat`.
double momentum_distance(const LatticeSpec& lat, const std::array<double, 3>& p,
                         const std::array<double, 3>& p0);

/// Wave packet with the given envelope, unit norm.  Throws if the envelope
/// vanishes identically on the grid.
ScalarField make_packet(const LatticeSpec& lat, const PacketProfile& profile,
                        const std::array<double, 3>& p0);

/// Spinor packet: same envelope, every mode carrying the same spin state
/// chi = +1 eigenvector of (spin_axis . sigma).  Unit norm.
SpinorField make_spinor_packet(const LatticeSpec& lat, const PacketProfile& profile,
                               const std::array<double, 3>& p0,
                               const std::array<double, 3>& spin_axis = {0, 0, 1});

}  // namespace qhop
