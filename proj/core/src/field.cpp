#include "qhop/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qhop/dft.hpp"
#include "qhop/pauli.hpp"

namespace qhop {

ScalarField ScalarField::zero(const LatticeSpec& lat) {
    validate(lat);
    ScalarField f;
    f.lattice = lat;
    f.amp.assign(size_t(lat.size()), cdouble(0, 0));
    return f;
}

SpinorField SpinorField::zero(const LatticeSpec& lat) {
    validate(lat);
    SpinorField f;
    f.lattice = lat;
    f.amp.assign(size_t(2 * lat.size()), cdouble(0, 0));
    return f;
}

namespace {

double measure(const LatticeSpec& lat) {
    return std::pow(lat.spacing, lat.dim);
}

double sum_abs2(const std::vector<cdouble>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

}  // namespace

double norm_sq(const ScalarField& f) { return sum_abs2(f.amp) * measure(f.lattice); }
double norm_sq(const SpinorField& f) { return sum_abs2(f.amp) * measure(f.lattice); }

bool all_finite(const ScalarField& f) {
    for (const auto& z : f.amp)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

bool all_finite(const SpinorField& f) {
    for (const auto& z : f.amp)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

PacketProfile PacketProfile::gaussian(double sigma_p) {
    if (!(sigma_p > 0)) throw std::invalid_argument("gaussian packet needs sigma_p > 0");
    PacketProfile p;
    p.kind = Kind::gaussian;
    p.sigma_p = sigma_p;
    return p;
}

PacketProfile PacketProfile::power_law(double exponent) {
    if (!(exponent > 0)) throw std::invalid_argument("power-law packet needs exponent > 0");
    PacketProfile p;
    p.kind = Kind::power_law;
    p.exponent = exponent;
    return p;
}

double PacketProfile::amplitude(double dp) const {
    switch (kind) {
        case Kind::gaussian:
            return std::exp(-dp * dp / (4.0 * sigma_p * sigma_p));
        case Kind::power_law:
            return std::pow(1.0 + dp, -exponent);
    }
    throw std::logic_error("unreachable packet kind");
}

double momentum_distance(const LatticeSpec& lat, const std::array<double, 3>& p,
                         const std::array<double, 3>& p0) {
    double d2 = 0.0;
    for (int j = 0; j < lat.dim; ++j) {
        const double period = 2.0 * std::numbers::pi / lat.spacing;
        double d = std::fmod(p[j] - p0[j], period);
        if (d > period / 2) d -= period;
        if (d < -period / 2) d += period;
        d2 += d * d;
    }
    return std::sqrt(d2);
}

ScalarField make_packet(const LatticeSpec& lat, const PacketProfile& profile,
                        const std::array<double, 3>& p0) {
    ScalarField modes = ScalarField::zero(lat);
    const MomentumGrid grid(lat);
    for (SiteIndex m = 0; m < grid.size(); ++m)
        modes.at(m) = profile.amplitude(momentum_distance(lat, grid.momentum(m), p0));

    ScalarField f = dft_inverse(modes);
    const double n = norm_sq(f);
    if (!(n > 0)) throw std::invalid_argument("packet envelope vanished on this grid");
    const double s = 1.0 / std::sqrt(n);
    for (auto& z : f.amp) z *= s;
    return f;
}

SpinorField make_spinor_packet(const LatticeSpec& lat, const PacketProfile& profile,
                               const std::array<double, 3>& p0,
                               const std::array<double, 3>& spin_axis) {
    const Vec2 chi = spin_up_along(spin_axis);
    SpinorField modes = SpinorField::zero(lat);
    const MomentumGrid grid(lat);
    for (SiteIndex m = 0; m < grid.size(); ++m) {
        const double w = profile.amplitude(momentum_distance(lat, grid.momentum(m), p0));
        modes.at(m, 0) = w * chi(0);
        modes.at(m, 1) = w * chi(1);
    }

    SpinorField f = dft_inverse(modes);
    const double n = norm_sq(f);
    if (!(n > 0)) throw std::invalid_argument("packet envelope vanished on this grid");
    const double s = 1.0 / std::sqrt(n);
    for (auto& z : f.amp) z *= s;
    return f;
}

}  // namespace qhop
