#include "qhop/spinor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qhop/detail/stencil.hpp"
#include "qhop/dft.hpp"

namespace qhop {

int HoppingFamily::slot(int direction) {
    switch (direction) {
        case 0: return 0;
        case +1: return 1;
        case -1: return 2;
        case +2: return 3;
        case -2: return 4;
        case +3: return 5;
        case -3: return 6;
    }
    throw std::invalid_argument("hop direction must be 0 or +-1..+-3");
}

HoppingFamily hopping_matrices(const SpinorHopping& model) {
    HoppingFamily fam;
    const Mat2 id = sigma(0);
    fam.matrix(0) = model.epsilon * id;
    for (int n = 1; n <= 3; ++n) {
        fam.matrix(+n) = model.eta * id + model.kappa * sigma(n);
        fam.matrix(-n) = model.eta * id - model.kappa * sigma(n);
    }
    return fam;
}

namespace {

// Scalar part A(p) and sine vector of the symbol.
struct SymbolParts {
    cdouble scalar;            // epsilon + 2 eta sum cos
    std::array<double, 3> sv;  // sin(a p_j), zero beyond dim
    double s;                  // |sv|
};

SymbolParts symbol_parts(const SpinorHopping& model, const std::array<double, 3>& p) {
    SymbolParts parts{};
    double cs = 0.0;
    for (int j = 0; j < model.lattice.dim; ++j) {
        cs += std::cos(model.lattice.spacing * p[j]);
        parts.sv[size_t(j)] = std::sin(model.lattice.spacing * p[j]);
    }
    parts.scalar = model.epsilon + 2.0 * model.eta * cs;
    parts.s = std::sqrt(parts.sv[0] * parts.sv[0] + parts.sv[1] * parts.sv[1] +
                        parts.sv[2] * parts.sv[2]);
    return parts;
}

}  // namespace

Mat2 spinor_symbol(const SpinorHopping& model, const std::array<double, 3>& p) {
    const auto parts = symbol_parts(model, p);
    Mat2 g = parts.scalar * sigma(0);
    const cdouble minus_2ik = cdouble(0, -2) * model.kappa;
    for (int j = 0; j < model.lattice.dim; ++j) g += minus_2ik * parts.sv[size_t(j)] * sigma(j + 1);
    return g;
}

double sin_norm(const SpinorHopping& model, const std::array<double, 3>& p) {
    return symbol_parts(model, p).s;
}

namespace {

// Closed form of exp(G(p) t).
Mat2 spectral_kernel(const SpinorHopping& model, const SymbolParts& parts, double t) {
    const cdouble scalar_factor = std::exp(parts.scalar * t);
    if (parts.s == 0.0) return scalar_factor * sigma(0);

    const cdouble phi = 2.0 * model.kappa * parts.s * t;
    const cdouble c = std::cos(phi);
    const cdouble s = std::sin(phi);
    Mat2 m = c * sigma(0);
    const cdouble minus_is = cdouble(0, -1) * s;
    for (int j = 0; j < 3; ++j)
        if (parts.sv[size_t(j)] != 0.0)
            m += minus_is * (parts.sv[size_t(j)] / parts.s) * sigma(j + 1);
    return scalar_factor * m;
}

bool finite(const Mat2& m) {
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) return false;
    return true;
}

}  // namespace

SpinorField propagate_spectral_spinor(const SpinorField& f, const SpinorHopping& model,
                                      double t) {
    if (f.lattice != model.lattice)
        throw std::invalid_argument("field and model live on different lattices");
    SpinorField modes = dft_forward(f);
    const MomentumGrid grid(f.lattice);
    bool overflow = false;
    for (SiteIndex m = 0; m < grid.size(); ++m) {
        const auto parts = symbol_parts(model, grid.momentum(m));
        const Mat2 k = spectral_kernel(model, parts, t);
        if (!finite(k)) overflow = true;
        const cdouble a0 = modes.at(m, 0), a1 = modes.at(m, 1);
        modes.at(m, 0) = k(0, 0) * a0 + k(0, 1) * a1;
        modes.at(m, 1) = k(1, 0) * a0 + k(1, 1) * a1;
    }
    SpinorField out = dft_inverse(modes);
    out.diverged = f.diverged || overflow || !all_finite(out);
    return out;
}

SpinorField propagate_stencil_spinor(const SpinorField& f, const SpinorHopping& model, double dt,
                                     int steps, int threads) {
    if (f.lattice != model.lattice)
        throw std::invalid_argument("field and model live on different lattices");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");

    const HoppingFamily fam = hopping_matrices(model);
    detail::HopBlock block;
    for (int k = 0; k < 7; ++k) {
        const int n = HoppingFamily::directions[k];
        if (n != 0 && std::abs(n) > f.lattice.dim) continue;  // leave zero
        block.set(k, fam.h[size_t(k)]);
    }
    return detail::rk4_evolve(
        f, [&block](SiteIndex) -> const detail::HopBlock& { return block; }, dt, steps, threads);
}

Mat2 continuum_weyl_kernel(const std::array<double, 3>& p, double t, double c) {
    const double pn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    if (pn == 0.0) return sigma(0);
    const double phase = c * pn * t;
    Mat2 m = std::cos(phase) * sigma(0);
    const cdouble minus_is = cdouble(0, -1) * std::sin(phase);
    for (int j = 0; j < 3; ++j) m += minus_is * (p[size_t(j)] / pn) * sigma(j + 1);
    return m;
}

Vec2 continuum_weyl_reference(const std::array<double, 3>& p, double t, double c,
                              const Vec2& chi) {
    return continuum_weyl_kernel(p, t, c) * chi;
}

SpinorStabilityReport classify_spinor(const SpinorHopping& model) {
    validate(model.lattice);
    SpinorStabilityReport rep;
    const MomentumGrid grid(model.lattice);

    double sum_re = 0.0;
    double max_re = -INFINITY, min_re = INFINITY;
    double max_split = 0.0;
    for (SiteIndex m = 0; m < grid.size(); ++m) {
        const auto parts = symbol_parts(model, grid.momentum(m));
        // Eigenvalues of G(p): scalar part -+ 2 i kappa s(p).
        const double re_a = parts.scalar.real();
        const double split = 4.0 * model.kappa.imag() * parts.s;
        const double re_plus = re_a + split / 2.0;
        const double re_minus = re_a - split / 2.0;
        sum_re += re_plus + re_minus;
        max_re = std::max(max_re, std::max(re_plus, re_minus));
        min_re = std::min(min_re, std::min(re_plus, re_minus));
        max_split = std::max(max_split, std::abs(split));
    }
    rep.uniform_rate = sum_re / double(2 * grid.size());
    rep.dispersive_spread = max_re - min_re;
    rep.max_re = max_re;
    rep.min_re = min_re;
    rep.helicity_split = max_split;
    rep.phase_rate = symbol_parts(model, {0, 0, 0}).scalar.imag();
    rep.tolerance = 1e-12 * std::max({std::abs(model.epsilon), std::abs(model.eta),
                                      std::abs(model.kappa)});

    if (rep.dispersive_spread > rep.tolerance)
        rep.classification = StabilityClass::mode_dependent_growth;
    else if (std::abs(rep.uniform_rate) > rep.tolerance)
        rep.classification = StabilityClass::uniform_scaling;
    else
        rep.classification = StabilityClass::unitary_after_phase;
    return rep;
}

SpinorField make_helicity_packet(const LatticeSpec& lat, const PacketProfile& profile,
                                 const std::array<double, 3>& p0, int helicity) {
    if (helicity != +1 && helicity != -1)
        throw std::invalid_argument("helicity must be +1 or -1");

    SpinorField modes = SpinorField::zero(lat);
    const MomentumGrid grid(lat);
    SpinorHopping probe;  // only the lattice is used by symbol_parts' sine vector
    probe.lattice = lat;
    for (SiteIndex m = 0; m < grid.size(); ++m) {
        const auto p = grid.momentum(m);
        const double w = profile.amplitude(momentum_distance(lat, p, p0));
        const auto parts = symbol_parts(probe, p);
        const Vec2 chi = parts.s > 0
                             ? (helicity > 0 ? spin_up_along(parts.sv) : spin_down_along(parts.sv))
                             : (helicity > 0 ? spin_up_along({0, 0, 1})
                                             : spin_down_along({0, 0, 1}));
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

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    return denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

PacketTrack track_packet(const SpinorHopping& model, const std::array<double, 3>& p0,
                         int helicity, const VelocityOptions& opt) {
    validate(model.lattice);
    if (std::abs(model.kappa.imag()) > 0)
        throw std::invalid_argument("packet velocity is defined for real kappa only");
    if (opt.samples < 4) throw std::invalid_argument("need at least 4 samples for the fit");

    const LatticeSpec& lat = model.lattice;
    const double c = 2.0 * lat.spacing * std::abs(model.kappa.real());
    double box = INFINITY;
    for (int j = 0; j < lat.dim; ++j) box = std::min(box, lat.extent[j] * lat.spacing);

    double t_max = opt.t_max;
    if (t_max <= 0) {
        if (c == 0) throw std::invalid_argument("kappa = 0 packet does not move; give t_max");
        t_max = 0.25 * box / c;
    }

    const SpinorField f0 =
        make_helicity_packet(lat, PacketProfile::gaussian(opt.sigma_p), p0, helicity);

    PacketTrack track;
    std::array<double, 3> prev{};
    for (int i = 0; i < opt.samples; ++i) {
        const double t = t_max * double(i) / double(opt.samples - 1);
        const SpinorField f = i == 0 ? f0 : propagate_spectral_spinor(f0, model, t);

        std::array<double, 3> pos{};
        for (int j = 0; j < lat.dim; ++j) {
            // Circular mean of the axis coordinate weighted by |psi|^2.
            double cs = 0, sn = 0, tot = 0;
            for (SiteIndex s = 0; s < lat.size(); ++s) {
                const double w = std::norm(f.at(s, 0)) + std::norm(f.at(s, 1));
                const double theta =
                    2.0 * std::numbers::pi * site_coords(lat, s)[size_t(j)] / lat.extent[j];
                cs += w * std::cos(theta);
                sn += w * std::sin(theta);
                tot += w;
            }
            if (std::hypot(cs, sn) < 0.05 * tot)
                throw std::runtime_error(
                    "packet too delocalised for a centroid fit; shorten t_max or enlarge the "
                    "lattice");
            const double period = lat.extent[j] * lat.spacing;
            double x = std::atan2(sn, cs) / (2.0 * std::numbers::pi) * period;
            if (i > 0) {
                // Unwrap towards the previous sample.
                while (x - prev[size_t(j)] > period / 2) x -= period;
                while (x - prev[size_t(j)] < -period / 2) x += period;
                if (std::abs(x - prev[size_t(j)]) > period / 4)
                    throw std::runtime_error(
                        "packet moved more than a quarter period between samples; increase "
                        "samples");
            }
            pos[size_t(j)] = x;
        }
        prev = pos;
        if (!track.centroid.empty()) {
            for (int j = 0; j < lat.dim; ++j) {
                const double period = lat.extent[size_t(j)] * lat.spacing;
                if (std::abs(pos[size_t(j)] - track.centroid.front()[size_t(j)]) > period / 2)
                    throw std::runtime_error(
                        "packet wrapped the lattice before the fit completed; use a larger "
                        "lattice or shorter t_max");
            }
        }
        track.times.push_back(t);
        track.centroid.push_back(pos);
    }

    std::vector<double> axis(track.times.size());
    double v2 = 0;
    for (int j = 0; j < lat.dim; ++j) {
        for (size_t i = 0; i < track.times.size(); ++i) axis[i] = track.centroid[i][size_t(j)];
        track.velocity[size_t(j)] = fit_slope(track.times, axis);
        v2 += track.velocity[size_t(j)] * track.velocity[size_t(j)];
    }
    track.speed = std::sqrt(v2);
    return track;
}

double measure_packet_velocity(const SpinorHopping& model, const std::array<double, 3>& p0,
                               int helicity, const VelocityOptions& opt) {
    return track_packet(model, p0, helicity, opt).speed;
}

ResidualNorms weyl_residual(const std::vector<SpinorField>& history, double dt_sample,
                            double c) {
    if (history.size() < 3)
        throw std::invalid_argument("weyl_residual needs at least 3 snapshots");
    if (!(dt_sample > 0)) throw std::invalid_argument("dt_sample must be positive");
    const LatticeSpec& lat = history.front().lattice;
    for (const auto& f : history)
        if (f.lattice != lat) throw std::invalid_argument("history snapshots on different lattices");

    const double a = lat.spacing;
    const double meas = std::pow(a, lat.dim);
    ResidualNorms norms;
    double sum2 = 0.0;
    for (size_t i = 1; i + 1 < history.size(); ++i) {
        const SpinorField& fm = history[i - 1];
        const SpinorField& f0 = history[i];
        const SpinorField& fp = history[i + 1];
        for (SiteIndex s = 0; s < lat.size(); ++s) {
            Vec2 r;
            r << (fp.at(s, 0) - fm.at(s, 0)) / (2.0 * dt_sample),
                (fp.at(s, 1) - fm.at(s, 1)) / (2.0 * dt_sample);
            for (int j = 1; j <= lat.dim; ++j) {
                const SiteIndex sp = neighbor(lat, s, +j);
                const SiteIndex sm = neighbor(lat, s, -j);
                Vec2 d;
                d << (f0.at(sp, 0) - f0.at(sm, 0)) / (2.0 * a),
                    (f0.at(sp, 1) - f0.at(sm, 1)) / (2.0 * a);
                r += c * sigma(j) * d;
            }
            const double r2 = std::norm(r(0)) + std::norm(r(1));
            norms.max_abs = std::max(norms.max_abs, std::sqrt(r2));
            sum2 += r2 * meas;
        }
    }
    norms.l2 = std::sqrt(sum2 / double(history.size() - 2));
    return norms;
}

}  // namespace qhop
