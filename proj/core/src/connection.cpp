#include "qhop/connection.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qhop/detail/stencil.hpp"

namespace qhop {

ConnectionField ConnectionField::zero(const LatticeSpec& lat) {
    validate(lat);
    ConnectionField g;
    g.lattice = lat;
    std::array<Mat2, 4> z;
    z.fill(Mat2::Zero());
    g.gamma.assign(size_t(lat.size()), z);
    return g;
}

ConnectionField make_fourier_connection(const LatticeSpec& lat, std::uint64_t seed, int max_mode,
                                        double scale) {
    validate(lat);
    if (max_mode < 0) throw std::invalid_argument("max_mode must be >= 0");

    // Coefficients are drawn in an N-independent order so that lattices
    // sharing a physical box sample the same continuum field.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<std::array<int, 3>> modes;
    std::array<int, 3> m{};
    const int lo = -max_mode;
    for (m[0] = lo; m[0] <= max_mode; ++m[0])
        for (m[1] = lat.dim > 1 ? lo : 0; m[1] <= (lat.dim > 1 ? max_mode : 0); ++m[1])
            for (m[2] = lat.dim > 2 ? lo : 0; m[2] <= (lat.dim > 2 ? max_mode : 0); ++m[2])
                modes.push_back(m);

    // c[alpha][mu][mode]
    std::vector<std::array<std::array<cdouble, 4>, 4>> coeff(modes.size());
    for (size_t k = 0; k < modes.size(); ++k)
        for (int alpha = 0; alpha < 4; ++alpha)
            for (int mu = 0; mu < 4; ++mu) {
                const double re = unit(rng), im = unit(rng);
                const auto& mm = modes[k];
                const double m2 = double(mm[0] * mm[0] + mm[1] * mm[1] + mm[2] * mm[2]);
                coeff[k][size_t(alpha)][size_t(mu)] =
                    scale / double(modes.size()) * cdouble(re, im) / (1.0 + m2);
            }

    ConnectionField g = ConnectionField::zero(lat);
    for (SiteIndex s = 0; s < lat.size(); ++s) {
        const auto c = site_coords(lat, s);
        for (int alpha = 0; alpha < 4; ++alpha) {
            Mat2 gm = Mat2::Zero();
            for (size_t k = 0; k < modes.size(); ++k) {
                double phase = 0.0;
                for (int j = 0; j < lat.dim; ++j)
                    phase += 2.0 * std::numbers::pi * modes[k][size_t(j)] * c[size_t(j)] /
                             double(lat.extent[size_t(j)]);
                const cdouble e(std::cos(phase), std::sin(phase));
                for (int mu = 0; mu < 4; ++mu)
                    gm += coeff[k][size_t(alpha)][size_t(mu)] * e * sigma(mu);
            }
            g.at(s)[size_t(alpha)] = gm;
        }
    }
    return g;
}

Mat2 inhomogeneous_hopping(const SpinorHopping& model, const ConnectionField& gamma,
                           SiteIndex site, int direction, GammaParity parity) {
    if (std::abs(direction) > 3) throw std::invalid_argument("direction must be 0 or +-1..+-3");
    const Mat2 id = sigma(0);
    const double a = model.lattice.spacing;
    if (direction == 0) return model.epsilon * (id - a * gamma.at(site)[0]);

    const int axis = std::abs(direction);
    const Mat2& g = gamma.at(site)[size_t(axis)];
    if (direction > 0) return model.eta * id + model.kappa * sigma(axis) * (id - a * g);
    const double sign = parity == GammaParity::odd ? -1.0 : +1.0;
    return model.eta * id - model.kappa * sigma(axis) * (id - sign * a * g);
}

SpinorField evolve_metric_affine(const SpinorField& f, const SpinorHopping& model,
                                 const ConnectionField& gamma, double dt, int steps,
                                 GammaParity parity, int threads) {
    if (f.lattice != model.lattice || f.lattice != gamma.lattice)
        throw std::invalid_argument("field, model and connection live on different lattices");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");

    std::vector<detail::HopBlock> blocks(size_t(f.lattice.size()));
    for (SiteIndex s = 0; s < f.lattice.size(); ++s)
        for (int k = 0; k < 7; ++k) {
            const int n = HoppingFamily::directions[k];
            if (n != 0 && std::abs(n) > f.lattice.dim) continue;
            blocks[size_t(s)].set(k, inhomogeneous_hopping(model, gamma, s, n, parity));
        }

    return detail::rk4_evolve(
        f, [&blocks](SiteIndex s) -> const detail::HopBlock& { return blocks[size_t(s)]; }, dt,
        steps, threads);
}

CurrentField current(const SpinorField& f) {
    CurrentField out;
    out.lattice = f.lattice;
    out.j.resize(size_t(f.lattice.size()));
    for (SiteIndex s = 0; s < f.lattice.size(); ++s) {
        const cdouble u = f.at(s, 0), d = f.at(s, 1);
        const cdouble cross = std::conj(u) * d;
        out.j[size_t(s)] = {std::norm(u) + std::norm(d), 2.0 * cross.real(), 2.0 * cross.imag(),
                            std::norm(u) - std::norm(d)};
    }
    return out;
}

AffineConnection solve_affine_connection(const std::array<Mat2, 4>& gamma) {
    AffineConnection conn;
    for (int alpha = 0; alpha < 4; ++alpha) {
        const Mat2& g = gamma[size_t(alpha)];
        const Mat2 gdag = g.adjoint();
        for (int mu = 0; mu < 4; ++mu) {
            const Mat2 m = -(sigma(mu) * g + gdag * sigma(mu));
            for (int nu = 0; nu < 4; ++nu) {
                const cdouble tr = 0.5 * (sigma(nu) * m).trace();
                if (std::abs(tr.imag()) > 1e-12)
                    throw std::logic_error("connection coefficient came out complex");
                conn.at(mu, nu, alpha) = tr.real();
            }
        }
    }
    return conn;
}

double connection_residual(const AffineConnection& conn, const std::array<Mat2, 4>& gamma) {
    double worst = 0.0;
    for (int alpha = 0; alpha < 4; ++alpha) {
        const Mat2& g = gamma[size_t(alpha)];
        const Mat2 gdag = g.adjoint();
        for (int mu = 0; mu < 4; ++mu) {
            Mat2 lhs = sigma(mu) * g + gdag * sigma(mu);
            for (int nu = 0; nu < 4; ++nu) lhs += conn.at(mu, nu, alpha) * sigma(nu);
            worst = std::max(worst, lhs.norm());
        }
    }
    return worst;
}

SpinMetricTensor spin_metric_tensor() {
    SpinMetricTensor g;
    const Mat2& eps = spin_metric();
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            g.g[size_t(mu)][size_t(nu)] =
                -0.5 * (sigma(mu) * eps * sigma(nu).transpose() * eps).trace().real();
    return g;
}

SpinMetricTensor spin_metric_tensor_raw_trace() {
    SpinMetricTensor g;
    const Mat2& eps = spin_metric();
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            g.g[size_t(mu)][size_t(nu)] = (sigma(mu) * eps * sigma(nu) * eps).trace().real();
    return g;
}

std::array<std::array<std::array<double, 4>, 4>, 4> metric_covariant_derivative(
    const AffineConnection& conn) {
    const SpinMetricTensor g = spin_metric_tensor();
    std::array<std::array<std::array<double, 4>, 4>, 4> nabla{};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            for (int alpha = 0; alpha < 4; ++alpha) {
                double v = 0.0;
                for (int beta = 0; beta < 4; ++beta)
                    v += conn.at(mu, beta, alpha) * g.at(beta, nu) +
                         conn.at(nu, beta, alpha) * g.at(mu, beta);
                nabla[size_t(mu)][size_t(nu)][size_t(alpha)] = v;
            }
    return nabla;
}

MetricityReport metricity_check(const std::array<Mat2, 4>& gamma) {
    MetricityReport rep;
    const Mat2& eps = spin_metric();
    for (int alpha = 0; alpha < 4; ++alpha) {
        rep.implemented_constraint =
            std::max(rep.implemented_constraint, std::abs(gamma[size_t(alpha)].trace().real()));
        rep.skew_trace_constraint = std::max(
            rep.skew_trace_constraint, std::abs((gamma[size_t(alpha)] * eps).trace().real()));
    }
    const auto nabla = metric_covariant_derivative(solve_affine_connection(gamma));
    for (const auto& plane : nabla)
        for (const auto& row : plane)
            for (double v : row) rep.max_nabla_g = std::max(rep.max_nabla_g, std::abs(v));
    rep.metric_compatible = rep.max_nabla_g <= 1e-12;
    return rep;
}

std::array<std::array<std::array<double, 4>, 4>, 4> torsion(const AffineConnection& conn) {
    std::array<std::array<std::array<double, 4>, 4>, 4> t{};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            for (int alpha = 0; alpha < 4; ++alpha)
                t[size_t(mu)][size_t(nu)][size_t(alpha)] =
                    conn.at(mu, nu, alpha) - conn.at(mu, alpha, nu);
    return t;
}

DivergenceResidual covariant_divergence_residual(const std::vector<SpinorField>& history,
                                                 const SpinorHopping& model,
                                                 const ConnectionField& gamma,
                                                 double dt_sample) {
    if (history.size() < 3)
        throw std::invalid_argument("covariant_divergence_residual needs at least 3 snapshots");
    if (!(dt_sample > 0)) throw std::invalid_argument("dt_sample must be positive");
    const LatticeSpec& lat = model.lattice;
    for (const auto& f : history)
        if (f.lattice != lat) throw std::invalid_argument("history snapshots on a different lattice");
    if (gamma.lattice != lat)
        throw std::invalid_argument("connection lives on a different lattice");
    if (std::abs(model.kappa.imag()) > 1e-14 * std::abs(model.kappa))
        throw std::invalid_argument("conservation law is defined for real kappa");

    const double a = lat.spacing;
    const double c = 2.0 * a * model.kappa.real();
    const cdouble time_scale = a * model.epsilon;

    // Trace-contracted composite connection, one 4-vector per site:
    // contraction[beta] = sum_alpha Gamma~^alpha_{beta alpha}.  Axes beyond
    // the lattice dimension have no hops, so the dynamics never couples to
    // those gamma slots; they must not source the contraction either.
    std::vector<std::array<double, 4>> contraction(size_t(lat.size()));
    for (SiteIndex s = 0; s < lat.size(); ++s) {
        std::array<Mat2, 4> composite;
        composite[0] = time_scale * gamma.at(s)[0];
        for (int k = 1; k <= 3; ++k)
            composite[size_t(k)] =
                k <= lat.dim ? Mat2(c * gamma.at(s)[size_t(k)]) : Mat2(Mat2::Zero());
        const AffineConnection conn = solve_affine_connection(composite);
        for (int beta = 0; beta < 4; ++beta) {
            double v = 0.0;
            for (int alpha = 0; alpha < 4; ++alpha) v += conn.at(alpha, beta, alpha);
            contraction[size_t(s)][size_t(beta)] = v;
        }
    }

    std::vector<CurrentField> currents;
    currents.reserve(history.size());
    for (const auto& f : history) currents.push_back(current(f));

    DivergenceResidual out;
    double sum2 = 0.0;
    std::int64_t count = 0;
    for (size_t i = 1; i + 1 < history.size(); ++i) {
        std::vector<double> r(size_t(lat.size()));
        for (SiteIndex s = 0; s < lat.size(); ++s) {
            double v = (currents[i + 1].at(s)[0] - currents[i - 1].at(s)[0]) / (2.0 * dt_sample);
            for (int k = 1; k <= lat.dim; ++k) {
                const SiteIndex sp = neighbor(lat, s, +k);
                const SiteIndex sm = neighbor(lat, s, -k);
                v += c * (currents[i].at(sp)[size_t(k)] - currents[i].at(sm)[size_t(k)]) /
                     (2.0 * a);
            }
            for (int beta = 0; beta < 4; ++beta)
                v -= contraction[size_t(s)][size_t(beta)] * currents[i].at(s)[size_t(beta)];
            r[size_t(s)] = v;
            out.max_abs = std::max(out.max_abs, std::abs(v));
            sum2 += v * v;
            ++count;
        }
        out.r.push_back(std::move(r));
    }
    out.l2 = std::sqrt(sum2 / double(count));
    return out;
}

}  // namespace qhop
