#include "qhop/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qhop/parallel.hpp"

namespace qhop {

cdouble scalar_symbol(const ScalarHopping& model, const std::array<double, 3>& p) {
    double c = 0.0;
    for (int j = 0; j < model.lattice.dim; ++j) c += std::cos(model.lattice.spacing * p[j]);
    return model.epsilon + 2.0 * model.kappa * c;
}

cdouble continuum_symbol(const ScalarHopping& model, const std::array<double, 3>& p) {
    double p2 = 0.0;
    for (int j = 0; j < model.lattice.dim; ++j) p2 += p[j] * p[j];
    const double a = model.lattice.spacing;
    return model.epsilon + 2.0 * double(model.lattice.dim) * model.kappa - model.kappa * a * a * p2;
}

namespace {

template <class Symbol>
ScalarField propagate_by_symbol(const ScalarField& f, const ScalarHopping& model, double t,
                                Symbol&& symbol) {
    if (f.lattice != model.lattice)
        throw std::invalid_argument("field and model live on different lattices");
    ScalarField modes = dft_forward(f);
    const MomentumGrid grid(f.lattice);
    bool overflow = false;
    for (SiteIndex m = 0; m < grid.size(); ++m) {
        const cdouble factor = std::exp(symbol(model, grid.momentum(m)) * t);
        modes.at(m) *= factor;
        if (!std::isfinite(factor.real()) || !std::isfinite(factor.imag())) overflow = true;
    }
    ScalarField out = dft_inverse(modes);
    out.diverged = f.diverged || overflow || !all_finite(out);
    return out;
}

}  // namespace

ScalarField propagate_spectral(const ScalarField& f, const ScalarHopping& model, double t) {
    return propagate_by_symbol(f, model, t,
                               [](const ScalarHopping& m, const std::array<double, 3>& p) {
                                   return scalar_symbol(m, p);
                               });
}

ScalarField propagate_continuum(const ScalarField& f, const ScalarHopping& model, double t) {
    return propagate_by_symbol(f, model, t,
                               [](const ScalarHopping& m, const std::array<double, 3>& p) {
                                   return continuum_symbol(m, p);
                               });
}

namespace {

struct NeighborTable {
    int links = 0;  // 2 * dim
    std::vector<SiteIndex> at;  // at[site * links + l]

    explicit NeighborTable(const LatticeSpec& lat) {
        links = 2 * lat.dim;
        at.resize(size_t(lat.size()) * links);
        for (SiteIndex s = 0; s < lat.size(); ++s)
            for (int j = 1; j <= lat.dim; ++j) {
                at[size_t(s) * links + 2 * (j - 1)] = neighbor(lat, s, +j);
                at[size_t(s) * links + 2 * (j - 1) + 1] = neighbor(lat, s, -j);
            }
    }
};

}  // namespace

ScalarField propagate_stencil(const ScalarField& f, const ScalarHopping& model, double dt,
                              int steps, int threads) {
    if (f.lattice != model.lattice)
        throw std::invalid_argument("field and model live on different lattices");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");

    const NeighborTable nbr(f.lattice);
    const SiteIndex n = f.lattice.size();
    const double norm0 = norm_sq(f);

    ScalarField cur = f;
    const size_t total = size_t(n);
    std::vector<cdouble> k1(total), k2(total), k3(total), k4(total), stage(total);

    auto deriv = [&](const std::vector<cdouble>& in, std::vector<cdouble>& out) {
        parallel_for(n, threads, [&](SiteIndex lo, SiteIndex hi) {
            for (SiteIndex s = lo; s < hi; ++s) {
                cdouble hop(0, 0);
                const SiteIndex* row = nbr.at.data() + size_t(s) * nbr.links;
                for (int l = 0; l < nbr.links; ++l) hop += in[size_t(row[l])];
                out[size_t(s)] = model.epsilon * in[size_t(s)] + model.kappa * hop;
            }
        });
    };

    for (int step = 0; step < steps; ++step) {
        deriv(cur.amp, k1);
        for (SiteIndex s = 0; s < n; ++s) stage[size_t(s)] = cur.amp[size_t(s)] + 0.5 * dt * k1[size_t(s)];
        deriv(stage, k2);
        for (SiteIndex s = 0; s < n; ++s) stage[size_t(s)] = cur.amp[size_t(s)] + 0.5 * dt * k2[size_t(s)];
        deriv(stage, k3);
        for (SiteIndex s = 0; s < n; ++s) stage[size_t(s)] = cur.amp[size_t(s)] + dt * k3[size_t(s)];
        deriv(stage, k4);
        for (SiteIndex s = 0; s < n; ++s)
            cur.amp[size_t(s)] += dt / 6.0 *
                (k1[size_t(s)] + 2.0 * k2[size_t(s)] + 2.0 * k3[size_t(s)] + k4[size_t(s)]);

        if (!all_finite(cur) || (norm0 > 0 && norm_sq(cur) > 1e6 * norm0)) {
            cur.diverged = true;
            break;
        }
    }
    return cur;
}

StabilityReport classify_scalar(const ScalarHopping& model) {
    validate(model.lattice);
    StabilityReport rep;
    const MomentumGrid grid(model.lattice);

    double sum_re = 0.0;
    double max_re = -INFINITY, min_re = INFINITY;
    for (SiteIndex m = 0; m < grid.size(); ++m) {
        const double re = scalar_symbol(model, grid.momentum(m)).real();
        sum_re += re;
        max_re = std::max(max_re, re);
        min_re = std::min(min_re, re);
    }
    rep.uniform_rate = sum_re / double(grid.size());
    rep.dispersive_spread = max_re - min_re;
    rep.max_re = max_re;
    rep.min_re = min_re;
    rep.phase_rate = scalar_symbol(model, {0, 0, 0}).imag();
    rep.tolerance = 1e-12 * std::max(std::abs(model.epsilon), std::abs(model.kappa));

    if (rep.dispersive_spread > rep.tolerance)
        rep.classification = StabilityClass::mode_dependent_growth;
    else if (std::abs(rep.uniform_rate) > rep.tolerance)
        rep.classification = StabilityClass::uniform_scaling;
    else
        rep.classification = StabilityClass::unitary_after_phase;
    return rep;
}

std::string to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::unitary_after_phase: return "UNITARY_AFTER_PHASE";
        case StabilityClass::uniform_scaling: return "UNIFORM_SCALING";
        case StabilityClass::mode_dependent_growth: return "MODE_DEPENDENT_GROWTH";
    }
    throw std::logic_error("unreachable stability class");
}

namespace {

// Least-squares slope of y over x (x values distinct).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y, size_t lo, size_t hi) {
    const double n = double(hi - lo);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = lo; i < hi; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    return denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

GrowthReport measure_growth(const ScalarField& f, const ScalarHopping& model, double t_max,
                            int samples) {
    if (samples < 3) throw std::invalid_argument("measure_growth needs at least 3 samples");
    if (!(t_max > 0)) throw std::invalid_argument("measure_growth needs t_max > 0");
    if (f.lattice != model.lattice)
        throw std::invalid_argument("field and model live on different lattices");

    // Work in momentum space: each mode evolves by exp(omega t), so shell
    // weights can be sampled without repeated transforms.
    const ScalarField modes = dft_forward(f);
    const MomentumGrid grid(f.lattice);
    const double measure = std::pow(f.lattice.spacing, f.lattice.dim);

    // Group modes into shells of equal sum_j cos(a p_j) (hence equal
    // Re omega).  Keyed on a rounded value; distinct cosine sums on these
    // grids are separated by far more than the rounding quantum.
    struct Shell {
        double cos_sum;
        std::int64_t modes;
        double weight0;
        std::vector<SiteIndex> members;
    };
    std::map<std::int64_t, Shell> shells;
    for (SiteIndex m = 0; m < grid.size(); ++m) {
        const auto p = grid.momentum(m);
        // Sort the per-axis cosines before summing so that modes related by
        // an axis permutation land on bit-identical keys.
        std::array<double, 3> cj{0, 0, 0};
        for (int j = 0; j < f.lattice.dim; ++j) cj[size_t(j)] = std::cos(f.lattice.spacing * p[j]);
        std::sort(cj.begin(), cj.begin() + f.lattice.dim);
        const double c = cj[0] + cj[1] + cj[2];
        const auto key = std::int64_t(std::llround(c * 1e9));
        auto& sh = shells[key];
        sh.cos_sum = c;
        sh.modes += 1;
        sh.weight0 += std::norm(modes.at(m)) * measure;
        sh.members.push_back(m);
    }

    GrowthReport rep;
    rep.times.reserve(size_t(samples));

    const double total0 = norm_sq(modes);
    std::vector<const Shell*> occupied;
    for (const auto& [key, sh] : shells)
        if (sh.weight0 > 1e-12 * total0) occupied.push_back(&sh);

    // Sample log-weights per occupied shell.
    std::vector<std::vector<double>> logw(occupied.size());
    std::vector<double> log_total;
    for (int i = 0; i < samples; ++i) {
        const double t = t_max * double(i + 1) / double(samples);
        double total = 0.0;
        std::vector<double> w(occupied.size(), 0.0);
        for (size_t si = 0; si < occupied.size(); ++si) {
            const Shell& sh = *occupied[si];
            const double re = scalar_symbol(model, grid.momentum(sh.members.front())).real();
            w[si] = sh.weight0 * std::exp(2.0 * re * t);
            total += w[si];
        }
        // Unoccupied shells contribute below the weight floor; fold them in
        // for the total-norm series anyway.
        for (const auto& [key, sh] : shells) {
            if (sh.weight0 > 1e-12 * total0) continue;
            const double re = scalar_symbol(model, grid.momentum(sh.members.front())).real();
            total += sh.weight0 * std::exp(2.0 * re * t);
        }
        if (!std::isfinite(total)) {
            rep.diverged = true;
            break;
        }
        rep.times.push_back(t);
        rep.norm_sq.push_back(total);
        log_total.push_back(std::log(total));
        for (size_t si = 0; si < occupied.size(); ++si)
            logw[si].push_back(w[si] > 0 ? std::log(w[si]) : -INFINITY);
    }

    if (rep.times.size() < 3)
        throw std::runtime_error("norm overflowed before 3 samples; reduce t_max");

    for (size_t si = 0; si < occupied.size(); ++si) {
        const Shell& sh = *occupied[si];
        ShellGrowth g;
        g.cos_sum = sh.cos_sum;
        g.modes = sh.modes;
        g.weight = sh.weight0;
        g.predicted_rate =
            2.0 * scalar_symbol(model, grid.momentum(sh.members.front())).real();
        g.fitted_rate = fit_slope(rep.times, logw[si], 0, rep.times.size());
        rep.shells.push_back(g);
    }
    std::sort(rep.shells.begin(), rep.shells.end(),
              [](const ShellGrowth& a, const ShellGrowth& b) { return a.weight > b.weight; });

    rep.global_rate = fit_slope(rep.times, log_total, rep.times.size() / 2, rep.times.size());
    return rep;
}

}  // namespace qhop
