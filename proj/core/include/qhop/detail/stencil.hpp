#pragma once

// Shared RK4 kernel for the spin-1/2 hopping stencils.  The homogeneous
// propagator and the connection-deformed evolution both instantiate this
// template, so the gamma = 0 limit runs the identical code path.

#include <cstdint>
#include <vector>

#include "qhop/field.hpp"
#include "qhop/parallel.hpp"
#include "qhop/pauli.hpp"

namespace qhop::detail {

// One site's seven hop matrices, flattened: entry(slot, r, c) with slots
// ordered like HoppingFamily::directions = {0,+1,-1,+2,-2,+3,-3}.
struct HopBlock {
    std::array<cdouble, 28> m{};

    cdouble& entry(int slot, int r, int c) { return m[size_t(4 * slot + 2 * r + c)]; }
    const cdouble& entry(int slot, int r, int c) const {
        return m[size_t(4 * slot + 2 * r + c)];
    }

    void set(int slot, const Mat2& h) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) entry(slot, r, c) = h(r, c);
    }
};

// arg_table[7*site + slot] is the site whose amplitude the slot's matrix
// multiplies in d psi(x)/dt: slot for direction n acts on psi(x - a n^),
// i.e. on neighbor(x, -n).
inline std::vector<SiteIndex> build_arg_table(const LatticeSpec& lat) {
    static constexpr int directions[7] = {0, +1, -1, +2, -2, +3, -3};
    std::vector<SiteIndex> table(size_t(lat.size()) * 7);
    for (SiteIndex s = 0; s < lat.size(); ++s)
        for (int k = 0; k < 7; ++k) {
            const int n = directions[k];
            const bool active = n == 0 || std::abs(n) <= lat.dim;
            table[size_t(7 * s + k)] = active ? neighbor(lat, s, -n) : s;
        }
    return table;
}

// RK4 evolution of the coefficient ODE.  `blocks` returns the HopBlock for
// a site; inactive direction slots must hold zero matrices.  Sets the
// diverged flag on non-finite amplitudes or norm growth beyond 1e6.
template <class BlockFn>
SpinorField rk4_evolve(const SpinorField& f, const BlockFn& blocks, double dt, int steps,
                       int threads) {
    const LatticeSpec& lat = f.lattice;
    const SiteIndex n = lat.size();
    const auto args = build_arg_table(lat);
    const double norm0 = norm_sq(f);
    const int nslots = 1 + 2 * lat.dim;

    SpinorField cur = f;
    std::vector<cdouble> k1(size_t(2 * n)), k2(size_t(2 * n)), k3(size_t(2 * n)),
        k4(size_t(2 * n)), stage(size_t(2 * n));

    auto deriv = [&](const std::vector<cdouble>& in, std::vector<cdouble>& out) {
        parallel_for(n, threads, [&](SiteIndex lo, SiteIndex hi) {
            for (SiteIndex s = lo; s < hi; ++s) {
                const HopBlock& b = blocks(s);
                cdouble d0(0, 0), d1(0, 0);
                const SiteIndex* arg = args.data() + 7 * s;
                for (int k = 0; k < nslots; ++k) {
                    const cdouble a0 = in[size_t(2 * arg[k])];
                    const cdouble a1 = in[size_t(2 * arg[k] + 1)];
                    d0 += b.entry(k, 0, 0) * a0 + b.entry(k, 0, 1) * a1;
                    d1 += b.entry(k, 1, 0) * a0 + b.entry(k, 1, 1) * a1;
                }
                out[size_t(2 * s)] = d0;
                out[size_t(2 * s + 1)] = d1;
            }
        });
    };

    const size_t total = size_t(2 * n);
    for (int step = 0; step < steps; ++step) {
        deriv(cur.amp, k1);
        for (size_t i = 0; i < total; ++i) stage[i] = cur.amp[i] + 0.5 * dt * k1[i];
        deriv(stage, k2);
        for (size_t i = 0; i < total; ++i) stage[i] = cur.amp[i] + 0.5 * dt * k2[i];
        deriv(stage, k3);
        for (size_t i = 0; i < total; ++i) stage[i] = cur.amp[i] + dt * k3[i];
        deriv(stage, k4);
        for (size_t i = 0; i < total; ++i)
            cur.amp[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        if (!all_finite(cur) || (norm0 > 0 && norm_sq(cur) > 1e6 * norm0)) {
            cur.diverged = true;
            break;
        }
    }
    return cur;
}

}  // namespace qhop::detail
