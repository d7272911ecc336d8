#pragma once

#include <string>
#include <vector>

#include "qhop/field.hpp"
#include "qhop/pauli.hpp"
#include "qhop/scalar.hpp"

namespace qhop {

/// Spin-1/2 nearest-neighbour hopping model.  The coefficient ODE is
///
///   d psi(x)/dt = H_0 psi(x) + sum_{n = +-1..+-dim} H_n psi(x - a n^)
///
/// with the cubic-symmetric family
///
///   H_0    = epsilon I
///   H_{+n} = eta I + kappa sigma^n
///   H_{-n} = eta I - kappa sigma^n .
///
/// The symmetry-solver module derives this family as the full solution of
/// the rotation-invariance constraints; here it is hard-coded for speed.
struct SpinorHopping {
    LatticeSpec lattice;
    cdouble epsilon{0, 0};
    cdouble eta{0, 0};
    cdouble kappa{0, 0};
};

/// The seven hop matrices of a (possibly asymmetric) spin-1/2 model,
/// indexed by direction n in {0, +1, -1, +2, -2, +3, -3}.
struct HoppingFamily {
    static constexpr int directions[7] = {0, +1, -1, +2, -2, +3, -3};
    std::array<Mat2, 7> h{};  // value-initialised to zero matrices

    static int slot(int direction);
    const Mat2& matrix(int direction) const { return h[size_t(slot(direction))]; }
    Mat2& matrix(int direction) { return h[size_t(slot(direction))]; }
};

/// The cubic-symmetric family for the given parameters.
HoppingFamily hopping_matrices(const SpinorHopping& model);

/// Mode-space generator: d/dt psi~(p) = G(p) psi~(p) with
///   G(p) = (epsilon + 2 eta sum_j cos(a p_j)) I - 2 i kappa sum_j sin(a p_j) sigma^j.
Mat2 spinor_symbol(const SpinorHopping& model, const std::array<double, 3>& p);

/// |sin-vector| s(p) = sqrt(sum_j sin^2(a p_j)) and its direction.  The
/// direction is meaningful only when s(p) > 0.
double sin_norm(const SpinorHopping& model, const std::array<double, 3>& p);

/// Exact per-mode evolution by exp(G(p) t), evaluated in closed form:
///   exp(G t) = e^{(eps + 2 eta sum cos) t} [cos(2 kappa s t) I
///                                           - i sin(2 kappa s t) s^ . sigma]
/// with the s(p) = 0 modes using the scalar factor alone.  Sets the
/// diverged flag on overflow.
SpinorField propagate_spectral_spinor(const SpinorField& f, const SpinorHopping& model, double t);

/// RK4 integration of the hopping ODE in position space; same contract as
/// the scalar stencil with two components per site.
SpinorField propagate_stencil_spinor(const SpinorField& f, const SpinorHopping& model, double dt,
                                     int steps, int threads = 1);

/// Free-Weyl continuum propagator applied to one spinor:
///   chi -> [cos(c |p| t) I - i sin(c |p| t) p^ . sigma] chi.
/// p = 0 returns the input unchanged.
Vec2 continuum_weyl_reference(const std::array<double, 3>& p, double t, double c,
                              const Vec2& chi);

/// The same propagator as a 2x2 matrix (for operator-norm comparisons).
Mat2 continuum_weyl_kernel(const std::array<double, 3>& p, double t, double c);

/// Stability scan over both eigenvalue branches of G(p):
///   Re lambda_(+-)(p) = Re(eps) + 2 Re(eta) sum cos(a p_j) +- 2 s(p) Im(kappa).
/// helicity_split is the largest |Re lambda_+ - Re lambda_-| over the zone,
/// i.e. 4 |Im kappa| max_p s(p); it is the growth-rate asymmetry between
/// the two helicities and vanishes iff kappa is real.
struct SpinorStabilityReport {
    StabilityClass classification;
    double uniform_rate = 0;
    double dispersive_spread = 0;
    double phase_rate = 0;       // Im of the scalar part at p = 0
    double helicity_split = 0;
    double max_re = 0;
    double min_re = 0;
    double tolerance = 0;
};

SpinorStabilityReport classify_spinor(const SpinorHopping& model);

/// Packet whose every mode is the +1 (helicity = +1) or -1 eigenvector of
/// s^(p) . sigma, the lattice helicity operator that commutes exactly with
/// G(p).  Modes with s(p) = 0 fall back to the spin state along axis 3.
SpinorField make_helicity_packet(const LatticeSpec& lat, const PacketProfile& profile,
                                 const std::array<double, 3>& p0, int helicity);

struct PacketTrack {
    std::vector<double> times;
    std::vector<std::array<double, 3>> centroid;  // unwrapped positions
    std::array<double, 3> velocity{0, 0, 0};      // linear fit per axis
    double speed = 0;
};

struct VelocityOptions {
    double sigma_p = 0.05;  // packet bandwidth
    double t_max = 0;       // 0 = choose so the packet crosses ~1/4 of the box
    int samples = 24;
};

/// Tracks the probability centroid of a narrow helicity packet under the
/// exact spectral evolution.  The centroid of each axis is the circular
/// mean of the site positions weighted by |psi|^2, unwrapped between
/// samples.  Throws std::runtime_error if the packet would wrap the
/// lattice within t_max (increase N or shorten t).
PacketTrack track_packet(const SpinorHopping& model, const std::array<double, 3>& p0,
                         int helicity, const VelocityOptions& opt = {});

/// Group speed |d centroid / dt| of the tracked packet.
double measure_packet_velocity(const SpinorHopping& model, const std::array<double, 3>& p0,
                               int helicity, const VelocityOptions& opt = {});

struct ResidualNorms {
    double max_abs = 0;
    double l2 = 0;  // sqrt(sum |r|^2 a^dim / samples)
};

/// Discrete free-Weyl residual  r = D_t psi + c sigma^j D_j psi  evaluated
/// with central differences in space and time on >= 3 uniformly spaced
/// snapshots.  For the symmetric hopping dynamics with epsilon = eta = 0
/// the spatial identity is exact and the residual is pure time-sampling
/// error, so it shrinks at second order under (a, dt)-halving at fixed
/// c = 2 a kappa.
ResidualNorms weyl_residual(const std::vector<SpinorField>& history, double dt_sample, double c);

}  // namespace qhop
