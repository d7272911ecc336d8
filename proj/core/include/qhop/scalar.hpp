#pragma once

#include <string>
#include <vector>

#include "qhop/dft.hpp"
#include "qhop/field.hpp"

namespace qhop {

/// First-order-in-time nearest-neighbour hopping model for a one-component
/// amplitude:
///
///   d psi(x)/dt = epsilon psi(x) + kappa sum_{nn} psi(x')
///
/// with the sum over the 2*dim nearest neighbours.  Purely imaginary
/// (epsilon, kappa) make the evolution unitary; real parts scale or shear
/// the norm mode by mode.
struct ScalarHopping {
    LatticeSpec lattice;
    cdouble epsilon{0, 0};
    cdouble kappa{0, 0};
};

/// Symbol of the generator on the plane wave exp(i p . x):
///   omega(p) = epsilon + 2 kappa sum_j cos(a p_j),   j = 1..dim.
cdouble scalar_symbol(const ScalarHopping& model, const std::array<double, 3>& p);

/// Small-(a p) limit of the symbol through quadratic order:
///   (epsilon + 2 dim kappa) - kappa a^2 |p|^2.
/// With epsilon = -2 dim kappa and kappa = i/(2 m a^2) this is the free
/// Schroedinger symbol -i |p|^2 / (2 m).
cdouble continuum_symbol(const ScalarHopping& model, const std::array<double, 3>& p);

/// Exact evolution by time t: multiplies each mode by exp(omega(p) t).
/// Works for positive and negative t.  Sets `diverged` when a factor
/// overflows to non-finite values.
ScalarField propagate_spectral(const ScalarField& f, const ScalarHopping& model, double t);

/// Same mode-by-mode evolution under the continuum symbol; reference
/// kernel for lattice-vs-continuum comparisons on a common grid.
ScalarField propagate_continuum(const ScalarField& f, const ScalarHopping& model, double t);

/// Classical RK4 integration of the hopping ODE in position space with
/// `steps` steps of size dt.  Matches propagate_spectral to O(dt^4); used
/// to cross-check the spectral path and as the kernel that generalises to
/// inhomogeneous couplings.  Sets `diverged` on non-finite amplitudes or
/// norm growth beyond 1e6 times the initial norm.
ScalarField propagate_stencil(const ScalarField& f, const ScalarHopping& model, double dt,
                              int steps, int threads = 1);

enum class StabilityClass {
    unitary_after_phase,    // |factor| = 1 for every mode (after global phase)
    uniform_scaling,        // |factor| = e^{r t} with one common r != 0
    mode_dependent_growth,  // Re omega varies across the zone
};

std::string to_string(StabilityClass c);

/// Scan of Re/Im omega over every mode of the lattice.
///
///   uniform_rate       mean of Re omega over the zone (the part of the
///                      growth no relabeling of modes can remove)
///   dispersive_spread  max Re omega - min Re omega
///   phase_rate         Im omega at p = 0 (global phase drift)
///
/// Classification uses an absolute tolerance 1e-12 * max(|epsilon|,|kappa|).
struct StabilityReport {
    StabilityClass classification;
    double uniform_rate = 0;
    double dispersive_spread = 0;
    double phase_rate = 0;
    double max_re = 0;
    double min_re = 0;
    double tolerance = 0;
};

StabilityReport classify_scalar(const ScalarHopping& model);

/// Growth of one momentum shell (modes sharing sum_j cos(a p_j), which is
/// what Re omega depends on).
struct ShellGrowth {
    double cos_sum = 0;        // shared value of sum_j cos(a p_j)
    std::int64_t modes = 0;    // shell multiplicity
    double weight = 0;         // initial |amplitude|^2 in the shell
    double fitted_rate = 0;    // least-squares slope of log weight(t)
    double predicted_rate = 0; // 2 Re omega on the shell
};

struct GrowthReport {
    std::vector<double> times;
    std::vector<double> norm_sq;        // total norm_sq at each sample
    std::vector<ShellGrowth> shells;    // occupied shells, descending weight
    double global_rate = 0;             // late-time d(log norm_sq)/dt fit
    bool diverged = false;              // overflow hit before t_max
};

/// Evolves `f` spectrally, sampling `samples` times up to t_max, and fits
/// exponential growth rates per momentum shell and for the total norm.
/// The global rate is fitted on the second half of the samples where the
/// fastest shell dominates.  Shells below a 1e-12 relative weight are
/// dropped (their rates are not measurable).  If the norm overflows the
/// fit uses the finite prefix and the report is flagged diverged.
GrowthReport measure_growth(const ScalarField& f, const ScalarHopping& model, double t_max,
                            int samples);

}  // namespace qhop
