#include "qhop/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace qhop {
namespace {

// FFTW plan creation is not thread-safe; execution of a plan on its own
// arrays is.  Plans are created with FFTW_ESTIMATE so the transform is a
// deterministic function of its input (measured plans may pick different
// algorithms run to run).
std::mutex plan_mutex;

void run_dft(const LatticeSpec& lat, const cdouble* in, cdouble* out, int howmany, int sign) {
    int n[3];
    for (int j = 0; j < 3; ++j) n[j] = lat.extent[j];

    auto* fin = reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in));
    auto* fout = reinterpret_cast<fftw_complex*>(out);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        // Interleaved components: stride = howmany, distance 1 between the
        // transforms of the individual components.
        plan = fftw_plan_many_dft(3, n, howmany, fin, nullptr, howmany, 1, fout, nullptr,
                                  howmany, 1, sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }

    const double scale = 1.0 / std::sqrt(double(lat.size()));
    const size_t total = size_t(lat.size()) * howmany;
    for (size_t i = 0; i < total; ++i) out[i] *= scale;
}

}  // namespace

ScalarField dft_forward(const ScalarField& f) {
    ScalarField g = ScalarField::zero(f.lattice);
    g.diverged = f.diverged;
    run_dft(f.lattice, f.amp.data(), g.amp.data(), 1, FFTW_FORWARD);
    return g;
}

ScalarField dft_inverse(const ScalarField& f) {
    ScalarField g = ScalarField::zero(f.lattice);
    g.diverged = f.diverged;
    run_dft(f.lattice, f.amp.data(), g.amp.data(), 1, FFTW_BACKWARD);
    return g;
}

SpinorField dft_forward(const SpinorField& f) {
    SpinorField g = SpinorField::zero(f.lattice);
    g.diverged = f.diverged;
    run_dft(f.lattice, f.amp.data(), g.amp.data(), 2, FFTW_FORWARD);
    return g;
}

SpinorField dft_inverse(const SpinorField& f) {
    SpinorField g = SpinorField::zero(f.lattice);
    g.diverged = f.diverged;
    run_dft(f.lattice, f.amp.data(), g.amp.data(), 2, FFTW_BACKWARD);
    return g;
}

}  // namespace qhop
