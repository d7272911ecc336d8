#pragma once

#include "qhop/field.hpp"

namespace qhop {

/// Unitary discrete Fourier transform between site and mode amplitudes.
///
/// Forward:  f~(m) = N^{-1/2} sum_x f(x) exp(-i p_m . x),   N = total sites,
/// inverse the conjugate transform.  Both carry the symmetric 1/sqrt(N)
/// factor, so norm_sq is preserved exactly (Parseval) and
/// dft_inverse(dft_forward(f)) == f up to roundoff.
///
/// The transformed field reuses the same container type and row-major
/// enumeration; MomentumGrid supplies the momentum attached to each mode.
ScalarField dft_forward(const ScalarField& f);
ScalarField dft_inverse(const ScalarField& f);

/// Component-wise transform of the two spin amplitudes.
SpinorField dft_forward(const SpinorField& f);
SpinorField dft_inverse(const SpinorField& f);

}  // namespace qhop
