#pragma once
#include "lab/field.hpp"

namespace lab {

// L^p norm of the vector magnitude over [0,2pi)^3 by uniform Riemann sum on
// the sample grid (exact for p=2 when the field is band-limited below the
// sampling Nyquist).  p = INFINITY gives the pointwise max of |f(x)|.
double lp_norm(const PhysField& f, double p);

// Synthesize, then measure.  oversample > 1 refines the sample grid; use it
// for p = infinity where grid granularity caps the detected maximum.
double lp_norm(const SpectralField& f, double p, int oversample = 1);

// Exact L^2 via Plancherel: ||f||_2 = (2pi)^{3/2} sqrt(sum |u(k)|^2).
double l2_norm(const SparseField& f);
double l2_norm(const SpectralField& f);

}  // namespace lab
