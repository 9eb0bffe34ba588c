#pragma once
#include "lab/field.hpp"

namespace lab {

// DFT conventions: synthesis f(x) = sum_k u(k) e^{+i k.x} sampled on the
// m^3 uniform grid; analysis u(k) = m^-3 sum_x f(x) e^{-i k.x}.  Plans are
// cached per size (FFTW, estimate mode, unaligned-safe) and reused.

// In-place 3D c2c transform of an m^3 buffer. sign=+1 synthesis, -1 analysis
// (analysis includes the 1/m^3 normalization).
void fft3(std::vector<cplx>& buf, int m, int sign);

// Spread an n-layout spectral component into an m-layout buffer (m >= n);
// the unmatched k = n/2 plane is dropped (it is zero by construction).
std::vector<cplx> embed_spectrum(const std::vector<cplx>& spec, int n, int m);

// Synthesize one component on an m^3 grid; if imag_max is given, receives the
// largest imaginary part seen (should be roundoff for Hermitian input).
std::vector<double> synth_component(const std::vector<cplx>& spec, int n, int m,
                                    double* imag_max = nullptr);

// Full-field synthesis on an (oversample*n)^3 grid.
PhysField to_physical(const SpectralField& f, int oversample = 1, double* imag_max = nullptr);

// Analysis back onto GridSpec g (samples.m must be a multiple of g.n).
SpectralField to_spectral(const PhysField& samples, GridSpec g);

}  // namespace lab
