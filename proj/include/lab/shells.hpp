#pragma once
#include "lab/field.hpp"

namespace lab {

// Smooth radial cutoff: 1 for t <= 3/4, 0 for t >= 1, glued in between by
// the standard exp(-1/s) bump quotient.  All dyadic shell filters derive
// from this one function, so partition-of-unity sums telescope exactly.
double smooth_cutoff(double t);

// Annular bump phi(xi) = cutoff(xi/2) - cutoff(xi): supported in
// [3/4, 2], identically 1 on [1, 3/2].
double shell_bump(double xi);

// Dyadic frequency 2^q for q >= 0; the low shell q = -1 weighs in at 1/2.
double shell_weight(int q);

// Filter value for shell q at radius |k|: shell_bump(|k|/2^q) for q >= 0,
// smooth_cutoff(|k|) for q = -1.  q < -1 is rejected.
double shell_multiplier(int q, double absk);

// Largest shell index with support inside the dealiased band of g.
int top_shell(const GridSpec& g);

SpectralField project_shell(const SpectralField& f, int q);
SparseField project_shell(const SparseField& f, int q);

// Fattened projection onto shells q-1, q, q+1 (missing neighbors dropped).
SpectralField project_tilde(const SpectralField& f, int q);
SparseField project_tilde(const SparseField& f, int q);
double tilde_multiplier(int q, double absk);

// Besov norm B^s_{r,l}: l-sum over shells of (2^{qs} ||f_q||_r), sup for
// l = infinity.  oversample applies to the per-shell L^r synthesis.
double besov_norm(const SpectralField& f, double s, double r, double l, int oversample = 1);

// ||grad f_q||_p / (2^q ||f_q||_p) with the gradient magnitude aggregated
// over all 9 partial derivatives.  Near 1 whenever shell q is excited.
double bernstein_ratio(const SpectralField& f, int q, double p, int oversample = 1);

}  // namespace lab
