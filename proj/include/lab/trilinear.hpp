#pragma once
#include <string>
#include <vector>

#include "lab/construction.hpp"

namespace lab {

// B(u,v,w) = integral of u_j v_i d_i w_j over the torus
//          = (2pi)^3 sum_{k+m+n=0} u_j(k) v_i(m) (i n_i) w_j(n).
// Exact Plancherel evaluation by hash-join over the two smallest supports;
// refuses (budget error) when the join would enumerate more than pair_budget
// pairs.  The imaginary part of the sum is returned as a diagnostic: it is
// zero in exact arithmetic for Hermitian inputs.
double trilinear_sparse(const SparseField& u, const SparseField& v, const SparseField& w,
                        long long pair_budget = 5000000, double* imag_diag = nullptr);

// Physical-space quadrature of the same integral on an oversampled grid.
// All three fields must share a grid; the synthesis size m is chosen so the
// triple product cannot alias (m > 3 * band limit), or can be forced by the
// caller — too small a forced m is a resolution error.
double trilinear_grid(const SpectralField& u, const SpectralField& v, const SpectralField& w,
                      int force_m = 0);

// Closed-form evaluation when every argument is a union of symbol blocks:
// the constrained lattice sums reduce to per-axis hexagon moments, and the
// Leray reciprocals to short Chebyshev expansions.  Works at any shell.
// recip_tol/recip_dmax steer the Chebyshev degree of the per-box 1/|k|^2
// expansions.  The defaults keep every box at degree <= 3, good for ~2%
// relative on the worst cross-stage classes (internal cancellation amplifies
// the truncation ~100x there) and ~1e-4 on shell-local ones; tightening to
// (1e-5, 5) buys ~1e-3 worst-case at roughly 10x the per-triple cost.
struct BlockTriOptions {
  double recip_tol = 5e-4;
  int recip_dmax = 3;
};
double trilinear_block(const std::vector<PsiBlock>& u, const std::vector<PsiBlock>& v,
                       const std::vector<PsiBlock>& w, const BlockTriOptions& opt = {},
                       double* imag_diag = nullptr);

struct ShellValue {
  int q = 0;
  double value = 0.0;
};

// One scaling-law row: per-shell values of a trilinear form, the fitted
// slope of log2|value| against q, and the exponent the row should follow.
// A row can vanish identically at some shell (no wavevector triples in the
// supports); then the fit is undefined, pass is false, and note names the
// shell — the row is reported, not turned into an exception.
struct TrilinearReport {
  std::string label;
  double predicted_exponent = 0.0;
  std::vector<ShellValue> shells;
  double slope = 0.0, intercept = 0.0, residual = 0.0;
  bool sign_alternation = false;  // shell values change sign past the first
  bool pass = false;              // |slope - predicted| <= tolerance
  std::string note;               // non-empty when the fit is undefined
  static constexpr double kSlopeTol = 0.3;
};

// Evaluates the flux scaling rows on the constructed data via the block
// path: B(u0,u0,U_q) for velocity data, plus the three mixed magnetic rows
// when mhd is set.  Needs >= 3 stages; with > 3 the first shell (transient
// constants) is excluded from the fit.
std::vector<TrilinearReport> verify_lemma_tril(const ConstructionParams& p,
                                               const BlockTriOptions& opt = {});

// Fraction of B(u0,u0,U_{q_J}) carried by the stage-J pair interaction
// B(U_{q_J - 1}, U_{q_J}, U_{q_J}): the cascade is shell-local when this is
// close to 1.  NSE data only (the velocity must carry the low packets).
double shell_local_share(const InitialData& d, const BlockTriOptions& opt = {});

}  // namespace lab
