#pragma once
#include "lab/boxmoments.hpp"
#include "lab/field.hpp"

namespace lab {

// Basis combination fed through the Leray projector.  The initial data is a
// sum of plane-wave packets whose amplitude at wavenumber k is P(k) applied
// to one of these, times a unimodular coefficient.
enum class SymbolKind { e1, e2, e2_minus_e1 };

const char* symbol_name(SymbolKind k);

// P(k) applied to the kind's basis combination.  Real-valued; k must be
// nonzero.  P(-k) = P(k) holds bit-for-bit, which is what makes conjugate
// block pairs exactly Hermitian.
V3d symbol_value(SymbolKind kind, const K3& k);

// One rectangular packet of spectral modes.  coef carries the i-factors and
// the per-stage amplitude weight; the spectral value at k in box is
// coef * symbol_value(kind, k).
struct PsiBlock {
  Box3 box;
  SymbolKind kind;
  cplx coef;
  int shell;        // Littlewood-Paley shell the block resides in (plateau)
  int stage;        // construction stage j, 0-based
  const char* tag;  // "L", "L*", "M", "M*", "N", "N*"
};

// Lattice coordinate k[axis] over the box, as a degree-1 polynomial in the
// box's scaled coordinates (see scaled_coord).
TriPoly coord_poly(const Box3& b, int axis);

// Component comp of symbol_value over the box, as a polynomial in scaled
// coordinates.  Uses the reciprocal expansion of 1/|k|^2, so the box must
// stay away from the zero mode; tol is the relative accuracy at every
// lattice point.
TriPoly symbol_component_poly(const Box3& b, SymbolKind kind, int comp,
                              double tol = 1e-10);

}  // namespace lab
