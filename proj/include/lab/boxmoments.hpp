#pragma once
#include <array>
#include <memory>
#include <unordered_map>
#include <vector>

#include "lab/powersum.hpp"

namespace lab {

// Inclusive integer interval [lo, hi] on one lattice axis.
struct Iv {
  long long lo = 0, hi = -1;
  long long count() const { return hi - lo + 1; }
  long long width() const { return hi - lo; }
  bool empty() const { return hi < lo; }
  double center() const { return 0.5 * (double)(lo + hi); }
  double half() const { return 0.5 * (double)(hi - lo); }
  Iv negate() const { return {-hi, -lo}; }
  bool contains(long long v) const { return lo <= v && v <= hi; }
  bool operator==(const Iv& o) const { return lo == o.lo && hi == o.hi; }
};

// Axis-aligned integer box.
struct Box3 {
  std::array<Iv, 3> iv;
  long long count() const { return iv[0].count() * iv[1].count() * iv[2].count(); }
  // point count as a double; count() overflows once widths reach ~10^6
  double count_d() const {
    return (double)iv[0].count() * (double)iv[1].count() * (double)iv[2].count();
  }
  Box3 negate() const { return {{iv[0].negate(), iv[1].negate(), iv[2].negate()}}; }
  bool contains(std::array<long long, 3> k) const {
    return iv[0].contains(k[0]) && iv[1].contains(k[1]) && iv[2].contains(k[2]);
  }
};

// Every box uses centered-and-scaled coordinates x(v) = (2v - lo - hi)/(hi - lo),
// ranging over [-1, 1]; a degenerate (single-point) interval maps to x = 0.
inline double scaled_coord(Iv I, long long v) {
  return I.width() == 0 ? 0.0 : (double)(2 * v - I.lo - I.hi) / (double)I.width();
}

// sum over v in I of x(v)^p, exact.
double interval_power_sum(const Iv& I, int p);

// Moments of the triple-box lattice { (k,m,n) : k in A, m in B, n in C,
// k+m+n = 0 } on a single axis:  get(pa,pb,pc) = sum xA(k)^pa xB(m)^pb xC(n)^pc.
// The derived variable is the widest box (all substitution slopes <= 1), the
// outer sum runs over the narrowest; wide outer ranges switch from direct
// per-s evaluation to closed-form polynomial summation.
class HexMoments {
 public:
  HexMoments(Iv A, Iv B, Iv C);
  bool feasible() const { return feasible_; }
  double get(int pa, int pb, int pc);

 private:
  std::array<Iv, 3> box_;
  int rs_ = 0, rt_ = 1, rd_ = 2;  // roles: small (outer), mid (summed), derived
  bool feasible_ = false;
  bool numeric_ = false;
  long long s_lo_ = 0, s_hi_ = -1;

  struct Piece {
    long long sa, sb;
    long long al, bl, ah, bh;  // t_lo = al + bl*s, t_hi = ah + bh*s
    std::unique_ptr<PowerSumFamily> fam;
    std::vector<Poly> apow;            // A(sigma)^j
    mutable std::vector<double> ops;   // outer sums of sigma^j, grown on demand
    double bx;                         // slope of xD against xT
  };
  std::vector<Piece> pieces_;
  std::unordered_map<int, double> memo_;

  double compute(int ps, int pt, int pd) const;
  double piece_value(const Piece& pc, int ps, int pt, int pd) const;
  double outer_sigma_sum(const Piece& pc, int j) const;
  double numeric_value(int ps, int pt, int pd) const;
};

// Separable trivariate polynomial: sum of coeff * x^d0 y^d1 z^d2 over the
// scaled coordinates of one box.
struct TriTerm {
  std::array<int, 3> d;
  double c;
};
using TriPoly = std::vector<TriTerm>;

TriPoly tri_mul(const TriPoly& a, const TriPoly& b, double prune_rel = 1e-14);
void tri_add_inplace(TriPoly& acc, const TriPoly& b, double scale = 1.0);
double tri_eval(const TriPoly& p, double x, double y, double z);

// |k|^2 over the box as a TriPoly in scaled coordinates, plus its exact
// range [min,max] over the continuous box hull.
TriPoly box_norm2_poly(const Box3& b);
void box_norm2_range(const Box3& b, double& lo, double& hi);

// Univariate Chebyshev fit of 1/t over the |k|^2 range of the box:
// 1/|k|^2 = sum_j g[j] w^j with w = (|k|^2 - mid)/half in [-1,1].  Relative
// accuracy ~ kappa^{d+1} with kappa < 0.16 for the block geometry used here;
// degree adapts up to dmax.  Fails if the box contains |k|^2 = 0.
struct RecipCheb {
  Poly g;
  double mid = 0.0, half = 1.0;
};
RecipCheb recip_cheb(const Box3& b, double tol, int dmax);

// The same expansion pushed through the separable |k|^2 polynomial, as a
// TriPoly in the box's scaled coordinates.
TriPoly box_recip_norm2(const Box3& b, double tol = 1e-10, int dmax = 14);

// sum over the box lattice of a TriPoly (separable, exact).
double box_poly_sum(const Box3& b, const TriPoly& p);

}  // namespace lab
