#pragma once
#include <cstdint>
#include <vector>

namespace lab {

// Dense univariate polynomial, coeffs[i] multiplies x^i.  Small helper for
// the closed-form lattice sums; not a general-purpose polynomial class.
using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b);
void poly_axpy(Poly& acc, double s, const Poly& a);
double poly_eval(const Poly& p, double x);

// Exact value of sum_{u=0}^{K} (x1 + u*delta)^p for integer K >= 0.
// Small K is summed directly; large K uses the Euler-Maclaurin closed form
// with differences x2^j - x1^j factored through (x2 - x1) = delta*K, which
// keeps the formula cancellation-free even when delta*K << |x1|.
double power_sum_affine(int p, double x1, double delta, long long K);

// sum_{u=0}^{K} (x1 + u*delta)^p where x1, delta, K are affine functions of
// an outer variable sigma: x1 = a1 + b1*sigma, x2 = a2 + b2*sigma (the last
// term), count K = kc + ks*sigma.  Returns the sum as a polynomial in sigma;
// exact for polynomial arguments, used piecewise where K(sigma) >= 0.
// delta is the fixed lattice step in the summed variable's scaled units.
class PowerSumFamily {
 public:
  PowerSumFamily(Poly x1, Poly x2, Poly count, double delta, int max_p);
  const Poly& sum(int p) const { return sums_.at(p); }
  const Poly& x1_pow(int j) const { return p1_.at(j); }
  const Poly& x2_pow(int j) const { return p2_.at(j); }

 private:
  std::vector<Poly> p1_, p2_, geo_, sums_;
};

}  // namespace lab
