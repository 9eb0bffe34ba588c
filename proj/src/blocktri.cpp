// Closed-form trilinear sums over symbol blocks.
//
// For boxes A, B, C and symbol vectors a, b, c the contribution of one
// block triple to B(u,v,w) is
//
//   (2pi)^3 i coefA coefB coefC sum_{k in A, m in B, n in C, k+m+n=0}
//         [ (P(k)a . P(n)c) ] [ (P(m)b . n) ]
//
// The integrand expands into eight bracket terms, each a product of linear
// forms times up to three Leray reciprocals 1/|k|^2, 1/|m|^2, 1/|n|^2.
// Each reciprocal is a short Chebyshev polynomial in w = (|.|^2 - mid)/half,
// and w splits per axis into quadratics u_0+u_1+u_2; powers w^p then expand
// multinomially.  Tracking the per-axis powers with 1/i! weights turns the
// multinomial bookkeeping into a plain 3D convolution of per-axis moment
// tensors, whose entries are hexagon lattice moments — so the whole sum
// needs no enumeration and works at any shell.
#include <cmath>
#include <complex>
#include <unordered_map>
#include <vector>

#include "lab/boxmoments.hpp"
#include "lab/errors.hpp"
#include "lab/trilinear.hpp"

namespace lab {

namespace {

// k_axis (or m/n) as a polynomial in the slot's scaled variable
TriPoly axis_affine(const Box3& b, int axis, int var) {
  TriPoly t;
  double h = b.iv[axis].half();
  double c = b.iv[axis].center();
  if (h != 0.0) {
    TriTerm tt{{0, 0, 0}, h};
    tt.d[var] = 1;
    t.push_back(tt);
  }
  if (c != 0.0) t.push_back(TriTerm{{{0, 0, 0}}, c});
  return t;
}

TriPoly scale_poly(TriPoly p, double s) {
  if (s == 0.0) return {};
  for (auto& t : p) t.c *= s;
  return p;
}

std::array<double, 3> combo_vec(SymbolKind k) {
  switch (k) {
    case SymbolKind::e1:
      return {1.0, 0.0, 0.0};
    case SymbolKind::e2:
      return {0.0, 1.0, 0.0};
    case SymbolKind::e2_minus_e1:
      return {-1.0, 1.0, 0.0};
  }
  fail(Err::invalid_parameter, "combo_vec: unknown symbol kind");
}

// 1/|.|^2 over one slot's box: Chebyshev weights g[p] for w^p plus the
// balanced per-axis split w = u_0 + u_1 + u_2 (each u_alpha near zero so
// high powers stay well conditioned).
struct SlotRecip {
  Poly g;
  std::array<TriPoly, 3> u;
  int deg = 0;
};

SlotRecip slot_recip(const Box3& b, int var, double tol, int dmax) {
  RecipCheb rc = recip_cheb(b, tol, dmax);
  SlotRecip s;
  s.g = rc.g;
  s.deg = (int)rc.g.size() - 1;
  double mean[3], msum = 0.0;
  for (int a = 0; a < 3; ++a) {
    double c = b.iv[a].center(), h = b.iv[a].half();
    double ex2 =
        b.iv[a].count() > 1 ? interval_power_sum(b.iv[a], 2) / (double)b.iv[a].count() : 0.0;
    mean[a] = c * c + h * h * ex2;
    msum += mean[a];
  }
  for (int a = 0; a < 3; ++a) {
    double c = b.iv[a].center(), h = b.iv[a].half();
    double shift = mean[a] + (rc.mid - msum) / 3.0;
    TriPoly u;
    if (h != 0.0) {
      TriTerm q{{0, 0, 0}, h * h / rc.half};
      q.d[var] = 2;
      u.push_back(q);
      TriTerm l{{0, 0, 0}, 2.0 * c * h / rc.half};
      l.d[var] = 1;
      u.push_back(l);
    }
    double c0 = (c * c - shift) / rc.half;
    if (c0 != 0.0) u.push_back(TriTerm{{{0, 0, 0}}, c0});
    s.u[a] = std::move(u);
  }
  return s;
}

std::vector<TriPoly> poly_powers(const TriPoly& base, int dmax) {
  std::vector<TriPoly> p(dmax + 1);
  p[0] = TriPoly{{{{0, 0, 0}}, 1.0}};
  for (int i = 1; i <= dmax; ++i) p[i] = tri_mul(p[i - 1], base);
  return p;
}

// the eight numerator linear forms, by global bit id
enum Factor { fAK = 0, fKC, fAN, fNC, fKN, fBN, fBM, fMN, kFactors };

struct Bracket {
  double sign;
  bool use_ac;  // multiply by the constant a.c
  bool rA, rB, rC;
  std::vector<int> factors;
};

const Bracket kBrackets[] = {
    {+1.0, true, false, false, false, {fBN}},
    {-1.0, true, false, true, false, {fBM, fMN}},
    {-1.0, false, true, false, false, {fAK, fKC, fBN}},
    {+1.0, false, true, true, false, {fAK, fKC, fBM, fMN}},
    {-1.0, false, false, false, true, {fAN, fNC, fBN}},
    {+1.0, false, false, true, true, {fAN, fNC, fBM, fMN}},
    {+1.0, false, true, false, true, {fAK, fKN, fNC, fBN}},
    {-1.0, false, true, true, true, {fAK, fKN, fNC, fBM, fMN}},
};

class TripleSum {
 public:
  TripleSum(const PsiBlock& A, const PsiBlock& B, const PsiBlock& C, const BlockTriOptions& opt) {
    for (int a = 0; a < 3; ++a) hex_.emplace_back(A.box.iv[a], B.box.iv[a], C.box.iv[a]);
    feasible_ = hex_[0].feasible() && hex_[1].feasible() && hex_[2].feasible();
    if (!feasible_) return;

    ra_ = slot_recip(A.box, 0, opt.recip_tol, opt.recip_dmax);
    rb_ = slot_recip(B.box, 1, opt.recip_tol, opt.recip_dmax);
    rc_ = slot_recip(C.box, 2, opt.recip_tol, opt.recip_dmax);
    na_ = ra_.deg + 1;
    nb_ = rb_.deg + 1;
    nc_ = rc_.deg + 1;
    for (int a = 0; a < 3; ++a) {
      upow_[a] = poly_powers(ra_.u[a], ra_.deg);
      vpow_[a] = poly_powers(rb_.u[a], rb_.deg);
      tpow_[a] = poly_powers(rc_.u[a], rc_.deg);
    }
    wa_ = weights(ra_);
    wb_ = weights(rb_);
    wc_ = weights(rc_);

    auto a = combo_vec(A.kind), b = combo_vec(B.kind), c = combo_vec(C.kind);
    ac_ = a[0] * c[0] + a[1] * c[1] + a[2] * c[2];
    for (int ax = 0; ax < 3; ++ax) {
      TriPoly k = axis_affine(A.box, ax, 0);
      TriPoly m = axis_affine(B.box, ax, 1);
      TriPoly n = axis_affine(C.box, ax, 2);
      fac_[fAK][ax] = scale_poly(k, a[ax]);
      fac_[fKC][ax] = scale_poly(k, c[ax]);
      fac_[fAN][ax] = scale_poly(n, a[ax]);
      fac_[fNC][ax] = scale_poly(n, c[ax]);
      fac_[fKN][ax] = tri_mul(k, n);
      fac_[fBN][ax] = scale_poly(n, b[ax]);
      fac_[fBM][ax] = scale_poly(m, b[ax]);
      fac_[fMN][ax] = tri_mul(m, n);
    }
  }

  bool feasible() const { return feasible_; }

  // sum over the constrained lattice of F1*F2 (coefficients excluded)
  double value() {
    double total = 0.0;
    for (const auto& br : kBrackets) {
      if (br.use_ac && ac_ == 0.0) continue;
      double part = 0.0;
      assign(br, 0, 0u, 0u, 0u, part);
      total += br.sign * (br.use_ac ? ac_ : 1.0) * part;
    }
    return total;
  }

 private:
  static std::vector<double> weights(const SlotRecip& r) {
    std::vector<double> w(r.g.size());
    double f = 1.0;
    for (std::size_t p = 0; p < r.g.size(); ++p) {
      if (p) f *= (double)p;
      w[p] = r.g[p] * f;
    }
    return w;
  }

  // recursive assignment of each numerator factor to one axis
  void assign(const Bracket& br, std::size_t idx, unsigned m0, unsigned m1, unsigned m2,
              double& out) {
    if (idx == br.factors.size()) {
      out += contract(br, phi(0, m0), phi(1, m1), phi(2, m2));
      return;
    }
    unsigned bit = 1u << br.factors[idx];
    if (!fac_[br.factors[idx]][0].empty()) assign(br, idx + 1, m0 | bit, m1, m2, out);
    if (!fac_[br.factors[idx]][1].empty()) assign(br, idx + 1, m0, m1 | bit, m2, out);
    if (!fac_[br.factors[idx]][2].empty()) assign(br, idx + 1, m0, m1, m2 | bit, out);
  }

  // per-axis moment tensor Phi[i][j][l] = (1/i!j!l!) sum_hex u^i v^j t^l * maskpoly
  const std::vector<double>& phi(int axis, unsigned mask) {
    auto it = memo_[axis].find(mask);
    if (it != memo_[axis].end()) return it->second;

    std::vector<double> tensor((std::size_t)na_ * nb_ * nc_, 0.0);
    TriPoly mp{{{{0, 0, 0}}, 1.0}};
    bool zero = false;
    for (int f = 0; f < kFactors && !zero; ++f)
      if (mask & (1u << f)) {
        if (fac_[f][axis].empty())
          zero = true;
        else
          mp = tri_mul(mp, fac_[f][axis]);
      }
    if (!zero) {
      double inv_i = 1.0;
      for (int i = 0; i < na_; ++i) {
        if (i) inv_i /= (double)i;
        TriPoly pi = tri_mul(mp, upow_[axis][i]);
        double inv_ij = inv_i;
        for (int j = 0; j < nb_; ++j) {
          if (j) inv_ij /= (double)j;
          TriPoly pij = tri_mul(pi, vpow_[axis][j]);
          double inv = inv_ij;
          for (int l = 0; l < nc_; ++l) {
            if (l) inv /= (double)l;
            TriPoly pijl = tri_mul(pij, tpow_[axis][l]);
            double s = 0.0;
            for (const auto& t : pijl) s += t.c * hex_[axis].get(t.d[0], t.d[1], t.d[2]);
            tensor[(std::size_t)(i * nb_ + j) * nc_ + l] = s * inv;
          }
        }
      }
    }
    return memo_[axis].emplace(mask, std::move(tensor)).first->second;
  }

  // sum_{I,J,L} wa[|I|] wb[|J|] wc[|L|] prod_axis Phi_axis[I_ax][J_ax][L_ax],
  // via convolution of the first two tensors; slots without a reciprocal in
  // this bracket contribute only their zeroth power
  double contract(const Bracket& br, const std::vector<double>& P0, const std::vector<double>& P1,
                  const std::vector<double>& P2) const {
    int dA = br.rA ? ra_.deg : 0, dB = br.rB ? rb_.deg : 0, dC = br.rC ? rc_.deg : 0;
    auto at = [&](const std::vector<double>& P, int i, int j, int l) {
      return P[(std::size_t)(i * nb_ + j) * nc_ + l];
    };
    std::vector<double> R((std::size_t)(dA + 1) * (dB + 1) * (dC + 1), 0.0);
    for (int i0 = 0; i0 <= dA; ++i0)
      for (int i1 = 0; i0 + i1 <= dA; ++i1)
        for (int j0 = 0; j0 <= dB; ++j0)
          for (int j1 = 0; j0 + j1 <= dB; ++j1)
            for (int l0 = 0; l0 <= dC; ++l0) {
              double p00 = at(P0, i0, j0, l0);
              if (p00 == 0.0) continue;
              for (int l1 = 0; l0 + l1 <= dC; ++l1) {
                double v = p00 * at(P1, i1, j1, l1);
                if (v != 0.0)
                  R[(std::size_t)((i0 + i1) * (dB + 1) + (j0 + j1)) * (dC + 1) + l0 + l1] += v;
              }
            }
    double out = 0.0;
    for (int p = 0; p <= dA; ++p)
      for (int q = 0; q <= dB; ++q)
        for (int r = 0; r <= dC; ++r) {
          double rv = R[(std::size_t)(p * (dB + 1) + q) * (dC + 1) + r];
          if (rv == 0.0) continue;
          for (int i2 = 0; p + i2 <= dA; ++i2)
            for (int j2 = 0; q + j2 <= dB; ++j2)
              for (int l2 = 0; r + l2 <= dC; ++l2) {
                double pv = at(P2, i2, j2, l2);
                if (pv != 0.0)
                  out += rv * pv * (br.rA ? wa_[p + i2] : 1.0) * (br.rB ? wb_[q + j2] : 1.0) *
                         (br.rC ? wc_[r + l2] : 1.0);
              }
        }
    return out;
  }

  std::vector<HexMoments> hex_;
  bool feasible_ = false;
  SlotRecip ra_, rb_, rc_;
  int na_ = 1, nb_ = 1, nc_ = 1;
  std::array<std::vector<TriPoly>, 3> upow_, vpow_, tpow_;
  std::vector<double> wa_, wb_, wc_;
  double ac_ = 0.0;
  TriPoly fac_[kFactors][3];
  std::unordered_map<unsigned, std::vector<double>> memo_[3];
};

}  // namespace

double trilinear_block(const std::vector<PsiBlock>& u, const std::vector<PsiBlock>& v,
                       const std::vector<PsiBlock>& w, const BlockTriOptions& opt,
                       double* imag_diag) {
  cplx acc(0.0, 0.0);
  for (const auto& Ab : u)
    for (const auto& Bb : v)
      for (const auto& Cb : w) {
        bool ok = true;
        for (int ax = 0; ax < 3 && ok; ++ax) {
          long long lo = Ab.box.iv[ax].lo + Bb.box.iv[ax].lo + Cb.box.iv[ax].lo;
          long long hi = Ab.box.iv[ax].hi + Bb.box.iv[ax].hi + Cb.box.iv[ax].hi;
          ok = lo <= 0 && 0 <= hi;
        }
        if (!ok) continue;
        TripleSum ts(Ab, Bb, Cb, opt);
        if (!ts.feasible()) continue;
        acc += Ab.coef * Bb.coef * Cb.coef * ts.value();
      }
  cplx val = 8.0 * M_PI * M_PI * M_PI * cplx(0.0, 1.0) * acc;
  if (imag_diag) *imag_diag = std::abs(val.imag());
  return val.real();
}

}  // namespace lab
