#include "lab/boxmoments.hpp"

#include <algorithm>
#include <cmath>

#include "lab/errors.hpp"

namespace lab {

namespace {

double powint(double x, int p) {
  double r = 1.0, b = x;
  for (int e = p; e > 0; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (double)(n - k + i) / (double)i;
  return r;
}

constexpr int kDegCap = 64;  // per-variable degree bound for hexagon queries

int pack_key(int pa, int pb, int pc) { return (pa * (kDegCap + 1) + pb) * (kDegCap + 1) + pc; }

}  // namespace

double interval_power_sum(const Iv& I, int p) {
  if (I.empty()) return 0.0;
  if (I.width() == 0) return p == 0 ? 1.0 : 0.0;
  return power_sum_affine(p, -1.0, 2.0 / (double)I.width(), I.width());
}

HexMoments::HexMoments(Iv A, Iv B, Iv C) : box_{A, B, C} {
  if (A.empty() || B.empty() || C.empty()) return;

  long long w[3] = {A.width(), B.width(), C.width()};
  rd_ = 0;
  for (int i = 1; i < 3; ++i)
    if (w[i] > w[rd_]) rd_ = i;
  rs_ = rd_ == 0 ? 1 : 0;
  for (int i = 0; i < 3; ++i)
    if (i != rd_ && w[i] < w[rs_]) rs_ = i;
  rt_ = 3 - rs_ - rd_;

  const Iv &S = box_[rs_], &T = box_[rt_], &D = box_[rd_];
  s_lo_ = std::max(S.lo, -T.hi - D.hi);
  s_hi_ = std::min(S.hi, -T.lo - D.lo);
  feasible_ = s_lo_ <= s_hi_;
  if (!feasible_) return;

  numeric_ = (s_hi_ - s_lo_ + 1) <= 64;
  if (numeric_) return;

  // piecewise form of the t interval [max(T.lo,-s-D.hi), min(T.hi,-s-D.lo)]
  long long b1 = -T.lo - D.hi;      // t_lo constant for s >= b1
  long long b2 = -T.hi - D.lo;      // t_hi constant for s <= b2
  std::vector<long long> cuts{s_lo_};
  for (long long c : {b1, b2 + 1})
    if (c > s_lo_ && c <= s_hi_) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  long long Sc2 = S.lo + S.hi, Sw = S.width();
  long long Tc2 = T.lo + T.hi, Tw = T.width();
  long long Dc2 = D.lo + D.hi, Dw = D.width();
  for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
    Piece pc;
    pc.sa = cuts[ci];
    pc.sb = ci + 1 < cuts.size() ? cuts[ci + 1] - 1 : s_hi_;
    pc.bl = pc.sa >= b1 ? 0 : -1;
    pc.al = pc.bl == 0 ? T.lo : -D.hi;
    pc.bh = pc.sb <= b2 ? 0 : -1;
    pc.ah = pc.bh == 0 ? T.hi : -D.lo;

    // scaled T coordinates of the interval ends, affine in sigma = xS(s)
    Poly x1{(double)(2 * pc.al + pc.bl * Sc2 - Tc2) / (double)Tw,
            (double)(pc.bl * Sw) / (double)Tw};
    Poly x2{(double)(2 * pc.ah + pc.bh * Sc2 - Tc2) / (double)Tw,
            (double)(pc.bh * Sw) / (double)Tw};
    Poly count{(double)(2 * (pc.ah - pc.al) + (pc.bh - pc.bl) * Sc2) / 2.0,
               (double)((pc.bh - pc.bl) * Sw) / 2.0};
    pc.fam = std::make_unique<PowerSumFamily>(x1, x2, count, 2.0 / (double)Tw, kDegCap);

    Poly A_of_sigma{(double)(-Sc2 - Tc2 - Dc2) / (double)Dw, -(double)Sw / (double)Dw};
    pc.apow.resize(kDegCap + 1);
    pc.apow[0] = Poly{1.0};
    for (int j = 1; j <= kDegCap; ++j) pc.apow[j] = poly_mul(pc.apow[j - 1], A_of_sigma);
    pc.bx = -(double)Tw / (double)Dw;
    pieces_.push_back(std::move(pc));
  }
}

double HexMoments::get(int pa, int pb, int pc) {
  if (!feasible_) return 0.0;
  if (pa > kDegCap || pb > kDegCap || pc > kDegCap)
    fail(Err::invalid_parameter, "HexMoments: degree above cap");
  int key = pack_key(pa, pb, pc);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  int p[3] = {pa, pb, pc};
  double v = compute(p[rs_], p[rt_], p[rd_]);
  memo_.emplace(key, v);
  return v;
}

double HexMoments::compute(int ps, int pt, int pd) const {
  if (numeric_) return numeric_value(ps, pt, pd);
  double acc = 0.0;
  for (const Piece& pc : pieces_) acc += piece_value(pc, ps, pt, pd);
  return acc;
}

double HexMoments::outer_sigma_sum(const Piece& pc, int j) const {
  const Iv& S = box_[rs_];
  while ((int)pc.ops.size() <= j) {
    int jj = (int)pc.ops.size();
    double x1 = scaled_coord(S, pc.sa);
    pc.ops.push_back(power_sum_affine(jj, x1, 2.0 / (double)S.width(), pc.sb - pc.sa));
  }
  return pc.ops[j];
}

double HexMoments::piece_value(const Piece& pc, int ps, int pt, int pd) const {
  // inner(s) = sum_t xT^pt xD^pd with xD = A(sigma) + bx*xT
  Poly inner;
  for (int i = 0; i <= pd; ++i) {
    double coef = binom(pd, i) * powint(pc.bx, i);
    poly_axpy(inner, coef, poly_mul(pc.apow[pd - i], pc.fam->sum(pt + i)));
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < inner.size(); ++j)
    if (inner[j] != 0.0) acc += inner[j] * outer_sigma_sum(pc, ps + (int)j);
  return acc;
}

double HexMoments::numeric_value(int ps, int pt, int pd) const {
  const Iv &S = box_[rs_], &T = box_[rt_], &D = box_[rd_];
  double acc = 0.0;
  for (long long s = s_lo_; s <= s_hi_; ++s) {
    long long t_lo = std::max(T.lo, -s - D.hi);
    long long t_hi = std::min(T.hi, -s - D.lo);
    if (t_lo > t_hi) continue;
    double inner;
    if (D.width() == 0) {
      inner = (pd == 0 ? 1.0 : 0.0) * powint(scaled_coord(T, t_lo), pt);
    } else if (T.width() == 0) {
      inner = (pt == 0 ? 1.0 : 0.0) * powint(scaled_coord(D, -s - T.lo), pd);
    } else {
      double A = (double)(-2 * s - (T.lo + T.hi) - (D.lo + D.hi)) / (double)D.width();
      double bx = -(double)T.width() / (double)D.width();
      double x1 = scaled_coord(T, t_lo);
      inner = 0.0;
      for (int i = 0; i <= pd; ++i)
        inner += binom(pd, i) * powint(bx, i) * powint(A, pd - i) *
                 power_sum_affine(pt + i, x1, 2.0 / (double)T.width(), t_hi - t_lo);
    }
    acc += powint(scaled_coord(S, s), ps) * inner;
  }
  return acc;
}

// --- separable trivariate polynomials ------------------------------------

namespace {

TriPoly normalize(std::unordered_map<long long, double>& acc, double prune_rel) {
  double top = 0.0;
  for (auto& [k, c] : acc) top = std::max(top, std::abs(c));
  TriPoly out;
  out.reserve(acc.size());
  for (auto& [k, c] : acc) {
    if (std::abs(c) < prune_rel * top) continue;
    int d2 = (int)(k % 128), d1 = (int)((k / 128) % 128), d0 = (int)(k / (128 * 128));
    out.push_back({{d0, d1, d2}, c});
  }
  std::sort(out.begin(), out.end(), [](const TriTerm& a, const TriTerm& b) { return a.d < b.d; });
  return out;
}

long long tri_key(const std::array<int, 3>& d) {
  return ((long long)d[0] * 128 + d[1]) * 128 + d[2];
}

}  // namespace

TriPoly tri_mul(const TriPoly& a, const TriPoly& b, double prune_rel) {
  std::unordered_map<long long, double> acc;
  acc.reserve(a.size() * 2);
  for (const auto& ta : a)
    for (const auto& tb : b)
      acc[tri_key({ta.d[0] + tb.d[0], ta.d[1] + tb.d[1], ta.d[2] + tb.d[2]})] += ta.c * tb.c;
  return normalize(acc, prune_rel);
}

void tri_add_inplace(TriPoly& acc, const TriPoly& b, double scale) {
  std::unordered_map<long long, double> m;
  m.reserve(acc.size() + b.size());
  for (const auto& t : acc) m[tri_key(t.d)] += t.c;
  for (const auto& t : b) m[tri_key(t.d)] += scale * t.c;
  acc = normalize(m, 0.0);
}

double tri_eval(const TriPoly& p, double x, double y, double z) {
  double acc = 0.0;
  for (const auto& t : p) acc += t.c * powint(x, t.d[0]) * powint(y, t.d[1]) * powint(z, t.d[2]);
  return acc;
}

TriPoly box_norm2_poly(const Box3& b) {
  TriPoly out;
  double c0 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double c = b.iv[a].center(), h = b.iv[a].half();
    c0 += c * c;
    if (h != 0.0) {
      std::array<int, 3> d1{0, 0, 0}, d2{0, 0, 0};
      d1[a] = 1;
      d2[a] = 2;
      if (c != 0.0) out.push_back({d1, 2.0 * c * h});
      out.push_back({d2, h * h});
    }
  }
  out.push_back({{0, 0, 0}, c0});
  std::sort(out.begin(), out.end(), [](const TriTerm& x, const TriTerm& y) { return x.d < y.d; });
  return out;
}

void box_norm2_range(const Box3& b, double& lo, double& hi) {
  lo = hi = 0.0;
  for (int a = 0; a < 3; ++a) {
    double u = (double)b.iv[a].lo, v = (double)b.iv[a].hi;
    double mx = std::max(u * u, v * v);
    double mn = (u <= 0.0 && 0.0 <= v) ? 0.0 : std::min(u * u, v * v);
    lo += mn;
    hi += mx;
  }
}

RecipCheb recip_cheb(const Box3& b, double tol, int dmax) {
  double lo, hi;
  box_norm2_range(b, lo, hi);
  if (lo <= 0.0) fail(Err::invalid_parameter, "recip_cheb: box touches the zero mode");
  RecipCheb rc;
  rc.mid = 0.5 * (hi + lo);
  rc.half = 0.5 * (hi - lo);
  if (rc.half <= 0.0) {
    rc.g = Poly{1.0 / rc.mid};
    rc.half = 1.0;  // w is identically 0; any scale works
    return rc;
  }

  double rho = rc.half / rc.mid;
  double root = std::sqrt(1.0 - rho * rho);
  double kappa = rho / (1.0 + root);
  int d = 2;
  while (d < dmax && 2.0 * std::pow(kappa, d + 1) * (1.0 + rho) / ((1.0 - kappa) * root) > tol)
    ++d;

  // Chebyshev coefficients of 1/(1+rho w) on [-1,1], then to monomials in w
  std::vector<Poly> cheb(d + 1);
  cheb[0] = Poly{1.0};
  if (d >= 1) cheb[1] = Poly{0.0, 1.0};
  for (int t = 2; t <= d; ++t) {
    Poly two_w_prev = poly_mul(Poly{0.0, 2.0}, cheb[t - 1]);
    poly_axpy(two_w_prev, -1.0, cheb[t - 2]);
    cheb[t] = std::move(two_w_prev);
  }
  Poly g;
  poly_axpy(g, 1.0 / root, cheb[0]);
  double ck = 1.0;
  for (int t = 1; t <= d; ++t) {
    ck *= -kappa;
    poly_axpy(g, 2.0 * ck / root, cheb[t]);
  }
  for (auto& c : g) c /= rc.mid;
  rc.g = std::move(g);
  return rc;
}

TriPoly box_recip_norm2(const Box3& b, double tol, int dmax) {
  RecipCheb rc = recip_cheb(b, tol, dmax);
  if (rc.g.size() == 1) return TriPoly{{{0, 0, 0}, rc.g[0]}};

  // w = (|k|^2 - mid)/half as a separable polynomial, then Horner
  TriPoly w = box_norm2_poly(b);
  tri_add_inplace(w, TriPoly{{{{0, 0, 0}}, -rc.mid}});
  for (auto& t : w) t.c /= rc.half;

  TriPoly r{{{{0, 0, 0}}, rc.g.back()}};
  for (int j = (int)rc.g.size() - 2; j >= 0; --j) {
    r = tri_mul(r, w);
    tri_add_inplace(r, TriPoly{{{{0, 0, 0}}, rc.g[j]}});
  }
  return r;
}

double box_poly_sum(const Box3& b, const TriPoly& p) {
  double acc = 0.0;
  for (const auto& t : p) {
    double v = t.c;
    for (int a = 0; a < 3; ++a) v *= interval_power_sum(b.iv[a], t.d[a]);
    acc += v;
  }
  return acc;
}

}  // namespace lab
