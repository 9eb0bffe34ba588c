#include "lab/specnorms.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "lab/errors.hpp"
#include "lab/fit.hpp"
#include "lab/norms.hpp"
#include "lab/transform.hpp"

namespace lab {

namespace {

double two_pi_cubed() { return 8.0 * M_PI * M_PI * M_PI; }

double packets_count(const std::vector<PsiBlock>& packets) {
  double t = 0.0;
  for (const auto& b : packets) t += b.box.count_d();
  return t;
}

// |P(k) a|^2 = mult - numer(k)/|k|^2 with numer the squared projection gap
void l2_symbol_terms(const Box3& box, SymbolKind kind, double& mult, TriPoly& numer) {
  TriPoly c0 = coord_poly(box, 0), c1 = coord_poly(box, 1);
  switch (kind) {
    case SymbolKind::e1:
      mult = 1.0;
      numer = tri_mul(c0, c0);
      return;
    case SymbolKind::e2:
      mult = 1.0;
      numer = tri_mul(c1, c1);
      return;
    case SymbolKind::e2_minus_e1: {
      mult = 2.0;
      TriPoly d = c1;
      tri_add_inplace(d, c0, -1.0);
      numer = tri_mul(d, d);
      return;
    }
  }
  fail(Err::invalid_parameter, "l2_symbol_terms: unknown kind");
}

int next_fft_size(int n) {
  for (int m = std::max(4, n + (n & 1)); ; m += 2) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

// field value at an arbitrary point by direct summation over the support
double sparse_magnitude_at(const SparseField& f, const std::array<double, 3>& x) {
  cplx val[3] = {0, 0, 0};
  for (const auto& [k, v] : f.modes) {
    double ph = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    cplx e(std::cos(ph), std::sin(ph));
    for (int i = 0; i < 3; ++i) val[i] += v[i] * e;
  }
  double m2 = 0.0;
  for (int i = 0; i < 3; ++i) m2 += val[i].real() * val[i].real();
  return std::sqrt(m2);
}

// shrinking pattern search around a seed; objective is the field magnitude
double polish_maximum(const SparseField& f, std::array<double, 3> x, double step) {
  double best = sparse_magnitude_at(f, x);
  for (int it = 0; it < 80 && step > 1e-9; ++it) {
    bool moved = false;
    for (int a = 0; a < 3; ++a)
      for (double s : {-step, step}) {
        auto y = x;
        y[a] += s;
        double v = sparse_magnitude_at(f, y);
        if (v > best) {
          best = v;
          x = y;
          moved = true;
        }
      }
    if (!moved) step *= 0.5;
  }
  return best;
}

// ---- scaled-window machinery ----------------------------------------------

// moments \int_{-1}^{1} t^d e^{i w t} dt for d = 0..dmax, composite 8-point
// Gauss-Legendre with enough panels that each sees at most ~4 radians
void osc_moments(double w, int dmax, std::vector<cplx>& out) {
  static const double gx[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
  static const double gw[4] = {0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  out.assign(dmax + 1, cplx(0.0, 0.0));
  int panels = 1 + (int)(std::abs(w) / 4.0);
  double half = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = -1.0 + (2 * p + 1) * half;
    for (int j = 0; j < 8; ++j) {
      double t = mid + half * (j < 4 ? gx[j] : -gx[j - 4]);
      double wt = half * gw[j & 3];
      cplx e = wt * cplx(std::cos(w * t), std::sin(w * t));
      double tp = 1.0;
      for (int d = 0; d <= dmax; ++d) {
        out[d] += e * tp;
        tp *= t;
      }
    }
  }
}

struct WindowBlock {
  std::array<double, 3> kappa;   // scaled box center
  std::array<double, 3> wfrac;   // (count/2)/Lambda, envelope frequency scale
  std::array<double, 3> sigma;   // count/width, symbol-variable rescale
  int dmax[3] = {0, 0, 0};
  // per component: separable terms with the block volume and coef folded in
  struct Term {
    int d[3];
    cplx c;
  };
  std::vector<Term> terms[3];
};

struct WindowEval {
  double lambda = 1.0;
  std::vector<WindowBlock> blocks;
  int dmax_all = 0;

  WindowEval(const std::vector<PsiBlock>& packets, double symbol_tol) {
    if (packets.empty()) fail(Err::insufficient_data, "window norm of an empty packet set");
    int shell = packets.front().shell;
    lambda = std::ldexp(1.0, shell);
    for (const auto& pb : packets) {
      if (pb.shell != shell)
        fail(Err::invalid_parameter, "window norm: packets span multiple shells");
      if (std::strchr(pb.tag, '*')) continue;  // conjugate partner of another packet
      WindowBlock wb;
      double vol = 1.0;
      for (int a = 0; a < 3; ++a) {
        const Iv& I = pb.box.iv[a];
        double W = 0.5 * (double)I.count();
        wb.kappa[a] = I.center() / lambda;
        wb.wfrac[a] = W / lambda;
        wb.sigma[a] = I.width() > 0 ? (double)I.count() / (double)I.width() : 1.0;
        vol *= W;
      }
      cplx amp = pb.coef * vol;
      for (int comp = 0; comp < 3; ++comp) {
        TriPoly poly = symbol_component_poly(pb.box, pb.kind, comp, symbol_tol);
        for (const auto& t : poly) {
          WindowBlock::Term wt;
          for (int a = 0; a < 3; ++a) {
            wt.d[a] = t.d[a];
            wb.dmax[a] = std::max(wb.dmax[a], t.d[a]);
          }
          wt.c = amp * t.c;
          wb.terms[comp].push_back(wt);
        }
      }
      for (int a = 0; a < 3; ++a) dmax_all = std::max(dmax_all, wb.dmax[a]);
      blocks.push_back(std::move(wb));
    }
    if (blocks.empty())
      fail(Err::invalid_parameter, "window norm: only starred packets supplied");
  }

  // per-axis factor sigma^d * iosc(d, wfrac*y) * e^{i kappa y}
  void axis_factors(const WindowBlock& wb, int a, double y, std::vector<cplx>& out) const {
    osc_moments(wb.wfrac[a] * y, wb.dmax[a], out);
    cplx rot(std::cos(wb.kappa[a] * y), std::sin(wb.kappa[a] * y));
    double sp = 1.0;
    for (int d = 0; d <= wb.dmax[a]; ++d) {
      out[d] *= rot * sp;
      sp *= wb.sigma[a];
    }
  }

  // |field|^2 at window coordinate y, by direct factor evaluation
  double magnitude2_at(const std::array<double, 3>& y) const {
    double m2 = 0.0;
    std::vector<cplx> f0, f1, f2;
    std::vector<std::array<std::vector<cplx>, 3>> fac(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (int a = 0; a < 3; ++a) axis_factors(blocks[b], a, y[a], fac[b][a]);
    for (int comp = 0; comp < 3; ++comp) {
      cplx acc(0.0, 0.0);
      for (std::size_t b = 0; b < blocks.size(); ++b)
        for (const auto& t : blocks[b].terms[comp])
          acc += t.c * fac[b][0][t.d[0]] * fac[b][1][t.d[1]] * fac[b][2][t.d[2]];
      double u = 2.0 * acc.real();  // starred partners double the real part
      m2 += u * u;
    }
    return m2;
  }
};

}  // namespace

double packet_l2(const std::vector<PsiBlock>& packets) {
  double acc = 0.0;
  for (const auto& pb : packets) {
    double mult = 0.0;
    TriPoly numer;
    l2_symbol_terms(pb.box, pb.kind, mult, numer);
    TriPoly recip = box_recip_norm2(pb.box, 1e-12);
    double gap = box_poly_sum(pb.box, tri_mul(numer, recip));
    acc += std::norm(pb.coef) * (mult * pb.box.count_d() - gap);
  }
  return std::sqrt(two_pi_cubed() * acc);
}

double packet_lp_synth(const std::vector<PsiBlock>& packets, double p,
                       const PacketNormOptions& opt) {
  if (packets.empty()) return 0.0;
  SparseField sf = materialize(packets, opt.synth_budget);
  if (p == 2.0) return l2_norm(sf);
  int kmax = sf.max_abs_component();

  GridSpec g{next_fft_size(2 * kmax + 2)};

  if (std::isinf(p)) {
    int m = std::max(g.n, next_fft_size(std::min(3 * kmax + 3, 288)));
    SpectralField dense = densify(sf, g);
    double best = 0.0;
    std::array<double, 3> seat{0, 0, 0};
    // coarse scan component-sums on the m-grid
    std::vector<double> mag2((std::size_t)m * m * m, 0.0);
    for (int c = 0; c < 3; ++c) {
      std::vector<double> comp = synth_component(dense.c[c], g.n, m);
      for (std::size_t i = 0; i < mag2.size(); ++i) mag2[i] += comp[i] * comp[i];
    }
    std::size_t ib = 0;
    for (std::size_t i = 0; i < mag2.size(); ++i)
      if (mag2[i] > best) {
        best = mag2[i];
        ib = i;
      }
    double dx = 2.0 * M_PI / m;
    seat = {dx * (double)(ib / ((std::size_t)m * m)), dx * (double)((ib / m) % m),
            dx * (double)(ib % m)};
    return polish_maximum(sf, seat, 0.75 * dx);
  }

  // finite p: pick a grid the integrand cannot alias on (exact for even
  // integer p; a close oversample otherwise), capped to keep memory sane
  int want = (int)std::ceil(p) * kmax + 2;
  int m = std::max(g.n, next_fft_size(std::min(want, 420)));
  SpectralField dense = densify(sf, g);
  PhysField phys;
  phys.m = m;
  for (int c = 0; c < 3; ++c) phys.v[c] = synth_component(dense.c[c], g.n, m);
  return lp_norm(phys, p);
}

double packet_lp_window(const std::vector<PsiBlock>& packets, double p,
                        const PacketNormOptions& opt) {
  if (!(p >= 2.0) && !std::isinf(p))
    fail(Err::insufficient_data, "window norm supports p >= 2 (tail truncation)");
  WindowEval ev(packets, opt.symbol_tol);

  double Y = std::isinf(p) ? opt.sup_halfwidth : opt.window_halfwidth;
  double h = std::isinf(p) ? opt.sup_spacing : opt.node_spacing;
  int K = (int)std::lround(Y / h);
  int nn = 2 * K + 1;

  // per-axis factor tables F[b][a][d][node]
  std::vector<std::array<std::vector<std::vector<cplx>>, 3>> F(ev.blocks.size());
  std::vector<cplx> mom;
  for (std::size_t b = 0; b < ev.blocks.size(); ++b)
    for (int a = 0; a < 3; ++a) {
      auto& tab = F[b][a];
      tab.assign(ev.blocks[b].dmax[a] + 1, std::vector<cplx>(nn));
      for (int i = 0; i < nn; ++i) {
        double y = (i - K) * h;
        ev.axis_factors(ev.blocks[b], a, y, mom);
        for (int d = 0; d <= ev.blocks[b].dmax[a]; ++d) tab[d][i] = mom[d];
      }
    }

  const bool is_sup = std::isinf(p);
  // |field(-y)| = |field(y)| only when every retained coefficient is real
  // (L and N packets mix real and imaginary weights and break the parity)
  bool even_field = true;
  for (const auto& wb : ev.blocks)
    for (int comp = 0; comp < 3; ++comp)
      for (const auto& t : wb.terms[comp]) even_field &= (t.c.imag() == 0.0);

  double acc = 0.0, best = 0.0;
  std::array<double, 3> ybest{0, 0, 0};
  std::vector<std::vector<cplx>> g(ev.blocks.size() * 3);  // [block*3+comp][d0]
  std::vector<cplx> pd;                                    // (d1,d2) pair products

  int i2_lo = even_field ? K : 0;
  for (int i2 = i2_lo; i2 < nn; ++i2) {
    double w2 = (even_field && i2 != K) ? 2.0 : 1.0;
    for (int i1 = 0; i1 < nn; ++i1) {
      for (std::size_t b = 0; b < ev.blocks.size(); ++b) {
        const auto& wb = ev.blocks[b];
        int n1 = wb.dmax[1] + 1, n2 = wb.dmax[2] + 1;
        pd.assign((std::size_t)n1 * n2, cplx(0.0, 0.0));
        for (int d1 = 0; d1 < n1; ++d1)
          for (int d2 = 0; d2 < n2; ++d2)
            pd[(std::size_t)d1 * n2 + d2] = F[b][1][d1][i1] * F[b][2][d2][i2];
        for (int comp = 0; comp < 3; ++comp) {
          auto& gv = g[b * 3 + comp];
          gv.assign(wb.dmax[0] + 1, cplx(0.0, 0.0));
          for (const auto& t : wb.terms[comp])
            gv[t.d[0]] += t.c * pd[(std::size_t)t.d[1] * n2 + t.d[2]];
        }
      }
      for (int i0 = 0; i0 < nn; ++i0) {
        double m2 = 0.0;
        for (int comp = 0; comp < 3; ++comp) {
          cplx a4(0.0, 0.0);
          for (std::size_t b = 0; b < ev.blocks.size(); ++b) {
            const auto& gv = g[b * 3 + comp];
            const auto& f0 = F[b][0];
            for (std::size_t d = 0; d < gv.size(); ++d) a4 += gv[d] * f0[d][i0];
          }
          double u = 2.0 * a4.real();
          m2 += u * u;
        }
        if (is_sup) {
          if (m2 > best) {
            best = m2;
            ybest = {(i0 - K) * h, (i1 - K) * h, (i2 - K) * h};
          }
        } else {
          acc += w2 * (p == 4.0 ? m2 * m2 : std::pow(m2, 0.5 * p));
        }
      }
    }
  }

  if (is_sup) {
    // polish the grid max with a shrinking pattern search
    auto y = ybest;
    double step = 0.6 * h, bv = best;
    for (int it = 0; it < 80 && step > 1e-7; ++it) {
      bool moved = false;
      for (int a = 0; a < 3; ++a)
        for (double s : {-step, step}) {
          auto yy = y;
          yy[a] += s;
          double v = ev.magnitude2_at(yy);
          if (v > bv) {
            bv = v;
            y = yy;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    return std::sqrt(bv);
  }
  double integral = acc * h * h * h;
  return std::pow(integral / (ev.lambda * ev.lambda * ev.lambda), 1.0 / p);
}

double packet_lp(const std::vector<PsiBlock>& packets, double p, const PacketNormOptions& opt) {
  if (packets.empty()) return 0.0;
  if (!std::isinf(p) && !(p >= 1.0))
    fail(Err::invalid_parameter, "packet_lp: p must be >= 1 or infinity");
  if (p == 2.0) return packet_l2(packets);
  if (packets_count(packets) <= (double)opt.synth_budget) return packet_lp_synth(packets, p, opt);
  return packet_lp_window(packets, p, opt);
}

namespace {

NormTable packet_table(const InitialData& d, double r, double weight_exp, bool magnetic,
                       const std::string& label, const PacketNormOptions& opt) {
  NormTable t;
  t.label = label;
  t.r = r;
  double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  t.predicted_slope = 3.0 - weight_exp - 3.0 * inv_r;
  std::vector<double> xs, ys;
  for (int j = 0; j < d.params.stages; ++j) {
    auto packets = magnetic ? d.b_piece(j) : d.u_piece_high(j);
    if (packets.empty()) continue;
    NormRow row;
    row.stage = j;
    row.q = d.q[j];
    row.norm = packet_lp(packets, r, opt);
    row.normalized = row.norm * std::exp2((3.0 * inv_r + weight_exp - 3.0) * d.q[j]);
    t.rows.push_back(row);
    xs.push_back((double)d.q[j]);
    ys.push_back(std::log2(row.norm));
  }
  if (t.rows.empty()) fail(Err::insufficient_data, "norm table: no packets to measure");
  double lo = t.rows.front().normalized, hi = lo;
  for (const auto& row : t.rows) {
    lo = std::min(lo, row.normalized);
    hi = std::max(hi, row.normalized);
  }
  t.ratio = hi / lo;
  if (xs.size() >= 2) ols_fit(xs, ys, t.slope, t.intercept, t.residual);
  return t;
}

}  // namespace

NormTable velocity_norm_table(const InitialData& d, double r, const PacketNormOptions& opt) {
  return packet_table(d, r, d.params.theta, false, "velocity shell packets", opt);
}

NormTable magnetic_norm_table(const InitialData& d, double r, const PacketNormOptions& opt) {
  if (!d.params.mhd) fail(Err::invalid_parameter, "magnetic norm table needs MHD data");
  return packet_table(d, r, d.params.gamma, true, "magnetic shell packets", opt);
}

double initial_besov(const InitialData& d, double s, double r, const PacketNormOptions& opt) {
  std::map<int, std::vector<PsiBlock>> by_shell;
  for (const auto& b : d.u_blocks) by_shell[b.shell].push_back(b);
  double sup = 0.0;
  for (const auto& [shell, packets] : by_shell)
    sup = std::max(sup, std::exp2(s * shell) * packet_lp(packets, r, opt));
  return sup;
}

}  // namespace lab
