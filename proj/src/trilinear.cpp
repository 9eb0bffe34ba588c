#include "lab/trilinear.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lab/errors.hpp"
#include "lab/fit.hpp"
#include "lab/transform.hpp"

namespace lab {

namespace {

double two_pi_cubed() { return 8.0 * M_PI * M_PI * M_PI; }

struct K3Hash {
  std::size_t operator()(const K3& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int a = 0; a < 3; ++a) {
      h ^= (std::uint64_t)(std::uint32_t)k[a] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return (std::size_t)h;
  }
};

void require_hermitian(const SparseField& f, const char* slot) {
  double amp = 0.0;
  for (const auto& [k, v] : f.modes) {
    (void)k;
    for (int a = 0; a < 3; ++a) amp = std::max(amp, std::abs(v[a]));
  }
  if (hermitian_residual(f) > 1e-12 * std::max(amp, 1e-300))
    fail(Err::symmetry_violation, std::string("trilinear: slot ") + slot + " is not Hermitian");
}

}  // namespace

double trilinear_sparse(const SparseField& u, const SparseField& v, const SparseField& w,
                        long long pair_budget, double* imag_diag) {
  require_hermitian(u, "u");
  require_hermitian(v, "v");
  require_hermitian(w, "w");

  std::size_t su = u.support_size(), sv = v.support_size(), sw = w.support_size();
  if (su == 0 || sv == 0 || sw == 0) {
    if (imag_diag) *imag_diag = 0.0;
    return 0.0;
  }

  // join on the largest support; enumerate the other two
  int lookup = sw >= su && sw >= sv ? 2 : (sv >= su ? 1 : 0);
  double pairs = lookup == 2   ? (double)su * (double)sv
                 : lookup == 1 ? (double)su * (double)sw
                               : (double)sv * (double)sw;
  if (pairs > (double)pair_budget)
    fail(Err::budget_exceeded, "trilinear_sparse: support join of " + std::to_string((long long)pairs) +
                                   " pairs exceeds the budget of " + std::to_string(pair_budget));

  const SparseField& big = lookup == 2 ? w : (lookup == 1 ? v : u);
  std::unordered_map<K3, const V3c*, K3Hash> idx;
  idx.reserve(big.modes.size() * 2);
  for (const auto& [k, val] : big.modes) idx.emplace(k, &val);

  cplx acc(0.0, 0.0);
  auto term = [&](const K3&, const V3c& uk, const K3&, const V3c& vm, const K3& n,
                  const V3c& wn) {
    cplx uw = dot(uk, wn);
    cplx vn = (double)n[0] * vm[0] + (double)n[1] * vm[1] + (double)n[2] * vm[2];
    acc += uw * vn;
  };

  if (lookup == 2) {
    for (const auto& [k, uk] : u.modes)
      for (const auto& [m, vm] : v.modes) {
        K3 n{-k[0] - m[0], -k[1] - m[1], -k[2] - m[2]};
        auto it = idx.find(n);
        if (it != idx.end()) term(k, uk, m, vm, n, *it->second);
      }
  } else if (lookup == 1) {
    for (const auto& [k, uk] : u.modes)
      for (const auto& [n, wn] : w.modes) {
        K3 m{-k[0] - n[0], -k[1] - n[1], -k[2] - n[2]};
        auto it = idx.find(m);
        if (it != idx.end()) term(k, uk, m, *it->second, n, wn);
      }
  } else {
    for (const auto& [m, vm] : v.modes)
      for (const auto& [n, wn] : w.modes) {
        K3 k{-m[0] - n[0], -m[1] - n[1], -m[2] - n[2]};
        auto it = idx.find(k);
        if (it != idx.end()) term(k, *it->second, m, vm, n, wn);
      }
  }

  cplx val = two_pi_cubed() * cplx(0.0, 1.0) * acc;
  if (imag_diag) *imag_diag = std::abs(val.imag());
  return val.real();
}

double trilinear_grid(const SpectralField& u, const SpectralField& v, const SpectralField& w,
                      int force_m) {
  if (!(u.grid == v.grid) || !(u.grid == w.grid))
    fail(Err::shape_mismatch, "trilinear_grid: fields on different grids");
  int n = u.grid.n, band = u.grid.band_limit();
  int need = 3 * band + 1;
  int m = force_m > 0 ? force_m : need;
  while (m % 2) ++m;
  if (m < need)
    fail(Err::resolution, "trilinear_grid: m = " + std::to_string(m) +
                              " cannot hold the alias-free triple product (need " +
                              std::to_string(need) + ")");

  std::array<std::vector<double>, 3> us, vs;
  for (int a = 0; a < 3; ++a) {
    us[a] = synth_component(u.c[a], n, m);
    vs[a] = synth_component(v.c[a], n, m);
  }
  double acc = 0.0;
  std::vector<cplx> dspec(u.grid.size());
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      for (std::size_t idx = 0; idx < dspec.size(); ++idx) {
        K3 k = u.grid.k_of(idx);
        dspec[idx] = w.c[j][idx] * cplx(0.0, (double)k[i]);
      }
      std::vector<double> dw = synth_component(dspec, n, m);
      double part = 0.0;
      for (std::size_t x = 0; x < dw.size(); ++x) part += us[j][x] * vs[i][x] * dw[x];
      acc += part;
    }
  double cell = two_pi_cubed() / ((double)m * m * m);
  return acc * cell;
}

namespace {

TrilinearReport make_report(const std::string& label, double predicted,
                            const std::vector<int>& qs, const std::vector<double>& vals) {
  TrilinearReport r;
  r.label = label;
  r.predicted_exponent = predicted;
  for (std::size_t j = 0; j < qs.size(); ++j) r.shells.push_back({qs[j], vals[j]});

  std::vector<double> xs, ys;
  std::size_t first = qs.size() > 3 ? 1 : 0;  // drop the transient shell when we can
  for (std::size_t j = first; j < qs.size(); ++j) {
    if (vals[j] == 0.0) {
      // no wavevector triples in the supports at this shell: the row has no
      // scaling law to fit, which is itself a result worth reporting
      r.note = "value vanishes at shell " + std::to_string(qs[j]) +
               " (supports admit no triple there)";
      r.pass = false;
      return r;
    }
    xs.push_back((double)qs[j]);
    ys.push_back(std::log2(std::abs(vals[j])));
  }
  ols_fit(xs, ys, r.slope, r.intercept, r.residual);
  for (std::size_t j = first + 1; j < qs.size(); ++j)
    if (std::signbit(vals[j]) != std::signbit(vals[first])) r.sign_alternation = true;
  r.pass = std::abs(r.slope - predicted) <= TrilinearReport::kSlopeTol;
  return r;
}

}  // namespace

std::vector<TrilinearReport> verify_lemma_tril(const ConstructionParams& p,
                                               const BlockTriOptions& opt) {
  if (p.stages < 3)
    fail(Err::insufficient_data, "verify_lemma_tril: a slope needs at least 3 shells");
  InitialData d = build_initial_data(p);

  auto row = [&](const std::vector<PsiBlock>& s1, const std::vector<PsiBlock>& s2,
                 bool magnetic_probe) {
    std::vector<double> vals;
    for (int j = 0; j < p.stages; ++j) {
      auto probe = magnetic_probe ? d.b_piece(j) : d.u_piece_high(j);
      vals.push_back(trilinear_block(s1, s2, probe, opt));
    }
    return vals;
  };

  std::vector<TrilinearReport> out;
  double theta_exp = 7.0 - 3.0 * p.theta;
  out.push_back(make_report("B(u0,u0,U_q)", theta_exp, d.q, row(d.u_blocks, d.u_blocks, false)));
  if (p.mhd) {
    double mixed_exp = 7.0 - 2.0 * p.gamma - p.theta;
    out.push_back(
        make_report("B(b0,b0,U_q)", mixed_exp, d.q, row(d.b_blocks, d.b_blocks, false)));
    out.push_back(
        make_report("B(u0,b0,B_q)", mixed_exp, d.q, row(d.u_blocks, d.b_blocks, true)));
    out.push_back(
        make_report("B(b0,u0,B_q)", mixed_exp, d.q, row(d.b_blocks, d.u_blocks, true)));
  }
  return out;
}

double shell_local_share(const InitialData& d, const BlockTriOptions& opt) {
  if (d.params.mhd)
    fail(Err::invalid_parameter, "shell_local_share: defined for the velocity-only data");
  int last = d.params.stages - 1;
  auto high = d.u_piece_high(last);
  double total = trilinear_block(d.u_blocks, d.u_blocks, high, opt);
  double local = trilinear_block(d.u_piece_low(last), high, high, opt);
  if (total == 0.0) fail(Err::insufficient_data, "shell_local_share: top-shell flux vanished");
  return local / total;
}

}  // namespace lab
