#include "lab/field.hpp"

#include <cmath>

namespace lab {

double PhysField::dx() const { return 2.0 * M_PI / m; }

Mat3 leray_matrix(K3 k) {
  Mat3 p{};
  long n2 = knorm2(k);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double id = a == b ? 1.0 : 0.0;
      p[a][b] = n2 == 0 ? id : id - (double)k[a] * k[b] / (double)n2;
    }
  return p;
}

V3c leray_apply(K3 k, V3c v) {
  long n2 = knorm2(k);
  if (n2 == 0) return v;
  cplx kv = (double)k[0] * v[0] + (double)k[1] * v[1] + (double)k[2] * v[2];
  cplx s = kv / (double)n2;
  return {v[0] - s * (double)k[0], v[1] - s * (double)k[1], v[2] - s * (double)k[2]};
}

void project_leray(SpectralField& f) {
  const GridSpec& g = f.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    K3 k = g.k_of(i);
    long n2 = knorm2(k);
    if (n2 == 0) continue;
    cplx kv = (double)k[0] * f.c[0][i] + (double)k[1] * f.c[1][i] + (double)k[2] * f.c[2][i];
    cplx s = kv / (double)n2;
    for (int a = 0; a < 3; ++a) f.c[a][i] -= s * (double)k[a];
  }
}

void project_leray(SparseField& f) {
  for (auto& [k, v] : f.modes) v = leray_apply(k, v);
}

SpectralField derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis > 2) fail(Err::axis_range, "derivative axis must be 0, 1 or 2");
  SpectralField out(f.grid);
  const GridSpec& g = f.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    K3 k = g.k_of(i);
    cplx ik{0.0, (double)k[axis]};
    for (int a = 0; a < 3; ++a) out.c[a][i] = ik * f.c[a][i];
  }
  return out;
}

double hermitian_residual(const SpectralField& f) {
  const GridSpec& g = f.grid;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    K3 k = g.k_of(i);
    bool nyq = false;  // the unmatched plane has no mirror; it must be zero
    for (int a = 0; a < 3; ++a) nyq = nyq || (k[a] == g.n / 2);
    if (nyq) {
      for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(f.c[a][i]));
      continue;
    }
    std::size_t j = g.index_of(-k);
    for (int a = 0; a < 3; ++a)
      worst = std::max(worst, std::abs(f.c[a][i] - std::conj(f.c[a][j])));
  }
  return worst;
}

double hermitian_residual(const SparseField& f) {
  double worst = 0.0;
  for (auto& [k, v] : f.modes) {
    auto it = f.modes.find(-k);
    if (it == f.modes.end()) {
      for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(v[a]));
      continue;
    }
    for (int a = 0; a < 3; ++a)
      worst = std::max(worst, std::abs(v[a] - std::conj(it->second[a])));
  }
  return worst;
}

namespace {
struct DivScan {
  double maxdot = 0.0, maxamp = 0.0;
  void feed(K3 k, V3c v) {
    maxamp = std::max(maxamp, std::sqrt(abs2(v)));
    cplx kv = (double)k[0] * v[0] + (double)k[1] * v[1] + (double)k[2] * v[2];
    maxdot = std::max(maxdot, std::abs(kv));
  }
  double result() const { return maxdot / std::max(1.0, maxamp); }
};
}  // namespace

double divergence_residual(const SpectralField& f) {
  DivScan s;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    s.feed(f.grid.k_of(i), {f.c[0][i], f.c[1][i], f.c[2][i]});
  return s.result();
}

double divergence_residual(const SparseField& f) {
  DivScan s;
  for (auto& [k, v] : f.modes) s.feed(k, v);
  return s.result();
}

SpectralField densify(const SparseField& f, GridSpec g) {
  SpectralField out(g);
  for (auto& [k, v] : f.modes) {
    if (!g.in_band(k)) fail(Err::resolution, "mode outside the dealiased band of the target grid");
    out.set(k, v);
  }
  return out;
}

SparseField sparsify(const SpectralField& f, double tol) {
  SparseField out;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    V3c v{f.c[0][i], f.c[1][i], f.c[2][i]};
    if (std::abs(v[0]) > tol || std::abs(v[1]) > tol || std::abs(v[2]) > tol)
      out.modes.emplace(f.grid.k_of(i), v);
  }
  return out;
}

double spectral_energy(const SparseField& f) {
  double s = 0.0;
  for (auto& [k, v] : f.modes) {
    (void)k;
    s += abs2(v);
  }
  return s;
}

double spectral_energy(const SpectralField& f) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (auto& z : f.c[a]) s += std::norm(z);
  return s;
}

}  // namespace lab
