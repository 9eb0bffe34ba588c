#pragma once
#include <complex>
#include <map>
#include <vector>

#include "lab/grid.hpp"

namespace lab {

using cplx = std::complex<double>;
using V3c = std::array<cplx, 3>;
using V3d = std::array<double, 3>;

inline V3c operator+(V3c a, V3c b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline V3c operator*(cplx s, V3c v) { return {s * v[0], s * v[1], s * v[2]}; }
inline cplx dot(V3c a, V3c b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }  // unconjugated
inline double abs2(V3c v) { return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]); }

// Dense vector field in spectral representation, component-major.
struct SpectralField {
  GridSpec grid;
  std::array<std::vector<cplx>, 3> c;

  SpectralField() = default;
  explicit SpectralField(GridSpec g) : grid(g) {
    for (auto& comp : c) comp.assign(grid.size(), cplx{0.0, 0.0});
  }

  V3c at(K3 k) const {
    std::size_t i = grid.index_of(k);
    return {c[0][i], c[1][i], c[2][i]};
  }
  void set(K3 k, V3c v) {
    std::size_t i = grid.index_of(k);
    for (int a = 0; a < 3; ++a) c[a][i] = v[a];
  }
  void add(K3 k, V3c v) {
    std::size_t i = grid.index_of(k);
    for (int a = 0; a < 3; ++a) c[a][i] += v[a];
  }
  // Set k and its mirror so the pair synthesizes to a real contribution.
  void set_real_pair(K3 k, V3c v) {
    set(k, v);
    set(-k, {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])});
  }

  SpectralField& operator*=(double s) {
    for (auto& comp : c)
      for (auto& z : comp) z *= s;
    return *this;
  }
  void axpy(cplx a, const SpectralField& x) {
    if (!(grid == x.grid)) fail(Err::shape_mismatch, "axpy: grids differ");
    for (int comp = 0; comp < 3; ++comp)
      for (std::size_t i = 0; i < c[comp].size(); ++i) c[comp][i] += a * x.c[comp][i];
  }
};

// Sparse spectral field: only the excited modes.  Ordered map keeps every
// iteration (sums, serialization) deterministic.
struct SparseField {
  std::map<K3, V3c> modes;

  void add(K3 k, V3c v) {
    auto& m = modes[k];
    for (int a = 0; a < 3; ++a) m[a] += v[a];
  }
  // k and its conjugate mirror together
  void add_real_pair(K3 k, V3c v) {
    add(k, v);
    add(-k, {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])});
  }
  std::size_t support_size() const { return modes.size(); }
  int max_abs_component() const {
    int m = 0;
    for (auto& [k, v] : modes) {
      (void)v;
      for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(k[a]));
    }
    return m;
  }
};

// Real-space samples on an m^3 grid over [0,2pi)^3, component-major.
struct PhysField {
  int m = 0;
  std::array<std::vector<double>, 3> v;
  double dx() const;
};

// --- basic spectral operators -------------------------------------------

// Orthogonal projector onto divergence-free fields: p(k) = I - k k^T/|k|^2,
// identity at k = 0.
using Mat3 = std::array<std::array<double, 3>, 3>;
Mat3 leray_matrix(K3 k);
V3c leray_apply(K3 k, V3c v);
void project_leray(SpectralField& f);
void project_leray(SparseField& f);

// d/dx_axis, i.e. multiplication by i*k_axis
SpectralField derivative(const SpectralField& f, int axis);

// max_k |f(k) - conj(f(-k))| over components; zero iff synthesis is real
double hermitian_residual(const SpectralField& f);
double hermitian_residual(const SparseField& f);

// max_k |k . f(k)| / max(1, max_k |f(k)|)
double divergence_residual(const SpectralField& f);
double divergence_residual(const SparseField& f);

// dense <-> sparse
SpectralField densify(const SparseField& f, GridSpec g);  // fails if out of band
SparseField sparsify(const SpectralField& f, double tol = 0.0);

// sum over modes of |f(k)|^2 (all components); Parseval: ||f||_2^2 = (2pi)^3 * this
double spectral_energy(const SparseField& f);
double spectral_energy(const SpectralField& f);

}  // namespace lab
