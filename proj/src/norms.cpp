#include "lab/norms.hpp"

#include <cmath>

#include "lab/transform.hpp"

namespace lab {

double lp_norm(const PhysField& f, double p) {
  if (!(p >= 1.0)) fail(Err::invalid_parameter, "lp_norm: p must be >= 1 (or infinity)");
  std::size_t npts = f.v[0].size();
  if (std::isinf(p)) {
    double mx = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
      double m2 = f.v[0][i] * f.v[0][i] + f.v[1][i] * f.v[1][i] + f.v[2][i] * f.v[2][i];
      mx = std::max(mx, m2);
    }
    return std::sqrt(mx);
  }
  double cell = std::pow(2.0 * M_PI / f.m, 3);
  double acc = 0.0;
  for (std::size_t i = 0; i < npts; ++i) {
    double m2 = f.v[0][i] * f.v[0][i] + f.v[1][i] * f.v[1][i] + f.v[2][i] * f.v[2][i];
    acc += std::pow(m2, p / 2.0);
  }
  return std::pow(cell * acc, 1.0 / p);
}

double lp_norm(const SpectralField& f, double p, int oversample) {
  PhysField ph = to_physical(f, oversample);
  return lp_norm(ph, p);
}

double l2_norm(const SparseField& f) {
  return std::pow(2.0 * M_PI, 1.5) * std::sqrt(spectral_energy(f));
}

double l2_norm(const SpectralField& f) {
  return std::pow(2.0 * M_PI, 1.5) * std::sqrt(spectral_energy(f));
}

}  // namespace lab
