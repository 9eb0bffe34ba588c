#pragma once
#include <random>

#include "lab/field.hpp"

// Deterministic random fields for property tests.  Seeded mt19937_64 so
// every run sees identical data.
namespace labtest {

using namespace lab;

// Hermitian-symmetric field with modes in |k_i| <= kmax.
inline SpectralField random_real_field(GridSpec g, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(g);
  for (int k0 = -kmax; k0 <= kmax; ++k0)
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        K3 k{k0, k1, k2};
        // visit each +/- pair once: first nonzero component positive
        int lead = k0 != 0 ? k0 : (k1 != 0 ? k1 : k2);
        if (lead <= 0) continue;
        V3c v{cplx{gauss(rng), gauss(rng)}, cplx{gauss(rng), gauss(rng)},
              cplx{gauss(rng), gauss(rng)}};
        f.set_real_pair(k, v);
      }
  f.set({0, 0, 0}, V3c{cplx{gauss(rng), 0.0}, cplx{gauss(rng), 0.0}, cplx{gauss(rng), 0.0}});
  return f;
}

inline SpectralField random_solenoidal_field(GridSpec g, std::uint64_t seed, int kmax) {
  SpectralField f = random_real_field(g, seed, kmax);
  project_leray(f);
  return f;
}

}  // namespace labtest
