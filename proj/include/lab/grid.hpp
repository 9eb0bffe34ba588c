#pragma once
#include <array>
#include <cstddef>
#include <cstdint>

#include "lab/errors.hpp"

namespace lab {

using K3 = std::array<int, 3>;  // integer wavevector

inline K3 operator+(K3 a, K3 b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline K3 operator-(K3 a) { return {-a[0], -a[1], -a[2]}; }
inline long knorm2(K3 k) {
  return (long)k[0] * k[0] + (long)k[1] * k[1] + (long)k[2] * k[2];
}

// Periodic grid on [0,2pi)^3 with n samples per axis, n even.  Spectral
// storage follows the usual DFT layout: index i along an axis holds
// wavenumber i for i <= n/2 and i-n otherwise.  The single unmatched plane
// k = n/2 (its negative is absent) is kept identically zero so that real
// fields stay exactly Hermitian.
struct GridSpec {
  int n = 0;

  GridSpec() = default;
  explicit GridSpec(int n_) : n(n_) {
    if (n < 4 || n % 2 != 0) fail(Err::invalid_parameter, "grid size must be even and >= 4");
  }

  std::size_t size() const { return (std::size_t)n * n * n; }

  // largest usable wavenumber magnitude per axis (Nyquist excluded)
  int band_limit() const { return n / 2 - 1; }

  bool in_band(K3 k) const {
    for (int a = 0; a < 3; ++a)
      if (k[a] < -n / 2 + 1 || k[a] > n / 2 - 1) return false;
    return true;
  }

  int wrap(int k) const {  // wavenumber -> storage index
    int i = k % n;
    return i < 0 ? i + n : i;
  }

  std::size_t index_of(K3 k) const {
    return ((std::size_t)wrap(k[0]) * n + wrap(k[1])) * n + wrap(k[2]);
  }

  K3 k_of(std::size_t idx) const {
    int i2 = (int)(idx % n);
    int i1 = (int)((idx / n) % n);
    int i0 = (int)(idx / ((std::size_t)n * n));
    auto unw = [this](int i) { return i <= n / 2 ? i : i - n; };
    return {unw(i0), unw(i1), unw(i2)};
  }

  bool operator==(const GridSpec& o) const { return n == o.n; }
};

}  // namespace lab
