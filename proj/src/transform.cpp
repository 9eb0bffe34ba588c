#include "lab/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace lab {

namespace {

struct PlanCache {
  std::map<std::pair<int, int>, fftw_plan> plans;
  std::mutex mu;

  fftw_plan get(int m, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(m, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // Plan once on a scratch buffer; UNALIGNED lets us execute on any array.
    std::vector<cplx> scratch((std::size_t)m * m * m);
    fftw_plan p = fftw_plan_dft_3d(
        m, m, m, reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()),
        sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) fail(Err::io_failure, "fftw plan creation failed");
    plans[key] = p;
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft3(std::vector<cplx>& buf, int m, int sign) {
  if ((std::size_t)m * m * m != buf.size())
    fail(Err::shape_mismatch, "fft3: buffer size does not match m^3");
  fftw_plan p = cache().get(m, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()),
                   reinterpret_cast<fftw_complex*>(buf.data()));
  if (sign < 0) {
    double inv = 1.0 / ((double)m * m * m);
    for (auto& z : buf) z *= inv;
  }
}

std::vector<cplx> embed_spectrum(const std::vector<cplx>& spec, int n, int m) {
  if (m == n) return spec;
  if (m < n || m % 2) fail(Err::invalid_parameter, "oversampled size must be even and >= n");
  GridSpec gn(n), gm(m);
  std::vector<cplx> out(gm.size(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < gn.size(); ++i) {
    if (spec[i] == cplx{0.0, 0.0}) continue;
    K3 k = gn.k_of(i);
    if (k[0] == n / 2 || k[1] == n / 2 || k[2] == n / 2) continue;
    out[gm.index_of(k)] = spec[i];
  }
  return out;
}

std::vector<double> synth_component(const std::vector<cplx>& spec, int n, int m,
                                    double* imag_max) {
  std::vector<cplx> buf = embed_spectrum(spec, n, m);
  fft3(buf, m, +1);
  std::vector<double> out(buf.size());
  double im = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out[i] = buf[i].real();
    im = std::max(im, std::abs(buf[i].imag()));
  }
  if (imag_max) *imag_max = im;
  return out;
}

PhysField to_physical(const SpectralField& f, int oversample, double* imag_max) {
  if (oversample < 1) fail(Err::invalid_parameter, "oversample factor must be >= 1");
  double amp = 0.0;
  for (int a = 0; a < 3; ++a)
    for (auto& z : f.c[a]) amp = std::max(amp, std::abs(z));
  if (hermitian_residual(f) > 1e-10 * std::max(amp, 1e-300))
    fail(Err::symmetry_violation, "to_physical: field is not Hermitian-symmetric");
  int n = f.grid.n, m = n * oversample;
  PhysField out;
  out.m = m;
  double im = 0.0;
  for (int a = 0; a < 3; ++a) {
    double im_a = 0.0;
    out.v[a] = synth_component(f.c[a], n, m, &im_a);
    im = std::max(im, im_a);
  }
  if (imag_max) *imag_max = im;
  return out;
}

SpectralField to_spectral(const PhysField& samples, GridSpec g) {
  int m = samples.m, n = g.n;
  if (m < n || m % n != 0)
    fail(Err::shape_mismatch, "to_spectral: sample grid must be a multiple of the target grid");
  GridSpec gm(m);
  SpectralField out(g);
  std::vector<cplx> buf(gm.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = cplx{samples.v[a][i], 0.0};
    fft3(buf, m, -1);
    // keep only the band of g; the unmatched plane stays zero
    for (std::size_t i = 0; i < g.size(); ++i) {
      K3 k = g.k_of(i);
      if (k[0] == n / 2 || k[1] == n / 2 || k[2] == n / 2) continue;
      out.c[a][i] = buf[gm.index_of(k)];
    }
  }
  return out;
}

}  // namespace lab
