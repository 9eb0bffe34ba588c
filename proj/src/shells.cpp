#include "lab/shells.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lab/norms.hpp"
#include "lab/transform.hpp"

namespace lab {

namespace {
double bump_g(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
}  // namespace

double smooth_cutoff(double t) {
  if (t <= 0.75) return 1.0;
  if (t >= 1.0) return 0.0;
  double s = 4.0 * (1.0 - t);  // s in (0,1)
  double a = bump_g(s), b = bump_g(1.0 - s);
  return a / (a + b);
}

double shell_bump(double xi) { return smooth_cutoff(0.5 * xi) - smooth_cutoff(xi); }

double shell_weight(int q) {
  if (q < -1) fail(Err::bad_shell_index, "shell index must be >= -1");
  return q == -1 ? 0.5 : std::ldexp(1.0, q);
}

double shell_multiplier(int q, double absk) {
  if (q < -1) fail(Err::bad_shell_index, "shell index must be >= -1");
  if (q == -1) return smooth_cutoff(absk);
  return shell_bump(std::ldexp(absk, -q));
}

double tilde_multiplier(int q, double absk) {
  if (q < -1) fail(Err::bad_shell_index, "shell index must be >= -1");
  double m = 0.0;
  for (int p = q - 1; p <= q + 1; ++p)
    if (p >= -1) m += shell_multiplier(p, absk);
  return m;
}

int top_shell(const GridSpec& g) {
  double kmax = std::sqrt(3.0) * g.band_limit();
  int q = 0;
  while (std::ldexp(0.75, q + 1) <= kmax) ++q;
  return q;
}

namespace {

// Filter tables per (grid size, shell), indexed by |k|^2.  Cheap to build,
// but project_shell is called in inner loops of the Besov scans.
const std::vector<double>& shell_table(int n, int q) {
  static std::map<std::pair<int, int>, std::vector<double>> tables;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, q);
  auto it = tables.find(key);
  if (it != tables.end()) return it->second;
  long r2max = 3L * (n / 2) * (n / 2);
  std::vector<double> t(r2max + 1);
  for (long r2 = 0; r2 <= r2max; ++r2) t[r2] = shell_multiplier(q, std::sqrt((double)r2));
  return tables.emplace(key, std::move(t)).first->second;
}

SpectralField apply_radial(const SpectralField& f, const std::vector<double>& table) {
  SpectralField out(f.grid);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    long r2 = knorm2(f.grid.k_of(i));
    double w = table[r2];
    if (w == 0.0) continue;
    for (int a = 0; a < 3; ++a) out.c[a][i] = w * f.c[a][i];
  }
  return out;
}

}  // namespace

SpectralField project_shell(const SpectralField& f, int q) {
  return apply_radial(f, shell_table(f.grid.n, q));
}

SparseField project_shell(const SparseField& f, int q) {
  if (q < -1) fail(Err::bad_shell_index, "shell index must be >= -1");
  SparseField out;
  for (auto& [k, v] : f.modes) {
    double w = shell_multiplier(q, std::sqrt((double)knorm2(k)));
    if (w != 0.0) out.modes.emplace(k, w * V3c{v[0], v[1], v[2]});
  }
  return out;
}

SpectralField project_tilde(const SpectralField& f, int q) {
  if (q < -1) fail(Err::bad_shell_index, "shell index must be >= -1");
  SpectralField out(f.grid);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    double w = tilde_multiplier(q, std::sqrt((double)knorm2(f.grid.k_of(i))));
    if (w == 0.0) continue;
    for (int a = 0; a < 3; ++a) out.c[a][i] = w * f.c[a][i];
  }
  return out;
}

SparseField project_tilde(const SparseField& f, int q) {
  if (q < -1) fail(Err::bad_shell_index, "shell index must be >= -1");
  SparseField out;
  for (auto& [k, v] : f.modes) {
    double w = tilde_multiplier(q, std::sqrt((double)knorm2(k)));
    if (w != 0.0) out.modes.emplace(k, w * V3c{v[0], v[1], v[2]});
  }
  return out;
}

double besov_norm(const SpectralField& f, double s, double r, double l, int oversample) {
  if (!(r >= 1.0) || !(l >= 1.0))
    fail(Err::invalid_parameter, "besov_norm: integrability orders must be >= 1 (or infinity)");
  int qhi = top_shell(f.grid);
  double acc = 0.0, sup = 0.0;
  for (int q = -1; q <= qhi; ++q) {
    SpectralField fq = project_shell(f, q);
    if (spectral_energy(fq) == 0.0) continue;
    double term = std::pow(shell_weight(q), s) * lp_norm(fq, r, oversample);
    if (std::isinf(l))
      sup = std::max(sup, term);
    else
      acc += std::pow(term, l);
  }
  return std::isinf(l) ? sup : std::pow(acc, 1.0 / l);
}

double bernstein_ratio(const SpectralField& f, int q, double p, int oversample) {
  SpectralField fq = project_shell(f, q);
  if (spectral_energy(fq) == 0.0)
    fail(Err::insufficient_data, "bernstein_ratio: shell is empty");
  double base = lp_norm(fq, p, oversample);

  // Aggregate |grad f|^2 pointwise over all 9 derivative components without
  // holding more than one synthesized component at a time.
  int n = fq.grid.n, m = n * oversample;
  std::vector<double> grad2((std::size_t)m * m * m, 0.0);
  std::vector<cplx> spec(fq.grid.size());
  for (int a = 0; a < 3; ++a) {
    for (int comp = 0; comp < 3; ++comp) {
      for (std::size_t i = 0; i < fq.grid.size(); ++i) {
        K3 k = fq.grid.k_of(i);
        spec[i] = cplx{0.0, (double)k[a]} * fq.c[comp][i];
      }
      std::vector<double> d = synth_component(spec, n, m);
      for (std::size_t i = 0; i < grad2.size(); ++i) grad2[i] += d[i] * d[i];
    }
  }
  double gnorm;
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double g2 : grad2) mx = std::max(mx, g2);
    gnorm = std::sqrt(mx);
  } else {
    double cell = std::pow(2.0 * M_PI / m, 3), acc = 0.0;
    for (double g2 : grad2) acc += std::pow(g2, p / 2.0);
    gnorm = std::pow(cell * acc, 1.0 / p);
  }
  return gnorm / (shell_weight(q) * base);
}

}  // namespace lab
