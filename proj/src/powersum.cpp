#include "lab/powersum.hpp"

#include <cmath>

#include "lab/errors.hpp"

namespace lab {

namespace {

// bfac[i] = B_{2i}/(2i)! = (-1)^{i+1} 2 zeta(2i)/(2pi)^{2i}; accurate to eps
// and free of the cancellation the raw recurrence suffers from.
const int kMaxHalfOrder = 64;

// zeta(s) for real s >= 2: partial sum to N-1 plus the Euler-Maclaurin tail.
// The tail only needs the first four Bernoulli numbers; with N = 20 the
// truncation error is ~4e-16 at s = 2 and smaller for larger s.
double zeta_em(double s) {
  const int N = 20;
  double z = 0.0;
  for (int n = N - 1; n >= 1; --n) z += std::pow((double)n, -s);
  double Ns = std::pow((double)N, -s);
  z += Ns * (double)N / (s - 1.0);  // integral of the tail
  z += 0.5 * Ns;
  static const double btail[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30};
  double rising = s, fact = 1.0, npow = Ns / (double)N;
  for (int k = 1; k <= 4; ++k) {
    fact *= (double)(2 * k - 1) * (double)(2 * k);
    z += btail[k - 1] / fact * rising * npow;
    rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    npow /= (double)(N * N);
  }
  return z;
}

const std::vector<double>& bernoulli_factorials() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kMaxHalfOrder + 1, 0.0);
    for (int i = 1; i <= kMaxHalfOrder; ++i) {
      double sign = (i % 2 == 1) ? 1.0 : -1.0;
      t[i] = sign * 2.0 * zeta_em(2.0 * i) * std::pow(2.0 * M_PI, -2.0 * i);
    }
    return t;
  }();
  return table;
}

double powi(double x, int p) {
  double r = 1.0, b = x;
  for (int e = p; e > 0; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

double falling(int p, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= (double)(p - i);
  return r;
}

}  // namespace

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r = a.size() >= b.size() ? a : b;
  const Poly& s = a.size() >= b.size() ? b : a;
  for (std::size_t i = 0; i < s.size(); ++i) r[i] += s[i];
  return r;
}

void poly_axpy(Poly& acc, double s, const Poly& a) {
  if (acc.size() < a.size()) acc.resize(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc[i] += s * a[i];
}

double poly_eval(const Poly& p, double x) {
  double r = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

double power_sum_affine(int p, double x1, double delta, long long K) {
  if (K < 0) return 0.0;
  if (p < 0 || p > 2 * kMaxHalfOrder)
    fail(Err::invalid_parameter, "power_sum_affine: degree out of range");
  if (p == 0) return (double)(K + 1);
  if (K <= 48) {
    double acc = 0.0;
    for (long long u = 0; u <= K; ++u) acc += powi(x1 + delta * (double)u, p);
    return acc;
  }
  double x2 = x1 + delta * (double)K;
  std::vector<double> X1(p + 1), X2(p + 1);
  X1[0] = X2[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    X1[j] = X1[j - 1] * x1;
    X2[j] = X2[j - 1] * x2;
  }
  // geo[j] = sum_{t=0}^{j} x2^t x1^{j-t}; then x2^{j+1}-x1^{j+1} = dK*geo[j]
  std::vector<double> geo(p + 1);
  geo[0] = 1.0;
  for (int j = 1; j <= p; ++j) geo[j] = x2 * geo[j - 1] + X1[j];

  const auto& bfac = bernoulli_factorials();
  double acc = (double)K * geo[p] / (double)(p + 1);  // integral term, delta cancelled
  acc += 0.5 * (X1[p] + X2[p]);
  double d2 = delta * delta, dpow = d2;  // delta^{2i}
  for (int i = 1; 2 * i <= p; ++i) {
    acc += bfac[i] * dpow * falling(p, 2 * i - 1) * (double)K * geo[p - 2 * i];
    dpow *= d2;
  }
  return acc;
}

PowerSumFamily::PowerSumFamily(Poly x1, Poly x2, Poly count, double delta, int max_p) {
  if (max_p < 0 || max_p > 2 * kMaxHalfOrder)
    fail(Err::invalid_parameter, "PowerSumFamily: degree out of range");
  p1_.resize(max_p + 1);
  p2_.resize(max_p + 1);
  geo_.resize(max_p + 1);
  sums_.resize(max_p + 1);
  p1_[0] = p2_[0] = geo_[0] = Poly{1.0};
  for (int j = 1; j <= max_p; ++j) {
    p1_[j] = poly_mul(p1_[j - 1], x1);
    p2_[j] = poly_mul(p2_[j - 1], x2);
    geo_[j] = poly_add(poly_mul(x2, geo_[j - 1]), p1_[j]);
  }
  const auto& bfac = bernoulli_factorials();
  sums_[0] = poly_add(count, Poly{1.0});  // K + 1 terms
  for (int p = 1; p <= max_p; ++p) {
    Poly s = poly_mul(count, geo_[p]);
    for (auto& v : s) v /= (double)(p + 1);
    poly_axpy(s, 0.5, p1_[p]);
    poly_axpy(s, 0.5, p2_[p]);
    double d2 = delta * delta, dpow = d2;
    for (int i = 1; 2 * i <= p; ++i) {
      double c = bfac[i] * dpow * falling(p, 2 * i - 1);
      poly_axpy(s, c, poly_mul(count, geo_[p - 2 * i]));
      dpow *= d2;
    }
    sums_[p] = std::move(s);
  }
}

}  // namespace lab
