#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lab/boxmoments.hpp"
#include "lab/errors.hpp"
#include "lab/powersum.hpp"

using namespace lab;

namespace {

double powi(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// brute-force hexagon moment
double brute_hex(Iv A, Iv B, Iv C, int pa, int pb, int pc) {
  double acc = 0.0;
  for (long long k = A.lo; k <= A.hi; ++k)
    for (long long m = B.lo; m <= B.hi; ++m) {
      long long n = -k - m;
      if (!C.contains(n)) continue;
      acc += powi(scaled_coord(A, k), pa) * powi(scaled_coord(B, m), pb) *
             powi(scaled_coord(C, n), pc);
    }
  return acc;
}

void check_hex_against_brute(Iv A, Iv B, Iv C, int maxdeg, double tol) {
  HexMoments hm(A, B, C);
  for (int pa = 0; pa <= maxdeg; ++pa)
    for (int pb = 0; pb <= maxdeg; ++pb)
      for (int pc = 0; pc <= maxdeg; ++pc) {
        double want = brute_hex(A, B, C, pa, pb, pc);
        double got = hm.get(pa, pb, pc);
        double scale = std::max(1.0, std::abs(want));
        INFO("A=[", A.lo, ",", A.hi, "] B=[", B.lo, ",", B.hi, "] C=[", C.lo, ",", C.hi,
             "] p=(", pa, ",", pb, ",", pc, ")");
        CHECK(std::abs(got - want) <= tol * scale);
      }
}

}  // namespace

TEST_CASE("power_sum_affine matches direct summation") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    double x1 = U(rng);
    long long K = 100 + (rng() % 100000);
    double delta = std::abs(U(rng)) / (double)K * 2.0;  // span O(1)
    for (int p : {1, 2, 3, 5, 8, 13}) {
      double direct = 0.0, comp = 0.0;  // Kahan
      for (long long u = 0; u <= K; ++u) {
        double x = x1 + delta * (double)u, t = 1.0;
        for (int i = 0; i < p; ++i) t *= x;
        double y = t - comp, s = direct + y;
        comp = (s - direct) - y;
        direct = s;
      }
      double em = power_sum_affine(p, x1, delta, K);
      CHECK(std::abs(em - direct) <= 1e-11 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("power_sum_affine survives a narrow span at large offset") {
  // x2 - x1 = 1e-4 while |x1| = 1: the naive closed form would cancel badly
  long long K = 100000;
  double x1 = 1.0, delta = 1e-9;
  double direct = 0.0;
  for (long long u = 0; u <= K; ++u) {
    double x = x1 + delta * (double)u;
    direct += x * x * x * x * x * x * x;  // p = 7
  }
  CHECK(power_sum_affine(7, x1, delta, K) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("interval power sums, including degenerate intervals") {
  for (auto I : {Iv{3, 3}, Iv{-2, 5}, Iv{10, 30}, Iv{-7, -7}}) {
    for (int p = 0; p <= 9; ++p) {
      double direct = 0.0;
      for (long long v = I.lo; v <= I.hi; ++v) direct += powi(scaled_coord(I, v), p);
      CHECK(interval_power_sum(I, p) == doctest::Approx(direct).epsilon(1e-13));
    }
  }
  CHECK(interval_power_sum(Iv{2, 1}, 0) == 0.0);  // empty
}

TEST_CASE("hexagon moments: small boxes vs brute force (numeric path)") {
  check_hex_against_brute({16, 18}, {-2, 2}, {-19, -15}, 5, 1e-12);
  check_hex_against_brute({-3, 3}, {-3, 3}, {-3, 3}, 5, 1e-12);
  check_hex_against_brute({4, 5}, {4, 5}, {-10, -8}, 6, 1e-12);
  // degenerate boxes in each role
  check_hex_against_brute({7, 7}, {-9, -2}, {-4, 1}, 4, 1e-12);
  check_hex_against_brute({-6, 4}, {3, 3}, {-5, 0}, 4, 1e-12);
  check_hex_against_brute({1, 2}, {3, 4}, {-6, -6}, 4, 1e-12);
  check_hex_against_brute({0, 0}, {5, 5}, {-5, -5}, 4, 1e-12);
  // infeasible: intervals cannot sum to zero
  check_hex_against_brute({10, 12}, {1, 2}, {3, 7}, 3, 1e-15);
}

TEST_CASE("hexagon moments: wide boxes exercise the polynomial path") {
  // counts > 64 on the outer axis force the closed-form route
  check_hex_against_brute({-40, 160}, {-150, 150}, {-260, 240}, 6, 1e-10);
  check_hex_against_brute({100, 300}, {-150, 150}, {-460, -100}, 6, 1e-10);
  // clipped pieces on both sides
  check_hex_against_brute({-100, 100}, {-120, 120}, {-130, 130}, 5, 1e-10);
  // mixed widths: thin + wide (role assignment exercised)
  check_hex_against_brute({5, 7}, {-300, 300}, {-307, -5}, 6, 1e-10);
}

TEST_CASE("box norm2 polynomial and range") {
  Box3 b{{Iv{16, 18}, Iv{-2, 2}, Iv{-1, 3}}};
  TriPoly p2 = box_norm2_poly(b);
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    long long k0 = 16 + (long long)(rng() % 3);
    long long k1 = -2 + (long long)(rng() % 5);
    long long k2 = -1 + (long long)(rng() % 5);
    double want = (double)(k0 * k0 + k1 * k1 + k2 * k2);
    double got = tri_eval(p2, scaled_coord(b.iv[0], k0), scaled_coord(b.iv[1], k1),
                          scaled_coord(b.iv[2], k2));
    CHECK(got == doctest::Approx(want).epsilon(1e-13));
  }
  double lo, hi;
  box_norm2_range(b, lo, hi);
  CHECK(lo == doctest::Approx(256.0));     // 16^2 + 0 + 0
  CHECK(hi == doctest::Approx(337.0));     // 18^2 + 4 + 9
}

TEST_CASE("reciprocal |k|^-2 expansion is accurate on the lattice") {
  for (auto b : {Box3{{Iv{16, 18}, Iv{-2, 2}, Iv{-2, 2}}},
                 Box3{{Iv{14, 21}, Iv{-3, 3}, Iv{6, 12}}},
                 Box3{{Iv{-1, 1}, Iv{-1, 1}, Iv{8, 9}}},
                 Box3{{Iv{0, 0}, Iv{0, 0}, Iv{4, 4}}}}) {
    TriPoly r = box_recip_norm2(b);
    for (long long k0 = b.iv[0].lo; k0 <= b.iv[0].hi; ++k0)
      for (long long k1 = b.iv[1].lo; k1 <= b.iv[1].hi; ++k1)
        for (long long k2 = b.iv[2].lo; k2 <= b.iv[2].hi; ++k2) {
          double want = 1.0 / (double)(k0 * k0 + k1 * k1 + k2 * k2);
          double got = tri_eval(r, scaled_coord(b.iv[0], k0), scaled_coord(b.iv[1], k1),
                                scaled_coord(b.iv[2], k2));
          CHECK(std::abs(got - want) <= 1e-9 * want);
        }
  }
  Box3 zero{{Iv{-1, 1}, Iv{0, 0}, Iv{0, 0}}};
  CHECK_THROWS_AS(box_recip_norm2(zero), lab::Error);
}

TEST_CASE("box_poly_sum matches brute lattice sums") {
  Box3 b{{Iv{4, 9}, Iv{-5, 2}, Iv{-3, 3}}};
  TriPoly p{TriTerm{{0, 0, 0}, 2.0}, TriTerm{{1, 2, 0}, -1.5}, TriTerm{{3, 1, 2}, 0.25}};
  double want = 0.0;
  for (long long k0 = b.iv[0].lo; k0 <= b.iv[0].hi; ++k0)
    for (long long k1 = b.iv[1].lo; k1 <= b.iv[1].hi; ++k1)
      for (long long k2 = b.iv[2].lo; k2 <= b.iv[2].hi; ++k2)
        want += tri_eval(p, scaled_coord(b.iv[0], k0), scaled_coord(b.iv[1], k1),
                         scaled_coord(b.iv[2], k2));
  CHECK(box_poly_sum(b, p) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("tri_mul combines and prunes consistently") {
  TriPoly a{TriTerm{{1, 0, 0}, 2.0}, TriTerm{{0, 1, 0}, 3.0}};
  TriPoly b{TriTerm{{1, 0, 0}, 1.0}, TriTerm{{0, 0, 1}, -1.0}};
  TriPoly prod = tri_mul(a, b);
  // (2x + 3y)(x - z) = 2x^2 + 3xy - 2xz - 3yz
  CHECK(prod.size() == 4);
  double v = tri_eval(prod, 0.3, -0.7, 0.9);
  double want = (2 * 0.3 + 3 * -0.7) * (0.3 - 0.9);
  CHECK(v == doctest::Approx(want).epsilon(1e-14));
}
