#include "lab/construction.hpp"

#include <cmath>
#include <string>

#include "lab/errors.hpp"

namespace lab {

void validate_params(const ConstructionParams& p) {
  if (!(p.theta > 1.5) || !(p.theta <= 2.0))
    fail(Err::invalid_parameter, "theta must lie in (3/2, 2]");
  if (p.mhd) {
    if (!(p.gamma > 1.5)) fail(Err::invalid_parameter, "gamma must exceed 3/2");
    if (!(p.theta + p.gamma <= 4.0))
      fail(Err::invalid_parameter, "theta + gamma must not exceed 4");
  }
  if (!(p.c > 0.0) || !(p.c <= 0.125))
    fail(Err::invalid_parameter, "block half-width fraction c must lie in (0, 1/8]");
  if (p.q1 < 2) fail(Err::invalid_parameter, "first shell index q1 must be >= 2");
  if (p.stages < 1) fail(Err::invalid_parameter, "stage count J must be >= 1");
  if (p.budget < 0) fail(Err::invalid_parameter, "enumeration budget must be >= 0");
}

std::vector<int> lacunary_sequence(const ConstructionParams& p) {
  validate_params(p);
  // 2^{a*prev} <= 2^{b*cand}, compared on exponents with a relative guard so
  // exactly-attained bounds (e.g. theta=1.8, 2.2*3 = 0.6*11) round the
  // intended way despite decimal parameters being inexact in binary.
  auto holds = [](double a, int prev, double b, int cand) {
    double lhs = a * (double)prev, rhs = b * (double)cand;
    return lhs <= rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  };
  std::vector<int> q{p.q1};
  while ((int)q.size() < p.stages) {
    int prev = q.back();
    int cand = prev + 1;
    auto ok = [&](int qc) {
      if (!holds(4.0 - p.theta, prev, 2.0 * p.theta - 3.0, qc)) return false;
      if (!p.mhd) return true;
      return holds(4.0 - p.theta, prev, 2.0 * p.gamma - 3.0, qc) &&
             holds(4.0 - p.gamma, prev, p.theta + p.gamma - 3.0, qc);
    };
    while (!ok(cand)) {
      if (++cand > 1 << 20)
        fail(Err::construction, "lacunary growth condition never satisfied");
    }
    q.push_back(cand);
  }
  return q;
}

namespace {

// [a, b] ∩ Z as an inclusive integer interval
Iv clip_interval(double a, double b) {
  return Iv{(long long)std::ceil(a), (long long)std::floor(b)};
}

bool boxes_overlap(const Box3& a, const Box3& b) {
  for (int i = 0; i < 3; ++i)
    if (a.iv[i].hi < b.iv[i].lo || b.iv[i].hi < a.iv[i].lo) return false;
  return true;
}

void check_residence(const Box3& b, int q, const char* tag) {
  double lo, hi;
  box_norm2_range(b, lo, hi);
  double l2 = std::ldexp(1.0, 2 * q);  // (2^q)^2
  if (!(lo >= l2) || !(hi <= 2.25 * l2))
    fail(Err::construction, std::string("block ") + tag +
                                " leaves the plateau of shell " + std::to_string(q) +
                                " (shrink c or raise q1)");
}

}  // namespace

StageBlocks build_blocks(int stage, int q, double c) {
  if (q < 1) fail(Err::invalid_parameter, "build_blocks: shell index must be >= 1");
  if (!(c > 0.0) || !(c < 0.5))
    fail(Err::invalid_parameter, "build_blocks: c must lie in (0, 1/2)");
  double l = std::ldexp(1.0, q), h = std::ldexp(1.0, q - 1);

  StageBlocks sb;
  sb.stage = stage;
  sb.q = q;
  sb.L = Box3{{clip_interval(l, (1.0 + c) * l), clip_interval(-c * l, c * l),
               clip_interval(-c * l, c * l)}};
  sb.M = Box3{{clip_interval(-c * h, c * h), clip_interval(-c * h, c * h),
               clip_interval(h, (1.0 + c) * h)}};
  for (int i = 0; i < 3; ++i) {
    if (sb.L.iv[i].empty())
      fail(Err::construction, "shell too low: block L is empty (raise q1 or c)");
    if (sb.M.iv[i].empty())
      fail(Err::construction, "shell too low: block M is empty (raise q1 or c)");
  }
  // Minkowski sum of the two integer boxes: per-axis interval sums cover
  // every integer in between, so the sum is again a box, exactly.
  for (int i = 0; i < 3; ++i)
    sb.N.iv[i] = Iv{sb.L.iv[i].lo + sb.M.iv[i].lo, sb.L.iv[i].hi + sb.M.iv[i].hi};

  check_residence(sb.L, q, "L");
  check_residence(sb.M, q - 1, "M");
  check_residence(sb.N, q, "N");

  // The packets of one stage must be disjoint in wavenumber, stars included.
  const Box3 boxes[6] = {sb.L, sb.L.negate(), sb.M, sb.M.negate(), sb.N, sb.N.negate()};
  const char* tags[6] = {"L", "L*", "M", "M*", "N", "N*"};
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (boxes_overlap(boxes[i], boxes[j]))
        fail(Err::construction, std::string("blocks ") + tags[i] + " and " + tags[j] +
                                    " overlap at shell " + std::to_string(q));
  return sb;
}

std::vector<PsiBlock> psi1_blocks(const StageBlocks& sb) {
  const cplx one(1.0, 0.0), i_(0.0, 1.0);
  return {
      PsiBlock{sb.L, SymbolKind::e2, one, sb.q, sb.stage, "L"},
      PsiBlock{sb.L.negate(), SymbolKind::e2, one, sb.q, sb.stage, "L*"},
      PsiBlock{sb.N, SymbolKind::e2_minus_e1, i_, sb.q, sb.stage, "N"},
      PsiBlock{sb.N.negate(), SymbolKind::e2_minus_e1, -i_, sb.q, sb.stage, "N*"},
  };
}

std::vector<PsiBlock> psi2_blocks(const StageBlocks& sb) {
  const cplx one(1.0, 0.0);
  return {
      PsiBlock{sb.M, SymbolKind::e1, one, sb.q - 1, sb.stage, "M"},
      PsiBlock{sb.M.negate(), SymbolKind::e1, one, sb.q - 1, sb.stage, "M*"},
  };
}

SparseField materialize(const std::vector<PsiBlock>& blocks, long long budget) {
  double total = 0.0;
  for (const auto& b : blocks) total += b.box.count_d();
  if (total > (double)budget)
    fail(Err::budget_exceeded, "materialize: blocks hold " + std::to_string(total) +
                                   " modes, budget is " + std::to_string(budget));
  SparseField f;
  for (const auto& b : blocks) {
    for (int i = 0; i < 3; ++i)
      if (std::llabs(b.box.iv[i].lo) > (1ll << 30) || std::llabs(b.box.iv[i].hi) > (1ll << 30))
        fail(Err::budget_exceeded, "materialize: block extends beyond enumerable wavenumbers");
    for (long long k0 = b.box.iv[0].lo; k0 <= b.box.iv[0].hi; ++k0)
      for (long long k1 = b.box.iv[1].lo; k1 <= b.box.iv[1].hi; ++k1)
        for (long long k2 = b.box.iv[2].lo; k2 <= b.box.iv[2].hi; ++k2) {
          K3 k{(int)k0, (int)k1, (int)k2};
          V3d s = symbol_value(b.kind, k);
          f.add(k, V3c{b.coef * s[0], b.coef * s[1], b.coef * s[2]});
        }
  }
  return f;
}

std::vector<PsiBlock> InitialData::u_piece_high(int j) const {
  std::vector<PsiBlock> r;
  for (const auto& b : u_blocks)
    if (b.stage == j && b.shell == q[j]) r.push_back(b);
  return r;
}

std::vector<PsiBlock> InitialData::u_piece_low(int j) const {
  std::vector<PsiBlock> r;
  for (const auto& b : u_blocks)
    if (b.stage == j && b.shell == q[j] - 1) r.push_back(b);
  return r;
}

std::vector<PsiBlock> InitialData::b_piece(int j) const {
  std::vector<PsiBlock> r;
  for (const auto& b : b_blocks)
    if (b.stage == j) r.push_back(b);
  return r;
}

InitialData build_initial_data(const ConstructionParams& p) {
  validate_params(p);
  InitialData d;
  d.params = p;
  d.q = lacunary_sequence(p);

  for (int j = 0; j < p.stages; ++j) {
    StageBlocks sb = build_blocks(j, d.q[j], p.c);
    double wu = std::exp2(-p.theta * (double)d.q[j]);
    for (PsiBlock b : psi1_blocks(sb)) {
      b.coef *= wu;
      d.u_blocks.push_back(b);
    }
    for (PsiBlock b : psi2_blocks(sb)) {
      if (p.mhd) {
        PsiBlock mb = b;
        mb.coef *= std::exp2(-p.gamma * (double)d.q[j]);
        d.b_blocks.push_back(mb);
        if (!p.mhd_velocity_includes_psi2) continue;
      }
      b.coef *= wu;
      d.u_blocks.push_back(b);
    }
  }

  // cross-stage disjointness (within a stage build_blocks already checked)
  auto check_disjoint = [](const std::vector<PsiBlock>& v, const char* which) {
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        if (v[i].stage != v[j].stage && boxes_overlap(v[i].box, v[j].box))
          fail(Err::construction, std::string("overlapping packets across stages in ") + which);
  };
  check_disjoint(d.u_blocks, "u0");
  check_disjoint(d.b_blocks, "b0");

  // materialize stages in order while they fit the budget
  d.stage_materialized.assign(p.stages, 0);
  double used = 0.0;
  long long expect_u = 0, expect_b = 0;
  std::vector<PsiBlock> mat_u, mat_b;
  for (int j = 0; j < p.stages; ++j) {
    double cnt = 0.0;
    std::vector<PsiBlock> su, sbk;
    for (const auto& b : d.u_blocks)
      if (b.stage == j) {
        cnt += b.box.count_d();
        su.push_back(b);
      }
    for (const auto& b : d.b_blocks)
      if (b.stage == j) {
        cnt += b.box.count_d();
        sbk.push_back(b);
      }
    if (used + cnt > (double)p.budget) break;
    used += cnt;
    d.stage_materialized[j] = 1;
    for (const auto& b : su) expect_u += (long long)b.box.count_d();
    for (const auto& b : sbk) expect_b += (long long)b.box.count_d();
    mat_u.insert(mat_u.end(), su.begin(), su.end());
    mat_b.insert(mat_b.end(), sbk.begin(), sbk.end());
  }
  d.u0 = materialize(mat_u, p.budget);
  d.b0 = materialize(mat_b, p.budget);

  // verify the cheap invariants on the materialized part before returning
  if ((long long)d.u0.support_size() != expect_u || (long long)d.b0.support_size() != expect_b)
    fail(Err::construction, "materialized mode count disagrees with block sizes");
  if (hermitian_residual(d.u0) != 0.0 || hermitian_residual(d.b0) != 0.0)
    fail(Err::construction, "materialized data is not exactly Hermitian");
  if (divergence_residual(d.u0) > 1e-12 || divergence_residual(d.b0) > 1e-12)
    fail(Err::construction, "materialized data is not solenoidal");
  return d;
}

}  // namespace lab
