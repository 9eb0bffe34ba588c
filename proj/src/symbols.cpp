#include "lab/symbols.hpp"

#include "lab/errors.hpp"

namespace lab {

const char* symbol_name(SymbolKind k) {
  switch (k) {
    case SymbolKind::e1: return "e1";
    case SymbolKind::e2: return "e2";
    case SymbolKind::e2_minus_e1: return "e2-e1";
  }
  return "?";
}

namespace {

V3d project_basis(const K3& k, int axis) {
  double n2 = (double)knorm2(k);
  V3d r{0.0, 0.0, 0.0};
  r[axis] = 1.0;
  for (int i = 0; i < 3; ++i) r[i] -= (double)k[i] * (double)k[axis] / n2;
  return r;
}

}  // namespace

V3d symbol_value(SymbolKind kind, const K3& k) {
  if (knorm2(k) == 0) fail(Err::invalid_parameter, "symbol_value: zero mode");
  switch (kind) {
    case SymbolKind::e1: return project_basis(k, 0);
    case SymbolKind::e2: return project_basis(k, 1);
    case SymbolKind::e2_minus_e1: {
      V3d a = project_basis(k, 1), b = project_basis(k, 0);
      return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    }
  }
  fail(Err::invalid_parameter, "symbol_value: unknown kind");
}

TriPoly coord_poly(const Box3& b, int axis) {
  if (axis < 0 || axis > 2) fail(Err::axis_range, "coord_poly: axis outside {0,1,2}");
  const Iv& I = b.iv[axis];
  TriPoly p;
  if (I.center() != 0.0) p.push_back(TriTerm{{0, 0, 0}, I.center()});
  if (I.half() != 0.0) {
    TriTerm t{{0, 0, 0}, I.half()};
    t.d[axis] = 1;
    p.push_back(t);
  }
  return p;
}

namespace {

TriPoly projected_basis_poly(const Box3& b, int axis, int comp, double tol) {
  TriPoly recip = box_recip_norm2(b, tol);
  TriPoly prod = tri_mul(tri_mul(coord_poly(b, comp), coord_poly(b, axis)), recip);
  for (auto& t : prod) t.c = -t.c;
  if (comp == axis) tri_add_inplace(prod, TriPoly{TriTerm{{0, 0, 0}, 1.0}});
  return prod;
}

}  // namespace

TriPoly symbol_component_poly(const Box3& b, SymbolKind kind, int comp, double tol) {
  if (comp < 0 || comp > 2) fail(Err::axis_range, "symbol_component_poly: bad component");
  switch (kind) {
    case SymbolKind::e1: return projected_basis_poly(b, 0, comp, tol);
    case SymbolKind::e2: return projected_basis_poly(b, 1, comp, tol);
    case SymbolKind::e2_minus_e1: {
      TriPoly a = projected_basis_poly(b, 1, comp, tol);
      TriPoly neg = projected_basis_poly(b, 0, comp, tol);
      for (auto& t : neg) t.c = -t.c;
      tri_add_inplace(a, neg);
      return a;
    }
  }
  fail(Err::invalid_parameter, "symbol_component_poly: unknown kind");
}

}  // namespace lab
