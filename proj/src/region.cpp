#include "lab/region.hpp"

#include <cmath>
#include <sstream>

#include "lab/errors.hpp"

namespace lab {
namespace {

// First failing condition of the low-regularity branch (empty = branch holds).
std::string nse_branch1_reason(double theta, double ir) {
  const double a = theta + 3.0 * ir;
  if (!(a >= 2.0)) return "theta + 3/r below 2";
  if (!(a < 3.0)) return "theta + 3/r at least 3";
  return {};
}

std::string nse_branch2_reason(double r, double theta, double ir, const RegionOptions& opt) {
  const double a = theta + 3.0 * ir;
  const double b = 2.0 * theta + 3.0 * ir;
  if (!(r >= 1.5)) return "r below 3/2";
  if (!(a >= 3.0)) return "theta + 3/r below 3";
  if (!(a < 4.0)) return "theta + 3/r at least 4";
  const bool cap_ok = opt.strict_half_integer_bound ? (b < 5.5) : (b <= 5.5);
  if (!cap_ok) return "2*theta + 3/r above 11/2";
  return {};
}

std::string mhd_branch1_reason(double theta, double gamma, double ir) {
  const double a = theta + 3.0 * ir;
  if (!(gamma <= 2.5)) return "gamma above 5/2";
  if (!(a >= 2.0)) return "theta + 3/r below 2";
  if (!(a < 3.0)) return "theta + 3/r at least 3";
  if (!(gamma + 3.0 * ir < 4.0)) return "gamma + 3/r at least 4";
  return {};
}

std::string mhd_branch2_reason(double r, double theta, double gamma, double ir,
                               const RegionOptions& opt) {
  const double a = theta + 3.0 * ir;
  const double t = theta + gamma + 3.0 * ir;
  if (!(r >= 1.5)) return "r below 3/2";
  if (!(a >= 3.0)) return "theta + 3/r below 3";
  if (!(gamma + 3.0 * ir < 4.0)) return "gamma + 3/r at least 4";
  const bool cap_ok = opt.strict_half_integer_bound ? (t < 5.5) : (t <= 5.5);
  if (!cap_ok) return "theta + gamma + 3/r above 11/2";
  return {};
}

RegionVerdict reject(std::string reason) {
  RegionVerdict v;
  v.reason = std::move(reason);
  return v;
}

RegionVerdict accept(int branch) {
  RegionVerdict v;
  v.admissible = true;
  v.branch = branch;
  return v;
}

}  // namespace

double RegionQuery::inv_r() const {
  if (std::isinf(r)) return 0.0;
  return 1.0 / r;
}

RegionVerdict nse_admissible(const RegionQuery& q, const RegionOptions& opt) {
  if (!(q.r > 1.0)) return reject("r must exceed 1");
  if (!(q.theta > 1.5)) return reject("theta must exceed 3/2");
  if (!(q.theta <= 2.0)) return reject("theta must not exceed 2");
  const double ir = q.inv_r();
  const std::string b1 = nse_branch1_reason(q.theta, ir);
  if (b1.empty()) return accept(1);
  const std::string b2 = nse_branch2_reason(q.r, q.theta, ir, opt);
  if (b2.empty()) return accept(2);
  return reject("branch1: " + b1 + "; branch2: " + b2);
}

RegionVerdict mhd_admissible(const RegionQuery& q, const RegionOptions& opt) {
  if (!(q.r > 1.0)) return reject("r must exceed 1");
  if (!(q.theta > 1.5)) return reject("theta must exceed 3/2");
  if (!(q.theta <= 2.0)) return reject("theta must not exceed 2");
  if (!(q.gamma > 1.5)) return reject("gamma must exceed 3/2");
  if (!(q.theta + q.gamma <= 4.0)) return reject("theta + gamma must not exceed 4");
  const double ir = q.inv_r();
  const std::string b1 = mhd_branch1_reason(q.theta, q.gamma, ir);
  if (b1.empty()) return accept(1);
  const std::string b2 = mhd_branch2_reason(q.r, q.theta, q.gamma, ir, opt);
  if (b2.empty()) return accept(2);
  return reject("branch1: " + b1 + "; branch2: " + b2);
}

bool nse_point_admissible(double inv_r, double s, const RegionOptions& opt) {
  if (!(inv_r >= 0.0) || inv_r >= 1.0) return false;
  RegionQuery q;
  q.r = inv_r == 0.0 ? INFINITY : 1.0 / inv_r;
  q.theta = s + 3.0 - 3.0 * inv_r;
  return nse_admissible(q, opt).admissible;
}

std::vector<RegionSample> emit_region_grid(int resolution, RegionMode mode, double gamma,
                                           const RegionOptions& opt) {
  if (resolution < 8) fail(Err::invalid_parameter, "region grid resolution must be at least 8");
  std::vector<RegionSample> out;
  out.reserve(static_cast<size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    // inv_r = i/res walks [0, 1); theta = 3/2 + (k+1)/(2 res) walks (3/2, 2].
    const double inv_r = static_cast<double>(i) / resolution;
    for (int k = 0; k < resolution; ++k) {
      const double theta = 1.5 + 0.5 * (k + 1) / resolution;
      RegionQuery q;
      q.r = inv_r == 0.0 ? INFINITY : 1.0 / inv_r;
      q.theta = theta;
      q.gamma = gamma;
      const RegionVerdict v =
          mode == RegionMode::nse ? nse_admissible(q, opt) : mhd_admissible(q, opt);
      RegionSample s;
      s.inv_r = inv_r;
      s.theta = theta;
      s.gamma = gamma;
      s.s = q.s_u();
      s.admissible = v.admissible;
      s.branch = v.branch;
      out.push_back(s);
    }
  }
  return out;
}

double region_area(const std::vector<RegionSample>& grid) {
  if (grid.empty()) fail(Err::insufficient_data, "region area needs a non-empty grid");
  size_t n = 0;
  for (const RegionSample& s : grid)
    if (s.admissible) ++n;
  return static_cast<double>(n) / static_cast<double>(grid.size());
}

std::vector<std::array<double, 4>> region_boundary(const std::vector<RegionSample>& grid,
                                                   int resolution) {
  const size_t expect = static_cast<size_t>(resolution) * resolution;
  if (resolution < 2 || grid.size() != expect)
    fail(Err::invalid_parameter, "boundary extraction needs the full resolution^2 grid");
  // Sample layout from emit_region_grid: index = i*resolution + k with i the
  // inv_r step and k the theta step.
  auto flag = [&](int i, int k) {
    return grid[static_cast<size_t>(i) * resolution + k].admissible ? 1 : 0;
  };
  const double dx = 1.0 / resolution;
  const double dth = 0.5 / resolution;
  auto corner_x = [&](int i) { return static_cast<double>(i) / resolution; };
  auto corner_th = [&](int k) { return 1.5 + 0.5 * (k + 1) / resolution; };
  // Edge midpoints of the cell with lower-left corner (i, k), in (inv_r, theta).
  struct Pt {
    double x, th;
  };
  std::vector<std::array<double, 4>> segs;
  auto shear = [](const Pt& p) {
    return std::array<double, 2>{p.x, 3.0 * p.x + p.th - 3.0};
  };
  auto emit = [&](const Pt& a, const Pt& b) {
    const auto pa = shear(a);
    const auto pb = shear(b);
    segs.push_back({pa[0], pa[1], pb[0], pb[1]});
  };
  for (int i = 0; i + 1 < resolution; ++i) {
    for (int k = 0; k + 1 < resolution; ++k) {
      const int c = flag(i, k) | (flag(i + 1, k) << 1) | (flag(i + 1, k + 1) << 2) |
                    (flag(i, k + 1) << 3);
      if (c == 0 || c == 15) continue;
      const double x0 = corner_x(i);
      const double th0 = corner_th(k);
      const Pt bottom{x0 + 0.5 * dx, th0};        // between corners 0 and 1
      const Pt right{x0 + dx, th0 + 0.5 * dth};   // between corners 1 and 2
      const Pt top{x0 + 0.5 * dx, th0 + dth};     // between corners 2 and 3
      const Pt left{x0, th0 + 0.5 * dth};         // between corners 3 and 0
      switch (c) {
        case 1: case 14: emit(left, bottom); break;
        case 2: case 13: emit(bottom, right); break;
        case 3: case 12: emit(left, right); break;
        case 4: case 11: emit(right, top); break;
        case 6: case 9:  emit(bottom, top); break;
        case 7: case 8:  emit(left, top); break;
        case 5:  emit(left, bottom); emit(right, top); break;
        case 10: emit(bottom, right); emit(left, top); break;
        default: break;
      }
    }
  }
  return segs;
}

std::string region_csv(const std::vector<RegionSample>& grid) {
  std::ostringstream os;
  os.precision(12);
  os << "inv_r,s,theta,gamma,admissible,branch\n";
  for (const RegionSample& s : grid) {
    os << s.inv_r << ',' << s.s << ',' << s.theta << ',' << s.gamma << ','
       << (s.admissible ? 1 : 0) << ',' << s.branch << '\n';
  }
  return os.str();
}

}  // namespace lab
