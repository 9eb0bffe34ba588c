#pragma once

#include <array>
#include <string>
#include <vector>

namespace lab {

// Admissibility queries for the data-space parameters: r is the integrability
// index of the Besov space the data lives in, theta/gamma the construction
// weight exponents.  Derived smoothness indices: s_u = 3/r + theta - 3 for
// the velocity, s_b = 3/r + gamma - 3 for the magnetic field.
struct RegionQuery {
  double r = 2.0;      // in (1, inf]; pass INFINITY for r = infinity
  double theta = 2.0;  // in (3/2, 2]
  double gamma = 2.0;  // in (3/2, 4 - theta]; ignored by the velocity-only predicate

  double inv_r() const;
  double s_u() const { return 3.0 * inv_r() + theta - 3.0; }
  double s_b() const { return 3.0 * inv_r() + gamma - 3.0; }
};

// branch: 1 or 2 when admissible, 0 otherwise.  reason is empty when
// admissible and otherwise names the first failing condition (for a point
// failing both branches, one reason per branch, separated by "; ").
struct RegionVerdict {
  bool admissible = false;
  int branch = 0;
  std::string reason;
};

// The closing step of the discontinuity argument wants the half-integer
// bounds strictly; the stated conditions use <=.  The toggle tightens
// "2*theta + 3/r <= 11/2" (velocity) and "theta + gamma + 3/r <= 11/2"
// (coupled) to strict inequalities for sensitivity sweeps.
struct RegionOptions {
  bool strict_half_integer_bound = false;
};

// Pure and total: never throws, any (r, theta, gamma) gets a verdict.
RegionVerdict nse_admissible(const RegionQuery& q, const RegionOptions& opt = {});
RegionVerdict mhd_admissible(const RegionQuery& q, const RegionOptions& opt = {});

// Is the plane point (1/r, s) reachable by an admissible velocity query?
// Solves theta = s + 3 - 3/r and applies nse_admissible.
bool nse_point_admissible(double inv_r, double s, const RegionOptions& opt = {});

struct RegionSample {
  double inv_r = 0.0;
  double s = 0.0;  // velocity smoothness index of the sample
  double theta = 0.0;
  double gamma = 0.0;
  bool admissible = false;
  int branch = 0;
};

enum class RegionMode { nse, mhd };

// Samples inv_r on [0, 1) and theta on (3/2, 2], resolution points per axis
// (gamma is held fixed in mhd mode).  resolution >= 8.
std::vector<RegionSample> emit_region_grid(int resolution, RegionMode mode, double gamma = 2.0,
                                           const RegionOptions& opt = {});

// Fraction of admissible samples: an area estimate of the region inside the
// sampled (inv_r, theta) rectangle.
double region_area(const std::vector<RegionSample>& grid);

// Boundary segments {x0, y0, x1, y1} in the (inv_r, s) plane, by marching
// squares on the admissibility grid (edge midpoints, then the shear
// theta -> s applied to the vertices).  grid must come from emit_region_grid
// with the same resolution.
std::vector<std::array<double, 4>> region_boundary(const std::vector<RegionSample>& grid,
                                                   int resolution);

// CSV with header inv_r,s,theta,gamma,admissible,branch.
std::string region_csv(const std::vector<RegionSample>& grid);

}  // namespace lab
