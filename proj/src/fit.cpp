#include "lab/fit.hpp"

#include <cmath>

#include "lab/errors.hpp"

namespace lab {

void ols_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope,
             double& intercept, double& residual) {
  if (x.size() != y.size() || x.size() < 2)
    fail(Err::insufficient_data, "ols_fit: need at least two points");
  double n = (double)x.size(), sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) fail(Err::insufficient_data, "ols_fit: x values all equal");
  slope = sxy / sxx;
  intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (intercept + slope * x[i]);
    ss += e * e;
  }
  residual = std::sqrt(ss / n);
}

}  // namespace lab
