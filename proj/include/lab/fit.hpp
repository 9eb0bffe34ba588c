#pragma once
#include <vector>

namespace lab {

// Ordinary least squares y ~ intercept + slope*x; residual is the RMS of the
// fit errors.  Requires at least two distinct x values.
void ols_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope,
             double& intercept, double& residual);

}  // namespace lab
