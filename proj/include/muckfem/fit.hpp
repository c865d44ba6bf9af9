#pragma once

#include <vector>

namespace muckfem {

struct FitResult {
  double slope = 0.0;
  double r2 = 1.0;
};

/// Least-squares slope of log y against log x. DegenerateFit with fewer than
/// two points, equal abscissae or non-positive data.
FitResult fitOrder(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace muckfem
