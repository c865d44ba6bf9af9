#include "muckfem/fit.hpp"

#include <cmath>

#include "muckfem/error.hpp"

namespace muckfem {

FitResult fitOrder(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "fit needs paired data");
  require(x.size() >= 2, ErrorCode::DegenerateFit, "fit needs at least two rows");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorCode::DegenerateFit, "fit data must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 1e-300) throw Error(ErrorCode::DegenerateFit, "all abscissae are equal");
  FitResult f;
  f.slope = sxy / sxx;
  const double res = syy - f.slope * sxy;
  f.r2 = syy <= 1e-300 ? 1.0 : 1.0 - std::max(res, 0.0) / syy;
  return f;
}

}  // namespace muckfem
