#include "muckfem/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "muckfem/error.hpp"

namespace muckfem {

std::string_view toString(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorCode::UnsupportedWeight: return "UnsupportedWeight";
    case ErrorCode::UnsupportedPair: return "UnsupportedPair";
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::PointOutsideMesh: return "PointOutsideMesh";
    case ErrorCode::PointOnBoundary: return "PointOnBoundary";
    case ErrorCode::SingularAssembly: return "SingularAssembly";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::InvalidGrading: return "InvalidGrading";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

std::vector<MultiIndex> multiIndicesOfOrder(int dim, int k) {
  std::vector<MultiIndex> out;
  if (dim == 1) {
    out.push_back({k, 0});
  } else {
    for (int i = k; i >= 0; --i) out.push_back({i, k - i});
  }
  return out;
}

std::vector<MultiIndex> multiIndicesUpTo(int dim, int k) {
  std::vector<MultiIndex> out;
  for (int order = 0; order <= k; ++order) {
    auto level = multiIndicesOfOrder(dim, order);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double multiFactorial(MultiIndex a) { return factorial(a.i) * factorial(a.j); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

double ballVolume(int dim, double radius) {
  return dim == 1 ? 2.0 * radius : std::numbers::pi * radius * radius;
}

double Cell::measure() const {
  if (dim == 1) return std::abs(vertices[1].x - vertices[0].x);
  double a = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    a += cross(vertices[i], vertices[(i + 1) % vertices.size()]);
  }
  return 0.5 * std::abs(a);
}

double Cell::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, distance(vertices[i], vertices[j]));
  return d;
}

Point Cell::centroid() const {
  Point c{};
  for (auto v : vertices) c = c + v;
  return (1.0 / static_cast<double>(vertices.size())) * c;
}

bool Cell::contains(Point p, double tol) const {
  if (dim == 1) {
    double lo = std::min(vertices[0].x, vertices[1].x);
    double hi = std::max(vertices[0].x, vertices[1].x);
    return p.x >= lo - tol && p.x <= hi + tol;
  }
  const double scale = diameter();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    Point a = vertices[i];
    Point b = vertices[(i + 1) % vertices.size()];
    if (cross(b - a, p - a) < -tol * scale) return false;
  }
  return true;
}

}  // namespace muckfem
