#include "muckfem/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "muckfem/error.hpp"

namespace muckfem {

namespace {

Rule1D golubWelsch(int n, double a, double b) {
  // Monic Jacobi recurrence; the k = 0 and k = 1 terms are special-cased
  // because the general formulas hit 0/0 when a + b is 0 or -1.
  Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * k + ab;
    diag(k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (t * (t + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    double beta;
    if (k == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
    }
    off(k - 1) = std::sqrt(beta);
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) J(k, k) = diag(k);
  for (int k = 0; k + 1 < n; ++k) J(k, k + 1) = J(k + 1, k) = off(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(ab + 2.0));
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int k = 0; k < n; ++k) {
    r.x[k] = eig.eigenvalues()(k);
    const double v = eig.eigenvectors()(0, k);
    r.w[k] = mu0 * v * v;
  }
  // Legendre nodes are symmetric; enforce it so mirrored meshes see mirrored points.
  if (a == 0.0 && b == 0.0) {
    for (int k = 0; k < n / 2; ++k) {
      const double xs = 0.5 * (r.x[n - 1 - k] - r.x[k]);
      const double ws = 0.5 * (r.w[n - 1 - k] + r.w[k]);
      r.x[k] = -xs;
      r.x[n - 1 - k] = xs;
      r.w[k] = r.w[n - 1 - k] = ws;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
  }
  return r;
}

}  // namespace

const Rule1D& gaussJacobi(int n, double a, double b) {
  require(n >= 1, ErrorCode::InvalidArgument, "Gauss rule needs at least one point");
  require(a > -1.0 && b > -1.0, ErrorCode::NonIntegrable, "Jacobi exponents must exceed -1");
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(n, a, b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, golubWelsch(n, a, b)).first;
  return it->second;
}

Rule1D jacobiOnSegment(int n, double beta, double length) {
  // s = L (1+x)/2, s^beta ds = (L/2)^(1+beta) (1+x)^beta dx
  const Rule1D& g = gaussJacobi(n, 0.0, beta);
  const double scale = std::pow(0.5 * length, 1.0 + beta);
  Rule1D r;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    r.x.push_back(0.5 * length * (1.0 + g.x[k]));
    r.w.push_back(scale * g.w[k]);
  }
  return r;
}

Rule1D legendreOn(int n, double a, double b) {
  const Rule1D& g = gaussLegendre(n);
  Rule1D r;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    r.x.push_back(mid + half * g.x[k]);
    r.w.push_back(half * g.w[k]);
  }
  return r;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol, bool strict) {
  if (b <= a) return 0.0;
  // abscissa tables are costly to build; one integrator per thread
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
  double error = 0.0, l1 = 0.0;
  // Points that round onto an integrable singularity carry no mass.
  auto guarded = [&f](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 0.0;
  };
  const double value = ts.integrate(guarded, a, b, tol, &error, &l1);
  require(std::isfinite(value), ErrorCode::QuadratureFailure, "non-finite integral");
  // tanh-sinh error estimates are pessimistic; only a gross miss is fatal.
  require(!strict || error <= std::max(1e-6, 1e4 * tol) * l1 + 1e-300, ErrorCode::QuadratureFailure,
          "adaptive quadrature did not reach tolerance");
  return value;
}

}  // namespace muckfem
