#include "muckfem/function.hpp"

#include <cmath>
#include <numbers>

#include "muckfem/error.hpp"

namespace muckfem {

namespace {

constexpr double kPi = std::numbers::pi;

// k-th derivative of sin(a t) and exp(a t)
double sinDerivative(double a, double t, int k) {
  const double s = std::pow(a, k);
  switch (k % 4) {
    case 0: return s * std::sin(a * t);
    case 1: return s * std::cos(a * t);
    case 2: return -s * std::sin(a * t);
    default: return -s * std::cos(a * t);
  }
}

}  // namespace

SmoothFunction::SmoothFunction(int dim, int maxOrder, Evaluator eval, std::string name)
    : dim_(dim), maxOrder_(maxOrder), eval_(std::move(eval)), name_(std::move(name)) {}

SmoothFunction SmoothFunction::sampled(int dim, std::function<double(Point)> values, std::string name) {
  SmoothFunction f(dim, 0, [values](Point x, MultiIndex) { return values(x); }, std::move(name));
  f.sampled_ = true;
  return f;
}

SmoothFunction SmoothFunction::fromPolynomial(const Polynomial& p) {
  return SmoothFunction(p.dim(), 1000, [p](Point x, MultiIndex k) { return p.derivative(x, k); }, "polynomial");
}

SmoothFunction SmoothFunction::constant(int dim, double c) {
  return SmoothFunction(dim, 1000, [c](Point, MultiIndex k) { return k.order() == 0 ? c : 0.0; }, "constant");
}

double SmoothFunction::derivative(Point x, MultiIndex kappa) const {
  if (kappa.order() > maxOrder_) {
    throw Error(ErrorCode::DerivativeUnavailable,
                "derivative of order " + std::to_string(kappa.order()) + " requested from " +
                    (name_.empty() ? std::string("function") : name_));
  }
  if (dim_ == 1 && kappa.j > 0) return 0.0;
  return eval_(x, kappa);
}

SmoothFunction SmoothFunction::derivativeFunction(MultiIndex alpha) const {
  require(alpha.order() <= maxOrder_, ErrorCode::DerivativeUnavailable, "derivative order too high");
  auto inner = eval_;
  const int d = dim_;
  SmoothFunction f(dim_, maxOrder_ - alpha.order(), [inner, alpha, d](Point x, MultiIndex k) {
    MultiIndex total{alpha.i + k.i, alpha.j + k.j};
    if (d == 1 && total.j > 0) return 0.0;
    return inner(x, total);
  }, name_ + "'");
  return f;
}

SmoothFunction SmoothFunction::operator+(const SmoothFunction& o) const {
  auto a = eval_, b = o.eval_;
  SmoothFunction f(dim_, std::min(maxOrder_, o.maxOrder_),
                   [a, b](Point x, MultiIndex k) { return a(x, k) + b(x, k); }, name_ + "+" + o.name_);
  f.sampled_ = sampled_ || o.sampled_;
  return f;
}

SmoothFunction SmoothFunction::operator*(double s) const {
  auto a = eval_;
  SmoothFunction f(dim_, maxOrder_, [a, s](Point x, MultiIndex k) { return s * a(x, k); }, name_);
  f.sampled_ = sampled_;
  return f;
}

namespace functions {

SmoothFunction sinPi(int dim) {
  return SmoothFunction(dim, 1000, [](Point x, MultiIndex k) {
    if (k.j > 0) return 0.0;
    return sinDerivative(kPi, x.x, k.i);
  }, "sin");
}

SmoothFunction sinProduct() {
  return SmoothFunction(2, 1000, [](Point x, MultiIndex k) {
    return sinDerivative(kPi, x.x, k.i) * sinDerivative(kPi, x.y, k.j);
  }, "sin-product");
}

SmoothFunction exponential(int dim) {
  return SmoothFunction(dim, 1000, [dim](Point x, MultiIndex k) {
    if (dim == 1) return k.j > 0 ? 0.0 : std::exp(x.x);
    return std::pow(0.5, k.j) * std::exp(x.x + 0.5 * x.y);
  }, "exp");
}

SmoothFunction bubble1D() {
  return SmoothFunction(1, 1000, [](Point x, MultiIndex k) {
    if (k.j > 0) return 0.0;
    switch (k.i) {
      case 0: return x.x * (1.0 - x.x);
      case 1: return 1.0 - 2.0 * x.x;
      case 2: return -2.0;
      default: return 0.0;
    }
  }, "bubble");
}

SmoothFunction sineSeries(std::vector<double> c) {
  return SmoothFunction(1, 1000, [c](Point x, MultiIndex k) {
    if (k.j > 0) return 0.0;
    double s = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) s += c[n] * sinDerivative((n + 1) * kPi, x.x, k.i);
    return s;
  }, "sine-series");
}

SmoothFunction byName(const std::string& name, int dim) {
  if (name == "sin") return sinPi(dim);
  if (name == "sin-product") {
    require(dim == 2, ErrorCode::ConfigError, "sin-product needs dimension 2");
    return sinProduct();
  }
  if (name == "exp") return exponential(dim);
  if (name == "bubble") {
    require(dim == 1, ErrorCode::ConfigError, "bubble needs dimension 1");
    return bubble1D();
  }
  throw Error(ErrorCode::ConfigError, "unknown function '" + name + "'");
}

}  // namespace functions

Field toField(const SmoothFunction& f) {
  Field out;
  out.dim = f.dim();
  out.maxOrder = f.maxOrder();
  out.eval = [f](int, Point x, MultiIndex k) { return f.derivative(x, k); };
  return out;
}

Field difference(const Field& a, const Field& b) {
  Field out;
  out.dim = a.dim;
  out.maxOrder = std::min(a.maxOrder, b.maxOrder);
  out.eval = [a, b](int e, Point x, MultiIndex k) { return a.eval(e, x, k) - b.eval(e, x, k); };
  return out;
}

}  // namespace muckfem
