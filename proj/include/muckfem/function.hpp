#pragma once

#include <functional>
#include <string>

#include "muckfem/geometry.hpp"
#include "muckfem/polynomial.hpp"

namespace muckfem {

/// Closed-form function with caller-supplied partial derivatives. A sampled
/// function only knows its values (maxOrder 0, sampled() true); it may be
/// averaged but not fed to error tables.
class SmoothFunction {
 public:
  using Evaluator = std::function<double(Point, MultiIndex)>;

  SmoothFunction() = default;
  SmoothFunction(int dim, int maxOrder, Evaluator eval, std::string name = {});

  static SmoothFunction sampled(int dim, std::function<double(Point)> values, std::string name = {});
  static SmoothFunction fromPolynomial(const Polynomial& p);
  static SmoothFunction constant(int dim, double c);

  int dim() const { return dim_; }
  int maxOrder() const { return maxOrder_; }
  bool isSampled() const { return sampled_; }
  const std::string& name() const { return name_; }

  double operator()(Point x) const { return eval_(x, {0, 0}); }
  /// Throws DerivativeUnavailable when |kappa| > maxOrder.
  double derivative(Point x, MultiIndex kappa) const;

  /// D^alpha v as a function of its own, with maxOrder reduced accordingly.
  SmoothFunction derivativeFunction(MultiIndex alpha) const;

  SmoothFunction operator+(const SmoothFunction& o) const;
  SmoothFunction operator*(double s) const;

 private:
  int dim_ = 1;
  int maxOrder_ = 0;
  bool sampled_ = false;
  Evaluator eval_;
  std::string name_;
};

/// Functions used by tests and experiments. Derivatives are exact to any order.
namespace functions {
SmoothFunction sinPi(int dim);            // sin(pi x), constant in y when dim == 2
SmoothFunction sinProduct();              // sin(pi x) sin(pi y)
SmoothFunction exponential(int dim);      // exp(x) or exp(x + y/2)
SmoothFunction bubble1D();                // x (1 - x)
SmoothFunction sineSeries(std::vector<double> coefficients);  // sum c_k sin(k pi x)
/// Look up one of the above by name (sin, sin-product, exp, bubble).
SmoothFunction byName(const std::string& name, int dim);
}  // namespace functions

/// Any quantity that can be evaluated element by element: closed-form
/// functions ignore the element, finite element functions use it to pick the
/// right local polynomial on shared faces.
struct Field {
  std::function<double(int, Point, MultiIndex)> eval;
  int maxOrder = 0;
  int dim = 1;

  double operator()(int elem, Point x, MultiIndex k = {0, 0}) const { return eval(elem, x, k); }
};

Field toField(const SmoothFunction& f);
Field difference(const Field& a, const Field& b);

}  // namespace muckfem
