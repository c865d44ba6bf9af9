#pragma once

#include <vector>

#include "muckfem/geometry.hpp"

namespace muckfem {

/// Polynomial of total degree <= degree written in monomials centred at a
/// point c:  p(y) = sum_beta coef_beta (y - c)^beta.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int dim, int degree, Point center);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  Point center() const { return center_; }

  const std::vector<MultiIndex>& exponents() const { return exponents_; }
  double coefficient(MultiIndex beta) const;
  double& coefficient(MultiIndex beta);
  const std::vector<double>& coefficients() const { return coef_; }

  double operator()(Point y) const;
  double derivative(Point y, MultiIndex kappa) const;

  /// D^alpha p as a polynomial of degree max(degree - |alpha|, 0).
  Polynomial differentiate(MultiIndex alpha) const;
  /// Same polynomial expressed around a new centre.
  Polynomial recentered(Point c) const;

  /// Largest |coefficient difference| after re-centring other to this centre.
  double maxCoefficientDistance(const Polynomial& other) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(double s);

 private:
  int index(MultiIndex beta) const;

  int dim_ = 1;
  int degree_ = 0;
  Point center_{};
  std::vector<MultiIndex> exponents_;
  std::vector<double> coef_;
};

}  // namespace muckfem
