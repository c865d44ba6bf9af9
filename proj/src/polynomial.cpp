#include "muckfem/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "muckfem/error.hpp"

namespace muckfem {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// d^k/dt^k t^e = e!/(e-k)! t^(e-k)
double fallingFactorial(int e, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (e - i);
  return r;
}

}  // namespace

Polynomial::Polynomial(int dim, int degree, Point center)
    : dim_(dim), degree_(degree), center_(center),
      exponents_(multiIndicesUpTo(dim, degree)), coef_(exponents_.size(), 0.0) {
  require(dim == 1 || dim == 2, ErrorCode::InvalidArgument, "polynomial dimension must be 1 or 2");
  require(degree >= 0, ErrorCode::InvalidArgument, "negative polynomial degree");
}

int Polynomial::index(MultiIndex beta) const {
  if (beta.order() > degree_ || (dim_ == 1 && beta.j != 0)) return -1;
  int before = 0;
  for (int o = 0; o < beta.order(); ++o) before += (dim_ == 1 ? 1 : o + 1);
  return before + (dim_ == 1 ? 0 : beta.order() - beta.i);
}

double Polynomial::coefficient(MultiIndex beta) const {
  int k = index(beta);
  return k < 0 ? 0.0 : coef_[k];
}

double& Polynomial::coefficient(MultiIndex beta) {
  int k = index(beta);
  require(k >= 0, ErrorCode::InvalidArgument, "monomial outside polynomial degree");
  return coef_[k];
}

double Polynomial::operator()(Point y) const { return derivative(y, {0, 0}); }

double Polynomial::derivative(Point y, MultiIndex kappa) const {
  const double dx = y.x - center_.x;
  const double dy = y.y - center_.y;
  double sum = 0.0;
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    const MultiIndex b = exponents_[k];
    if (b.i < kappa.i || b.j < kappa.j || coef_[k] == 0.0) continue;
    sum += coef_[k] * fallingFactorial(b.i, kappa.i) * fallingFactorial(b.j, kappa.j) *
           ipow(dx, b.i - kappa.i) * ipow(dy, b.j - kappa.j);
  }
  return sum;
}

Polynomial Polynomial::differentiate(MultiIndex alpha) const {
  Polynomial out(dim_, std::max(degree_ - alpha.order(), 0), center_);
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    const MultiIndex b = exponents_[k];
    if (b.i < alpha.i || b.j < alpha.j) continue;
    out.coefficient({b.i - alpha.i, b.j - alpha.j}) +=
        coef_[k] * fallingFactorial(b.i, alpha.i) * fallingFactorial(b.j, alpha.j);
  }
  return out;
}

Polynomial Polynomial::recentered(Point c) const {
  // (y - c_old)^b = ((y - c) + (c - c_old))^b expanded binomially.
  Polynomial out(dim_, degree_, c);
  const double sx = c.x - center_.x;
  const double sy = c.y - center_.y;
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    const MultiIndex b = exponents_[k];
    for (int a1 = 0; a1 <= b.i; ++a1)
      for (int a2 = 0; a2 <= b.j; ++a2)
        out.coefficient({a1, a2}) += coef_[k] * binomial(b.i, a1) * binomial(b.j, a2) *
                                     ipow(sx, b.i - a1) * ipow(sy, b.j - a2);
  }
  return out;
}

double Polynomial::maxCoefficientDistance(const Polynomial& other) const {
  const Polynomial o = other.recentered(center_);
  const int deg = std::max(degree_, o.degree_);
  double d = 0.0;
  for (auto b : multiIndicesUpTo(dim_, deg)) d = std::max(d, std::abs(coefficient(b) - o.coefficient(b)));
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  const Polynomial o = other.recentered(center_);
  if (o.degree_ > degree_) {
    Polynomial grown(dim_, o.degree_, center_);
    for (std::size_t k = 0; k < exponents_.size(); ++k) grown.coefficient(exponents_[k]) = coef_[k];
    *this = grown;
  }
  for (std::size_t k = 0; k < o.exponents_.size(); ++k) coefficient(o.exponents_[k]) += o.coef_[k];
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto& c : coef_) c *= s;
  return *this;
}

}  // namespace muckfem
