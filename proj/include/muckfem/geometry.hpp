#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace muckfem {

/// Points live in R^2; one-dimensional objects only use the first coordinate
/// and keep the second at zero.
struct Point {
  double x = 0.0;
  double y = 0.0;

  double operator[](int i) const { return i == 0 ? x : y; }
  double& operator[](int i) { return i == 0 ? x : y; }

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Multi-index kappa = (kappa_1, kappa_2) for partial derivatives and monomials.
struct MultiIndex {
  int i = 0;
  int j = 0;

  int order() const { return i + j; }
  int operator[](int k) const { return k == 0 ? i : j; }
  friend bool operator==(MultiIndex a, MultiIndex b) { return a.i == b.i && a.j == b.j; }
  friend bool operator<(MultiIndex a, MultiIndex b) {
    return a.order() != b.order() ? a.order() < b.order() : a.i > b.i;
  }
};

/// All multi-indices of total order exactly k in dimension dim, graded
/// lexicographically ((2,0),(1,1),(0,2) for k = 2 in 2D).
std::vector<MultiIndex> multiIndicesOfOrder(int dim, int k);
/// All multi-indices with total order at most k.
std::vector<MultiIndex> multiIndicesUpTo(int dim, int k);

double factorial(int n);
double multiFactorial(MultiIndex a);
double binomial(int n, int k);

struct Ball {
  Point center;
  double radius = 1.0;
};

/// Lebesgue measure of a ball in R^dim.
double ballVolume(int dim, double radius);

/// A closed convex cell: an interval (2 vertices, 1D), or a convex polygon
/// listed counter-clockwise (triangles and rectangles in 2D).
struct Cell {
  int dim = 1;
  std::vector<Point> vertices;

  double measure() const;
  double diameter() const;
  Point centroid() const;
  bool contains(Point p, double tol = 1e-12) const;
};

}  // namespace muckfem
