#pragma once

#include <iosfwd>
#include <vector>

#include "muckfem/geometry.hpp"

namespace muckfem {

enum class MeshKind { Simplicial, Tensor };

/// Interval (a,b) or axis-aligned rectangle; the only domains meshed here.
struct Domain {
  int dim = 1;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  static Domain interval(double a, double b);
  static Domain rectangle(double ax, double bx, double ay, double by);
  static Domain unitSquare() { return rectangle(0, 1, 0, 1); }
  /// Accepts a polygon only if it is an axis-aligned rectangle.
  static Domain polygon(const std::vector<Point>& vertices);

  double measure() const;
  double diameter() const;
  /// Bit mask of the faces x = x0 (1), x = x1 (2), y = y0 (4), y = y1 (8)
  /// that contain p, with relative tolerance 1e-12.
  unsigned faces(Point p) const;
  bool contains(Point p, double tol = 1e-12) const;
};

enum Face : unsigned { Left = 1u, Right = 2u, Bottom = 4u, Top = 8u, AllFaces = 15u };

struct Star {
  int node = -1;
  std::vector<int> elements;
  double h = 0.0;  // min diameter over the star
  Point hAxis;     // min side length per axis (tensor); (h, h) otherwise
};

struct GradedPartition {
  double Y = 1.0;
  int M = 1;
  double gamma = 1.0;
  std::vector<double> points;

  /// Doubles M, so the new points are (k/2M)^gamma Y exactly.
  GradedPartition refined() const;
};

/// y_k = (k/M)^gamma Y, k = 0..M.
GradedPartition gradedPartition(double Y, int M, double gamma);
std::vector<double> uniformPartition(double a, double b, int n);

struct ShapeDiagnostics {
  double maxShapeCoefficient = 1.0;  // max h_T / rho_T
  double weakRegularityRatio = 1.0;  // max size ratio between touching elements
};

class Mesh {
 public:
  static Mesh buildSimplicial(const Domain& domain, double targetH);
  /// One partition per axis; one partition gives a 1D mesh.
  static Mesh buildTensor(const std::vector<std::vector<double>>& partitions);
  Mesh refineUniform() const;

  int dim() const { return dim_; }
  MeshKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }

  int numNodes() const { return static_cast<int>(nodes_.size()); }
  int numElements() const { return static_cast<int>(elements_.size()); }
  Point node(int i) const { return nodes_[i]; }
  const std::vector<int>& element(int e) const { return elements_[e]; }
  bool isBoundary(int i) const { return faces_[i] != 0; }
  unsigned boundaryFaces(int i) const { return faces_[i]; }
  const std::vector<int>& elementsOf(int node) const { return nodeElements_[node]; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }

  Cell cell(int e) const;
  double diameter(int e) const { return diam_[e]; }
  /// Diameter of the inscribed sphere; equal to h_T in 1D by convention.
  double inscribedDiameter(int e) const { return rho_[e]; }
  /// (h^1, h^2) side lengths for tensor cells; (h_T, h_T) otherwise.
  Point sizes(int e) const;
  double maxDiameter() const;

  Star star(int z) const;
  Star starOfElements(int z, std::vector<int> elements) const;
  std::vector<int> patch(int e) const;
  /// Distance from p to the boundary of the union of the given elements.
  double distanceToUnionBoundary(Point p, const std::vector<int>& elements) const;

  /// Element containing x (with tolerance), or -1.
  int locate(Point x, double tol = 1e-12) const;

  ShapeDiagnostics shapeDiagnostics() const;
  bool isConforming() const;
  double totalMeasure() const;

  /// Plain text: "nodes N", N lines "i x [y]", "elements E", E lines "e n0 n1 ...".
  void dump(std::ostream& os) const;

 private:
  void finalize();

  int dim_ = 1;
  MeshKind kind_ = MeshKind::Simplicial;
  Domain domain_;
  std::vector<Point> nodes_;
  std::vector<std::vector<int>> elements_;
  std::vector<unsigned> faces_;
  std::vector<std::vector<int>> nodeElements_;
  std::vector<double> diam_, rho_;
  std::vector<std::vector<double>> axes_;

  // bucket grid for point location
  int bx_ = 1, by_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace muckfem
