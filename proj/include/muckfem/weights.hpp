#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muckfem/geometry.hpp"

namespace muckfem {

enum class WeightKind { Constant, Power, Extension, DiracLog, Reciprocal, Product };

/// Where a weight blows up or vanishes, and how fast: |x - location|^exponent
/// times |log|x - location||^logPower (Point), or the same in the distance to
/// the line y = location.y (Face, 2D only; a face in 1D is a point).
struct Singularity {
  enum class Type { Point, Face };
  Type type = Type::Point;
  Point location;
  int codim = 1;
  double exponent = 0.0;
  double logPower = 0.0;

  bool integrable() const;
};

/// Immutable weight expression. Leaves are the constant, power, extension
/// (|y|^alpha in the last coordinate) and dirac-log weights; reciprocals and
/// products combine them. Every node carries a constant factor and an outer
/// exponent so that w^t and w(a x + b) stay in closed form.
class Weight {
 public:
  static Weight constant(int dim, double c = 1.0);
  static Weight power(int dim, Point center, double gamma);
  static Weight extension(int dim, double alpha, double face = 0.0);
  /// d = diameter of the domain; branch point at |x - x0| = d.
  static Weight diracLog(int dim, Point center, double diameter);
  static Weight reciprocal(const Weight& w);
  static Weight product(const Weight& a, const Weight& b);

  WeightKind kind() const { return node_->kind; }
  int dim() const { return node_->dim; }

  double operator()(Point x) const;

  /// x -> w(x)^t
  Weight raised(double t) const;
  /// x -> w(a x + b)
  Weight pulledBack(double a, Point b) const;

  std::vector<Singularity> singularities() const;
  /// Circles |x - c| = r across which the weight is only continuous.
  std::vector<std::pair<Point, double>> kinks() const;
  bool isConstant() const;

  Point center() const { return node_->center; }
  double exponent() const { return node_->exponent; }
  double diameter() const { return node_->diameter; }
  double face() const { return node_->face; }
  double scale() const { return node_->scale; }
  double outerPower() const { return node_->t; }
  const Weight& child(int i) const { return i == 0 ? *node_->a : *node_->b; }

  std::string describe() const;

 private:
  struct Node {
    WeightKind kind = WeightKind::Constant;
    int dim = 1;
    double scale = 1.0;
    double t = 1.0;
    Point center;
    double exponent = 0.0;
    double diameter = 1.0;
    double face = 0.0;
    std::shared_ptr<const Weight> a, b;
  };
  explicit Weight(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  std::shared_ptr<const Node> node_;
};

/// c |x - center|^exponent (or c |y - face|^exponent for a face), recognised
/// structurally. Quadrature uses it to pick exact Jacobi rules.
struct PowerForm {
  Singularity::Type type = Singularity::Type::Point;
  Point center;
  double exponent = 0.0;
  double scale = 1.0;
};
std::optional<PowerForm> asPurePower(const Weight& w);

/// Config-file description of a weight.
struct WeightSpec {
  std::string kind = "constant";  // constant | power | extension | dirac-log
  int dim = 1;
  Point center;
  double exponent = 0.0;
  double diameter = 1.0;
  bool reciprocal = false;
};
Weight makeWeight(const WeightSpec& spec);

/// Region for weighted measures: a ball or a cell.
double weightedMeasure(const Weight& w, const Ball& b, double tol = 1e-10);
double weightedMeasure(const Weight& w, const Cell& c, double tol = 1e-10);

/// (avg_B w)(avg_B w^{1/(1-p)})^{p-1}
double muckenhouptRatio(const Weight& w, double p, const Ball& b, double tol = 1e-10);

struct BallSampler {
  std::vector<Point> centers;  // empty: singular points of the weight (origin if none)
  double radius = 1.0;         // R of B(x0, R 2^-j)
  int levels = 20;             // j = 0..levels
  std::vector<double> offsets{0.5, 1.0, 2.0};  // off-centre shifts in units of r
  int maxBalls = 0;            // 0: keep all
  double divergenceCap = 1e6;

  std::vector<Ball> balls(const Weight& w) const;
};

struct ApEstimate {
  double p = 2.0;
  double sampledMax = 1.0;
  int ballsSampled = 0;
  std::vector<std::pair<Ball, double>> perBallRatios;
  bool divergent = false;
};

ApEstimate estimateApConstant(const Weight& w, double p, const BallSampler& sampler, double tol = 1e-10);

/// lhs = w(B), rhs = C (|B|/|E|)^p w(E).
std::pair<double, double> checkStrongDoubling(const Weight& w, double p, const Ball& E, const Ball& B,
                                              double C, double tol = 1e-10);

/// r1 = ratio(w^{-1/(p-1)}, p'), r2 = ratio(w, p)^{1/(p-1)} on the same ball.
std::pair<double, double> dualWeightIdentity(const Weight& w, double p, const Ball& b, double tol = 1e-10);

/// h (w(B_h))^{1/2} |B_h|^{-1/2} for B_h = B(x0, h); with w = 1/varpi this is
/// the duality factor of the Dirac problem.
double dualityFactor(const Weight& w, Point x0, double h, double tol = 1e-10);

}  // namespace muckfem
