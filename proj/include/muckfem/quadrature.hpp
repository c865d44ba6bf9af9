#pragma once

#include <functional>
#include <vector>

#include "muckfem/execution.hpp"
#include "muckfem/function.hpp"
#include "muckfem/mesh.hpp"
#include "muckfem/weights.hpp"

namespace muckfem {

struct QuadPoint {
  Point x;
  double w = 0.0;  // includes the weight function
};

struct ElementRule {
  std::vector<QuadPoint> points;
  bool adapted = false;  // singular-adapted (Jacobi or dyadic) rule
};

/// Per-element rules integrating w q exactly for polynomials q of degree up
/// to `degree` (up to tol where the weight is not a pure power).
struct QuadratureRule {
  int degree = 0;
  Weight weight = Weight::constant(1);
  std::vector<ElementRule> elements;

  const ElementRule& operator[](int e) const { return elements[e]; }
};

/// Points per direction for the Jacobi rules next to a singularity.
inline constexpr int kSingularRuleOrder = 8;
/// Cap on dyadic panels toward a singularity without a closed-form rule.
inline constexpr int kDyadicLevelCap = 40;

ElementRule cellRule(const Cell& cell, const Weight& w, int degree, double tol = 1e-10);
QuadratureRule buildRule(const Mesh& mesh, const Weight& w, int degree, double tol = 1e-10,
                         Execution exec = defaultExecution());

/// Sum_T int_T g(T, x) w(x) dx with the weight folded into the rule.
double integrateOver(const std::function<double(int, Point)>& g, const Mesh& mesh, const QuadratureRule& rule,
                     const std::vector<int>* elements = nullptr, Execution exec = defaultExecution());

/// Per-element sum over |kappa| = k of int_T |D^kappa f|^p w.
std::vector<double> elementSeminormPowers(const Field& f, double p, int k, const Mesh& mesh,
                                          const QuadratureRule& rule, const std::vector<int>* elements = nullptr,
                                          Execution exec = defaultExecution());

double weightedLpNorm(const Field& f, double p, const Mesh& mesh, const QuadratureRule& rule,
                      const std::vector<int>* elements = nullptr, Execution exec = defaultExecution());
/// (sum_{|kappa|=k} ||D^kappa f||^p)^{1/p}; DerivativeUnavailable if k > maxOrder.
double weightedSeminorm(const Field& f, double p, int k, const Mesh& mesh, const QuadratureRule& rule,
                        const std::vector<int>* elements = nullptr, Execution exec = defaultExecution());
/// (sum_{l<=k} |f|_{W^l_p}^p)^{1/p}
double weightedSobolevNorm(const Field& f, double p, int k, const Mesh& mesh, const QuadratureRule& rule,
                           const std::vector<int>* elements = nullptr, Execution exec = defaultExecution());

}  // namespace muckfem
