#pragma once

#include <functional>
#include <vector>

namespace muckfem {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Jacobi rule on [-1,1] for the weight (1-x)^a (1+x)^b,
/// a, b > -1. Nodes and weights come from the Golub-Welsch eigenproblem and
/// are cached, so repeated calls are cheap and thread safe.
const Rule1D& gaussJacobi(int n, double a, double b);
inline const Rule1D& gaussLegendre(int n) { return gaussJacobi(n, 0.0, 0.0); }

/// Rule on [0, L] integrating s^beta g(s) ds, exact for polynomial g of
/// degree 2n-1. Weights already contain s^beta.
Rule1D jacobiOnSegment(int n, double beta, double length);
/// Plain Gauss-Legendre mapped to [a, b].
Rule1D legendreOn(int n, double a, double b);

/// Adaptive double-exponential integration on [a, b]; copes with integrable
/// endpoint singularities. Throws QuadratureFailure when the error estimate
/// stays far above tol; inner integrals of nested schemes pass strict = false
/// because their relative error is meaningless on vanishing chords.
double integrate(const std::function<double(double)>& f, double a, double b, double tol, bool strict = true);

}  // namespace muckfem
