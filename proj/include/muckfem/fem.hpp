#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "muckfem/interp.hpp"

namespace muckfem {

/// -div(omega grad u) + b . grad u + c u = f with homogeneous Dirichlet data on
/// the space's Dirichlet faces. The load is one of: a source f = sourceWeight *
/// source (the weight carries any singular factor so the rule can resolve it),
/// a point mass at diracPoint, or traceScale * <datum, v(., y0)> on the
/// bottom face of a 2D tensor mesh.
struct EllipticProblem {
  enum class Load { None, Source, Dirac, NeumannTrace };

  const FESpace* space = nullptr;
  Weight omega = Weight::constant(1);
  std::function<Point(Point)> convection;  // b; empty means 0
  std::function<double(Point)> reaction;   // c >= 0; empty means 0

  Load load = Load::None;
  SmoothFunction source;
  std::optional<Weight> sourceWeight;
  Point diracPoint;
  std::function<double(double)> traceDatum;
  double traceScale = 1.0;

  int quadratureDegree = -1;  // -1: chosen from the space degree
};

struct LinearSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<char> constrained;
  bool symmetric = true;
};

/// SingularAssembly if a free diagonal entry is not positive.
LinearSystem assemble(const EllipticProblem& problem, Execution exec = defaultExecution());

enum class SolverMethod { Auto, Direct, CG };

struct SolveOptions {
  SolverMethod method = SolverMethod::Auto;
  double tol = 1e-10;  // CG relative residual
  int cgThreshold = 200000;
};

/// Direct: sparse Cholesky (SingularMatrix when not positive definite) or LU
/// for nonsymmetric systems; CG: diagonal preconditioner, SolverDiverged
/// after 50 * #DOF iterations.
FEFunction solve(const LinearSystem& sys, const FESpace& space, const SolveOptions& opts = {});

/// max over free rows of |A U - F| divided by max |F|.
double galerkinResidual(const LinearSystem& sys, const FEFunction& U);

FEFunction solveWeightedElliptic(const Weight& omega, const SmoothFunction& source, const std::optional<Weight>& sourceWeight,
                                 const FESpace& space, const SolveOptions& opts = {},
                                 Execution exec = defaultExecution());

/// -Laplace u = delta_{x0}; PointOnBoundary / PointOutsideMesh for bad x0.
FEFunction solveDirac(Point x0, const FESpace& space, const SolveOptions& opts = {},
                      Execution exec = defaultExecution());

/// ||coarse - fine||_{L^2} integrated on the fine mesh, which must refine the
/// coarse one.
double nestedL2Difference(const FEFunction& coarse, const FEFunction& fine, int degree = 6);

/// Extension of (-d^2/dx^2)^s on (0,1) to (0,1) x (0,Y) with weight y^alpha,
/// alpha = 1 - 2s.
struct ExtensionProblem {
  double s = 0.5;
  double Y = 1.0;
  int Nx = 8;
  int M = 8;
  double gamma = 1.0;
  bool graded = true;
  bool allowSubcriticalGrading = false;
  std::vector<double> yPoints;  // explicit partition of (0, Y); overrides Y, M, gamma


  double alpha() const { return 1.0 - 2.0 * s; }
};

/// d_s = 2^{1-2s} Gamma(1-s) / Gamma(s)
double extensionConstant(double s);

struct FractionalSolution {
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<FESpace> space;
  FEFunction U;
  std::unique_ptr<Mesh> traceMesh;
  std::unique_ptr<FESpace> traceSpace;
  FEFunction trace;
  LinearSystem system;
  int dofs = 0;  // free unknowns
};

/// Q1 on a tensor mesh, y graded as (k/M)^gamma Y; InvalidGrading when gamma <=
/// 3/(1-alpha) in graded mode unless explicitly allowed. `dsOverride` replaces
/// d_s (used after a recalibration).
FractionalSolution solveFractional(const ExtensionProblem& prob, const std::function<double(double)>& f,
                                   const SolveOptions& opts = {}, Execution exec = defaultExecution(),
                                   std::optional<double> dsOverride = std::nullopt);

struct SpectralOracle {
  SmoothFunction u;           // sum_k lambda_k^{-s} f_k phi_k
  std::vector<double> sineCoefficients;  // of u in sin(k pi x)
  double remainderBound = 0;  // L^2 bound on the truncated tail
};

/// f given by sine coefficients (exact) or as a function (projected on K modes).
SpectralOracle spectralOracle(const std::vector<double>& fSine, double s);
SpectralOracle spectralOracle(const SmoothFunction& f, double s, int K);

/// Exact extension sum c_k lambda_k^{-s} sin(k pi x) psi(k pi y) of the oracle,
/// psi(z) = 2^{1-s}/Gamma(s) z^s K_s(z); first derivatives available.
SmoothFunction exactExtension(const std::vector<double>& fSine, double s);

/// "%%MatrixMarket matrix coordinate real general" triplets, 1-based.
void writeMatrixMarket(std::ostream& os, const Eigen::SparseMatrix<double>& A);

}  // namespace muckfem
