#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "muckfem/execution.hpp"
#include "muckfem/function.hpp"
#include "muckfem/mesh.hpp"
#include "muckfem/quadrature.hpp"
#include "muckfem/taylor.hpp"
#include "muckfem/weights.hpp"

namespace muckfem {

/// Continuous Lagrange space: P1 or P2 on simplicial meshes (and 1D meshes of
/// either kind), Q1 on 2D tensor meshes. Vertex DOFs come first and share the
/// mesh node numbering; P2 edge midpoints follow.
class FESpace {
 public:
  FESpace(const Mesh& mesh, int degree, unsigned dirichletFaces = AllFaces);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  bool isTensor() const { return mesh_->kind() == MeshKind::Tensor && mesh_->dim() == 2; }
  int numDofs() const { return static_cast<int>(dofs_.size()); }
  Point dof(int i) const { return dofs_[i]; }
  const std::vector<int>& elementDofs(int e) const { return elemDofs_[e]; }
  /// Elements on which the basis function of DOF i is supported (its star).
  const std::vector<int>& dofElements(int i) const { return dofElems_[i]; }
  /// Geometric boundary of the domain.
  bool onBoundary(int i) const { return faces_[i] != 0; }
  /// Boundary DOFs on a Dirichlet face; the quasi-interpolant sets them to 0.
  bool isConstrained(int i) const { return (faces_[i] & dirichlet_) != 0; }
  unsigned dirichletFaces() const { return dirichlet_; }
  /// Star size: min element diameter (isotropic) and min side per axis.
  double starSize(int i) const { return starH_[i]; }
  Point starAxes(int i) const { return starAxes_[i]; }

  /// D^k of the local basis function `local` of element e at x (|k| <= 2).
  double basis(int e, int local, Point x, MultiIndex k = {0, 0}) const;
  /// Values and gradients of all local basis functions of element e at x.
  void shape(int e, Point x, std::vector<double>& values, std::vector<Point>& grads) const;

 private:
  std::vector<double> monomials(int e, Point x, MultiIndex k) const;

  const Mesh* mesh_;
  int degree_;
  unsigned dirichlet_;
  std::vector<Point> dofs_;
  std::vector<unsigned> faces_;
  std::vector<std::vector<int>> elemDofs_, dofElems_;
  std::vector<double> starH_;
  std::vector<Point> starAxes_;
  int nloc_ = 0;
  std::vector<MultiIndex> exps_;
  // per element: centre, scale and the inverse Vandermonde (nloc x nloc, row major)
  std::vector<Point> ctr_;
  std::vector<double> scl_;
  std::vector<std::vector<double>> inv_;
};

class FEFunction {
 public:
  FEFunction() = default;
  explicit FEFunction(const FESpace& space) : space_(&space), coef_(space.numDofs(), 0.0) {}
  FEFunction(const FESpace& space, std::vector<double> coef);

  const FESpace& space() const { return *space_; }
  std::vector<double>& coefficients() { return coef_; }
  const std::vector<double>& coefficients() const { return coef_; }
  double operator[](int i) const { return coef_[i]; }

  /// PointOutsideMesh if x is not in the closed domain.
  double evaluate(Point x) const;
  Point gradientAt(Point x) const;
  double onElement(int e, Point x, MultiIndex k = {0, 0}) const;
  Field toField() const;

  /// "i,x[,y],value" rows, one per DOF.
  void dumpCsv(std::ostream& os) const;

 private:
  const FESpace* space_ = nullptr;
  std::vector<double> coef_;
};

/// Pi v = sum over free DOFs z of Q^m_z v(z) phi_z. Bumps are isotropic on
/// simplicial meshes and per-axis on tensor meshes; their reference radius is
/// calibrated once per space so that every support keeps a margin inside its star.
class QuasiInterpolant {
 public:
  explicit QuasiInterpolant(const FESpace& space, double margin = 0.9);

  double radius() const { return bump_->radius(); }
  const Bump& bump() const { return *bump_; }
  RescaledBump bumpAt(int dof) const;

  FEFunction apply(const SmoothFunction& v, Execution exec = defaultExecution()) const;
  /// Finite element input, through the values-only route.
  FEFunction apply(const FEFunction& v, Execution exec = defaultExecution()) const;
  /// The full averaged Taylor polynomial of a free DOF.
  Polynomial polynomialAt(const SmoothFunction& v, int dof) const;

 private:
  const FESpace* space_;
  std::unique_ptr<Bump> bump_;
};

FEFunction quasiInterpolate(const SmoothFunction& v, const FESpace& space, Execution exec = defaultExecution());

struct LocalErrorRow {
  int element = -1;
  double h = 0.0;
  Point hAxis;
  double error = 0.0;           // |v - F|_{W^k_p(w,T)}
  double patchSeminorm = 0.0;   // |v|_{W^{m+1}_p(w,S_T)}
  double ratio = 0.0;           // error / (h^{m+1-k} patchSeminorm)
  bool touchesBoundary = false; // S_T meets the boundary
};

/// Per-element errors for the weight folded into `rule`. Sampled functions
/// (no derivatives) are rejected with DerivativeUnavailable.
std::vector<LocalErrorRow> localErrorTable(const SmoothFunction& v, const FEFunction& F, const QuadratureRule& rule,
                                           double p, int k, Execution exec = defaultExecution());

struct GlobalError {
  double plain = 0.0;   // (sum_T |v - F|^p)^{1/p}
  double scaled = 0.0;  // (sum_T h_T^{-(m+1-k)p} |v - F|^p)^{1/p}
};

GlobalError globalError(const SmoothFunction& v, const FEFunction& F, const QuadratureRule& rule, double p, int k,
                        const std::vector<int>* elements = nullptr, Execution exec = defaultExecution());

void writeErrorTableCsv(std::ostream& os, const std::vector<LocalErrorRow>& rows);

struct MetricsRow {
  int element = -1;
  double h = 0.0;
  double error = 0.0;   // ||D^k (v - F)||_{L^q(rho,T)}
  double factor = 0.0;  // h_T rho(S_T)^{1/q} omega(S_T)^{-1/p} |v|_{W^{k+1}_p(omega,S_T)}
  double ratio = 0.0;
};

struct MetricsError {
  std::vector<MetricsRow> rows;
  double maxRatio = 0.0;
  double error = 0.0;  // (sum_T error^q)^{1/q}
};

/// Error in L^q(rho) (k = 0) or of the gradient (k = 1) against the bound with
/// W^{k+1}_p(omega) data. Pairs: (1,1), (|x|^g,|x|^g), (1/varpi,1), (1,|y|^a);
/// anything else is UnsupportedPair.
MetricsError differentMetricsError(const SmoothFunction& v, const FEFunction& F, const QuadratureRule& rhoRule, double q,
                                   const QuadratureRule& omegaRule, double p, int k,
                                   Execution exec = defaultExecution());

bool isSupportedPair(const Weight& rho, const Weight& omega);

/// max over r <= R of (r/R)(rho(B_r)/rho(B_R))^{1/q} (omega(B_r)/omega(B_R))^{-1/p}.
double compatibilityProbe(const Weight& rho, double q, const Weight& omega, double p, Point x,
                          const std::vector<double>& radii);

}  // namespace muckfem
