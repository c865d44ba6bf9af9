#pragma once

#include <functional>
#include <vector>

#include "muckfem/function.hpp"
#include "muckfem/mesh.hpp"
#include "muckfem/polynomial.hpp"
#include "muckfem/quadrature.hpp"
#include "muckfem/weights.hpp"

namespace muckfem {

/// Standard mollifier c exp(-1/(1 - |xi/r|^2)) on B(0, r), normalised so that
/// it integrates to one.
class Bump {
 public:
  Bump(int dim, double radius, int radialPoints = 64, int angularPoints = 48);

  int dim() const { return dim_; }
  double radius() const { return r_; }
  double normalization() const { return c_; }

  double operator()(Point xi) const;
  /// D^mu of the reference bump for |mu| <= 2.
  double derivative(Point xi, MultiIndex mu) const;

  /// Points of a product rule on the support; w excludes the bump itself.
  const std::vector<QuadPoint>& supportRule() const { return rule_; }
  /// Coarser rule with the bump folded into the weights, summing to one.
  const std::vector<QuadPoint>& massRule() const { return mass_; }

 private:
  int dim_;
  double r_;
  double c_;
  std::vector<QuadPoint> rule_, mass_;
};

/// psi_z(x) = (prod s_i) psi(s o (z - x)): s_i = (m+1)/h_z for the isotropic
/// scaling of a simplicial star, s_i = 1/h_z^i for tensor stars.
class RescaledBump {
 public:
  static RescaledBump isotropic(const Bump& bump, Point z, double h, int m);
  static RescaledBump anisotropic(const Bump& bump, Point z, Point h);

  Point center() const { return z_; }
  Point scale() const { return s_; }
  const Bump& bump() const { return *bump_; }

  double operator()(Point x) const;
  double derivative(Point x, MultiIndex mu) const;
  Point toPhysical(Point xi) const;
  /// Half axes r / s_i of the elliptic support.
  Point halfAxes() const;
  /// Discrete integral of psi_z (one up to quadrature error).
  double mass() const;

  /// QuadratureFailure unless the support lies in the union of `elements`.
  void verifySupport(const Mesh& mesh, const std::vector<int>& elements) const;
  /// Bump mass carried by quadrature points outside the given elements.
  double leakedMass(const Mesh& mesh, const std::vector<int>& elements) const;

 private:
  const Bump* bump_ = nullptr;
  Point z_;
  Point s_;
  double jac_ = 1.0;  // prod s_i
};

/// A node (vertex or edge midpoint) with the elements its bump must stay in.
struct BumpSite {
  Point z;
  std::vector<int> elements;
  double h = 0.0;
};

/// Largest reference radius r with r h_z / (m+1) <= margin * dist(z, boundary of
/// the site) for every site; isotropic scaling only.
double calibrateBumpRadius(const Mesh& mesh, const std::vector<BumpSite>& sites, int m, double margin = 0.9);

/// P^m v(x, .) as a polynomial centred at x.
Polynomial taylorPoly(const SmoothFunction& v, Point x, int m);

/// Q^m_z v for a function with derivatives up to m; sampled functions (or
/// functions with fewer derivatives) go through integration by parts against
/// the bump, which only needs values of v.
Polynomial averagedTaylor(const SmoothFunction& v, const RescaledBump& psi, int m);
Polynomial averagedTaylorFromValues(const std::function<double(Point)>& v, int dim, const RescaledBump& psi, int m);

/// (D^alpha Q^m v, Q^{m-|alpha|} D^alpha v)
std::pair<Polynomial, Polynomial> derivativeCommutes(const SmoothFunction& v, const RescaledBump& psi, int m,
                                                     MultiIndex alpha);

struct StabilityProbe {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return lhs / rhs; }
};

/// ||Q^m_z v||_{L^inf(S_z)} against h^{-n} ||1||_{L^{p'}(w^{-p'/p},S_z)} sum_{l<=k} h^l |v|_{W^l_p(w,S_z)}.
StabilityProbe stabilityProbe(const SmoothFunction& v, const RescaledBump& psi, int m, int k, const Weight& w,
                              double p, const Mesh& mesh, const Star& star, const QuadratureRule& rule);

struct PoincareProbe {
  std::vector<double> ratios;       // per sample
  double maxRatio = 0.0;
  std::vector<double> patchRatios;  // per sample, max over sub-domains
  double patchMaxRatio = 0.0;
};

struct PoincareSubdomain {
  std::vector<int> elements;
  RescaledBump chi;
};

/// ||v - int chi v||_{L^p(mu,S)} / ||grad v||_{L^p(mu,S)} over the samples, S
/// being the whole mesh and mu the weight folded into `rule`; optionally the
/// overlapping-subdomain variant with v_i = int_{S_i} v chi_i.
PoincareProbe poincareProbe(const Mesh& S, const QuadratureRule& rule, double p, const RescaledBump& chi,
                            const std::vector<SmoothFunction>& samples,
                            const std::vector<PoincareSubdomain>& subdomains = {});

}  // namespace muckfem
