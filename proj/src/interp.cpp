#include "muckfem/interp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "muckfem/error.hpp"

namespace muckfem {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double falling(int e, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (e - i);
  return r;
}

std::vector<double> sumOverPatches(const Mesh& mesh, const std::vector<double>& perElement) {
  std::vector<double> out(mesh.numElements(), 0.0);
  for (int e = 0; e < mesh.numElements(); ++e) {
    std::vector<double> terms;
    for (int t : mesh.patch(e)) terms.push_back(perElement[t]);
    out[e] = orderedSum(terms);
  }
  return out;
}

}  // namespace

FESpace::FESpace(const Mesh& mesh, int degree, unsigned dirichletFaces)
    : mesh_(&mesh), degree_(degree), dirichlet_(dirichletFaces) {
  const bool tensor2 = mesh.kind() == MeshKind::Tensor && mesh.dim() == 2;
  require(degree == 1 || (degree == 2 && !tensor2), ErrorCode::InvalidArgument,
          tensor2 ? "tensor meshes carry Q1 only" : "Lagrange degree must be 1 or 2");
  const int nn = mesh.numNodes();
  for (int i = 0; i < nn; ++i) {
    dofs_.push_back(mesh.node(i));
    faces_.push_back(mesh.boundaryFaces(i));
    dofElems_.push_back(mesh.elementsOf(i));
  }
  elemDofs_.resize(mesh.numElements());
  for (int e = 0; e < mesh.numElements(); ++e) elemDofs_[e] = mesh.element(e);
  if (degree == 2) {
    std::map<std::pair<int, int>, int> edges;
    for (int e = 0; e < mesh.numElements(); ++e) {
      const auto& el = mesh.element(e);
      const int nv = static_cast<int>(el.size());
      const int ne = mesh.dim() == 1 ? 1 : nv;
      for (int k = 0; k < ne; ++k) {
        const int a = el[k], b = el[(k + 1) % nv];
        const auto key = std::minmax(a, b);
        auto it = edges.find(key);
        int id;
        if (it == edges.end()) {
          id = static_cast<int>(dofs_.size());
          edges.emplace(key, id);
          const Point mid = 0.5 * (mesh.node(a) + mesh.node(b));
          dofs_.push_back(mid);
          faces_.push_back(mesh.domain().faces(mid));
          dofElems_.push_back({});
        } else {
          id = it->second;
        }
        dofElems_[id].push_back(e);
        elemDofs_[e].push_back(id);
      }
    }
  }
  for (int i = 0; i < numDofs(); ++i) {
    if (i < nn) {
      const Star s = mesh.star(i);
      starH_.push_back(s.h);
      starAxes_.push_back(s.hAxis);
    } else {
      double h = 1e300;
      for (int e : dofElems_[i]) h = std::min(h, mesh.diameter(e));
      starH_.push_back(h);
      starAxes_.push_back({h, h});
    }
  }

  if (mesh.dim() == 1) {
    for (int a = 0; a <= degree; ++a) exps_.push_back({a, 0});
  } else if (tensor2) {
    exps_ = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  } else {
    exps_ = multiIndicesUpTo(2, degree);
  }
  nloc_ = static_cast<int>(exps_.size());
  ctr_.resize(mesh.numElements());
  scl_.resize(mesh.numElements());
  inv_.resize(mesh.numElements());
  for (int e = 0; e < mesh.numElements(); ++e) {
    const Cell c = mesh.cell(e);
    ctr_[e] = c.centroid();
    scl_[e] = c.diameter();
    require(static_cast<int>(elemDofs_[e].size()) == nloc_, ErrorCode::InvalidArgument, "element DOF count mismatch");
    Eigen::MatrixXd V(nloc_, nloc_);
    for (int r = 0; r < nloc_; ++r) {
      const auto m = monomials(e, dofs_[elemDofs_[e][r]], {0, 0});
      for (int k = 0; k < nloc_; ++k) V(r, k) = m[k];
    }
    const Eigen::MatrixXd Vi = V.inverse();
    inv_[e].resize(nloc_ * nloc_);
    for (int r = 0; r < nloc_; ++r)
      for (int k = 0; k < nloc_; ++k) inv_[e][r * nloc_ + k] = Vi(r, k);
  }
}

std::vector<double> FESpace::monomials(int e, Point x, MultiIndex k) const {
  const double s = scl_[e];
  const double u = (x.x - ctr_[e].x) / s;
  const double v = (x.y - ctr_[e].y) / s;
  const double f = ipow(1.0 / s, k.order());
  std::vector<double> out(nloc_);
  for (int c = 0; c < nloc_; ++c) {
    const MultiIndex a = exps_[c];
    out[c] = (a.i < k.i || a.j < k.j)
                 ? 0.0
                 : f * falling(a.i, k.i) * falling(a.j, k.j) * ipow(u, a.i - k.i) * ipow(v, a.j - k.j);
  }
  return out;
}

double FESpace::basis(int e, int local, Point x, MultiIndex k) const {
  const auto m = monomials(e, x, k);
  double s = 0.0;
  for (int c = 0; c < nloc_; ++c) s += inv_[e][c * nloc_ + local] * m[c];
  return s;
}

void FESpace::shape(int e, Point x, std::vector<double>& values, std::vector<Point>& grads) const {
  const auto m0 = monomials(e, x, {0, 0});
  const auto mx = monomials(e, x, {1, 0});
  const auto my = mesh_->dim() == 2 ? monomials(e, x, {0, 1}) : std::vector<double>(nloc_, 0.0);
  values.assign(nloc_, 0.0);
  grads.assign(nloc_, Point{});
  for (int l = 0; l < nloc_; ++l)
    for (int c = 0; c < nloc_; ++c) {
      const double a = inv_[e][c * nloc_ + l];
      values[l] += a * m0[c];
      grads[l].x += a * mx[c];
      grads[l].y += a * my[c];
    }
}

FEFunction::FEFunction(const FESpace& space, std::vector<double> coef) : space_(&space), coef_(std::move(coef)) {
  require(static_cast<int>(coef_.size()) == space.numDofs(), ErrorCode::InvalidArgument, "coefficient count mismatch");
}

double FEFunction::onElement(int e, Point x, MultiIndex k) const {
  const auto& dofs = space_->elementDofs(e);
  double s = 0.0;
  for (std::size_t l = 0; l < dofs.size(); ++l) s += coef_[dofs[l]] * space_->basis(e, static_cast<int>(l), x, k);
  return s;
}

double FEFunction::evaluate(Point x) const {
  const int e = space_->mesh().locate(x);
  if (e < 0) throw Error(ErrorCode::PointOutsideMesh, "evaluation point outside the mesh");
  return onElement(e, x);
}

Point FEFunction::gradientAt(Point x) const {
  const int e = space_->mesh().locate(x);
  if (e < 0) throw Error(ErrorCode::PointOutsideMesh, "evaluation point outside the mesh");
  return {onElement(e, x, {1, 0}), space_->mesh().dim() == 2 ? onElement(e, x, {0, 1}) : 0.0};
}

Field FEFunction::toField() const {
  Field f;
  f.dim = space_->mesh().dim();
  f.maxOrder = 8;  // piecewise polynomial: higher derivatives vanish
  const FEFunction self = *this;
  f.eval = [self](int e, Point x, MultiIndex k) { return self.onElement(e, x, k); };
  return f;
}

void FEFunction::dumpCsv(std::ostream& os) const {
  const bool two = space_->mesh().dim() == 2;
  os << (two ? "dof,x,y,value\n" : "dof,x,value\n");
  os.precision(17);
  for (int i = 0; i < space_->numDofs(); ++i) {
    const Point p = space_->dof(i);
    os << i << ',' << p.x;
    if (two) os << ',' << p.y;
    os << ',' << coef_[i] << '\n';
  }
}

QuasiInterpolant::QuasiInterpolant(const FESpace& space, double margin) : space_(&space) {
  const Mesh& mesh = space.mesh();
  double r;
  if (space.isTensor()) {
    r = std::min(margin, 1.0 / mesh.shapeDiagnostics().weakRegularityRatio);
  } else {
    std::vector<BumpSite> sites;
    for (int i = 0; i < space.numDofs(); ++i)
      if (!space.onBoundary(i)) sites.push_back({space.dof(i), space.dofElements(i), space.starSize(i)});
    r = calibrateBumpRadius(mesh, sites, space.degree(), margin);
  }
  bump_ = std::make_unique<Bump>(mesh.dim(), r);
}

RescaledBump QuasiInterpolant::bumpAt(int dof) const {
  if (space_->onBoundary(dof))
    throw Error(ErrorCode::UnsupportedDomain, "no averaged Taylor polynomial at boundary DOFs");
  RescaledBump b = space_->isTensor()
                       ? RescaledBump::anisotropic(*bump_, space_->dof(dof), space_->starAxes(dof))
                       : RescaledBump::isotropic(*bump_, space_->dof(dof), space_->starSize(dof), space_->degree());
  b.verifySupport(space_->mesh(), space_->dofElements(dof));
  return b;
}

Polynomial QuasiInterpolant::polynomialAt(const SmoothFunction& v, int dof) const {
  return averagedTaylor(v, bumpAt(dof), space_->degree());
}

FEFunction QuasiInterpolant::apply(const SmoothFunction& v, Execution exec) const {
  FEFunction out(*space_);
  auto& c = out.coefficients();
  forEachIndex(space_->numDofs(), exec, [&](int i) {
    if (space_->isConstrained(i)) return;
    c[i] = averagedTaylor(v, bumpAt(i), space_->degree()).coefficient({0, 0});
  });
  return out;
}

FEFunction QuasiInterpolant::apply(const FEFunction& v, Execution exec) const {
  const int dim = space_->mesh().dim();
  return apply(SmoothFunction::sampled(dim, [v](Point x) { return v.evaluate(x); }), exec);
}

FEFunction quasiInterpolate(const SmoothFunction& v, const FESpace& space, Execution exec) {
  return QuasiInterpolant(space).apply(v, exec);
}

std::vector<LocalErrorRow> localErrorTable(const SmoothFunction& v, const FEFunction& F, const QuadratureRule& rule,
                                           double p, int k, Execution exec) {
  require(!v.isSampled(), ErrorCode::DerivativeUnavailable, "error tables need a function with derivatives");
  const FESpace& space = F.space();
  const Mesh& mesh = space.mesh();
  const int m = space.degree();
  const Field diff = difference(toField(v), F.toField());
  const auto err = elementSeminormPowers(diff, p, k, mesh, rule, nullptr, exec);
  const auto semi = sumOverPatches(mesh, elementSeminormPowers(toField(v), p, m + 1, mesh, rule, nullptr, exec));
  std::vector<LocalErrorRow> rows(mesh.numElements());
  for (int e = 0; e < mesh.numElements(); ++e) {
    LocalErrorRow& r = rows[e];
    r.element = e;
    r.h = mesh.diameter(e);
    r.hAxis = mesh.sizes(e);
    r.error = std::pow(err[e], 1.0 / p);
    r.patchSeminorm = std::pow(semi[e], 1.0 / p);
    const double den = std::pow(r.h, m + 1 - k) * r.patchSeminorm;
    r.ratio = den > 0.0 ? r.error / den : 0.0;
    for (int t : mesh.patch(e))
      for (int n : mesh.element(t))
        if (mesh.isBoundary(n)) r.touchesBoundary = true;
  }
  return rows;
}

GlobalError globalError(const SmoothFunction& v, const FEFunction& F, const QuadratureRule& rule, double p, int k,
                        const std::vector<int>* elements, Execution exec) {
  require(!v.isSampled(), ErrorCode::DerivativeUnavailable, "error tables need a function with derivatives");
  const Mesh& mesh = F.space().mesh();
  const int m = F.space().degree();
  const Field diff = difference(toField(v), F.toField());
  const auto err = elementSeminormPowers(diff, p, k, mesh, rule, elements, exec);  // positional
  std::vector<double> plain, scaled;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const int e = elements ? (*elements)[i] : static_cast<int>(i);
    plain.push_back(err[i]);
    scaled.push_back(err[i] * std::pow(mesh.diameter(e), -(m + 1 - k) * p));
  }
  return {std::pow(orderedSum(plain), 1.0 / p), std::pow(orderedSum(scaled), 1.0 / p)};
}

void writeErrorTableCsv(std::ostream& os, const std::vector<LocalErrorRow>& rows) {
  os << "element,h,hx,hy,error,patch_seminorm,ratio,boundary\n";
  os.precision(12);
  for (const auto& r : rows)
    os << r.element << ',' << r.h << ',' << r.hAxis.x << ',' << r.hAxis.y << ',' << r.error << ','
       << r.patchSeminorm << ',' << r.ratio << ',' << (r.touchesBoundary ? 1 : 0) << '\n';
}

namespace {

enum class WeightClass { One, Power, Face, InverseVarpi, Other };

WeightClass classify(const Weight& w) {
  if (w.isConstant()) return WeightClass::One;
  if (auto pf = asPurePower(w)) return pf->type == Singularity::Type::Point ? WeightClass::Power : WeightClass::Face;
  if (w.kind() == WeightKind::Reciprocal && w.child(0).kind() == WeightKind::DiracLog && w.child(0).outerPower() == 1.0)
    return WeightClass::InverseVarpi;
  if (w.kind() == WeightKind::DiracLog && w.outerPower() == -1.0) return WeightClass::InverseVarpi;
  return WeightClass::Other;
}

}  // namespace

bool isSupportedPair(const Weight& rho, const Weight& omega) {
  const WeightClass a = classify(rho), b = classify(omega);
  if (a == WeightClass::One && b == WeightClass::One) return true;
  if (a == WeightClass::Power && b == WeightClass::Power) {
    const auto pr = *asPurePower(rho), po = *asPurePower(omega);
    return pr.exponent == po.exponent && pr.center == po.center;
  }
  if (a == WeightClass::InverseVarpi && b == WeightClass::One) return true;
  if (a == WeightClass::One && b == WeightClass::Face) return true;
  return false;
}

MetricsError differentMetricsError(const SmoothFunction& v, const FEFunction& F, const QuadratureRule& rhoRule, double q,
                                   const QuadratureRule& omegaRule, double p, int k, Execution exec) {
  require(k == 0 || k == 1, ErrorCode::InvalidArgument, "different-metrics estimates exist for k = 0, 1");
  require(p <= q, ErrorCode::InvalidArgument, "different-metrics estimates need p <= q");
  if (!isSupportedPair(rhoRule.weight, omegaRule.weight))
    throw Error(ErrorCode::UnsupportedPair,
                "weight pair " + rhoRule.weight.describe() + ", " + omegaRule.weight.describe() + " is not supported");
  require(!v.isSampled(), ErrorCode::DerivativeUnavailable, "error tables need a function with derivatives");
  const Mesh& mesh = F.space().mesh();
  const Field diff = difference(toField(v), F.toField());
  const auto err = elementSeminormPowers(diff, q, k, mesh, rhoRule, nullptr, exec);
  const auto semi = sumOverPatches(mesh, elementSeminormPowers(toField(v), p, k + 1, mesh, omegaRule, nullptr, exec));
  std::vector<double> rhoT(mesh.numElements()), omT(mesh.numElements());
  for (int e = 0; e < mesh.numElements(); ++e) {
    std::vector<double> a, b;
    for (const auto& pt : rhoRule[e].points) a.push_back(pt.w);
    for (const auto& pt : omegaRule[e].points) b.push_back(pt.w);
    rhoT[e] = orderedSum(a);
    omT[e] = orderedSum(b);
  }
  const auto rhoS = sumOverPatches(mesh, rhoT);
  const auto omS = sumOverPatches(mesh, omT);
  MetricsError out;
  std::vector<double> errs;
  for (int e = 0; e < mesh.numElements(); ++e) {
    MetricsRow r;
    r.element = e;
    r.h = mesh.diameter(e);
    r.error = std::pow(err[e], 1.0 / q);
    r.factor = r.h * std::pow(rhoS[e], 1.0 / q) * std::pow(omS[e], -1.0 / p) * std::pow(semi[e], 1.0 / p);
    r.ratio = r.factor > 0.0 ? r.error / r.factor : 0.0;
    out.maxRatio = std::max(out.maxRatio, r.ratio);
    errs.push_back(err[e]);
    out.rows.push_back(r);
  }
  out.error = std::pow(orderedSum(errs), 1.0 / q);
  return out;
}

double compatibilityProbe(const Weight& rho, double q, const Weight& omega, double p, Point x,
                          const std::vector<double>& radii) {
  std::vector<double> mr, mo;
  for (double r : radii) {
    mr.push_back(weightedMeasure(rho, Ball{x, r}));
    mo.push_back(weightedMeasure(omega, Ball{x, r}));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t j = 0; j < radii.size(); ++j) {
      if (radii[i] > radii[j]) continue;
      const double v = (radii[i] / radii[j]) * std::pow(mr[i] / mr[j], 1.0 / q) * std::pow(mo[i] / mo[j], -1.0 / p);
      best = std::max(best, v);
    }
  return best;
}

}  // namespace muckfem
