#include "muckfem/taylor.hpp"

#include <cmath>
#include <numbers>

#include "muckfem/error.hpp"
#include "muckfem/gauss.hpp"

namespace muckfem {

namespace {

constexpr double kPi = std::numbers::pi;

double profile(double q) { return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0; }

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

}  // namespace

Bump::Bump(int dim, double radius, int radialPoints, int angularPoints) : dim_(dim), r_(radius) {
  require(dim == 1 || dim == 2, ErrorCode::InvalidArgument, "bump dimension must be 1 or 2");
  require(radius > 0.0, ErrorCode::InvalidArgument, "bump radius must be positive");
  double integral;
  if (dim == 1) {
    integral = integrate([](double t) { return profile(t * t); }, -1.0, 1.0, 1e-15);
  } else {
    integral = 2.0 * kPi * integrate([](double s) { return profile(s * s) * s; }, 0.0, 1.0, 1e-15);
  }
  c_ = 1.0 / (std::pow(r_, dim) * integral);
  auto build = [&](int nr) {
    std::vector<QuadPoint> out;
    if (dim == 1) {
      Rule1D g = legendreOn(nr, -r_, r_);
      for (std::size_t i = 0; i < g.x.size(); ++i) out.push_back({{g.x[i], 0.0}, g.w[i]});
    } else {
      Rule1D g = legendreOn(nr, 0.0, r_);
      const double dth = 2.0 * kPi / angularPoints;
      for (std::size_t i = 0; i < g.x.size(); ++i)
        for (int k = 0; k < angularPoints; ++k) {
          const double th = (k + 0.5) * dth;
          out.push_back({{g.x[i] * std::cos(th), g.x[i] * std::sin(th)}, g.w[i] * g.x[i] * dth});
        }
    }
    return out;
  };
  // bump derivatives peak near the edge of the support, so the by-parts
  // route gets twice the radial resolution
  rule_ = build(2 * radialPoints);
  mass_ = build(radialPoints);
  double total = 0.0;
  for (auto& q : mass_) total += (q.w *= (*this)(q.x));
  // exact unit mass on the rule actually used; differs from c_ by ~1e-12
  for (auto& q : mass_) q.w /= total;
}

double Bump::operator()(Point xi) const { return c_ * profile(dot(xi, xi) / (r_ * r_)); }

double Bump::derivative(Point xi, MultiIndex mu) const {
  const double r2 = r_ * r_;
  const double q = dot(xi, xi) / r2;
  if (q >= 1.0) return 0.0;
  const double phi = profile(q);
  const double a = 1.0 / (1.0 - q);
  const double d1 = -phi * a * a;                          // phi'(q)
  const double d2 = phi * (a * a * a * a - 2.0 * a * a * a);  // phi''(q)
  switch (mu.order()) {
    case 0: return c_ * phi;
    case 1: return c_ * d1 * 2.0 * (mu.i == 1 ? xi.x : xi.y) / r2;
    case 2: {
      const double xa = mu.i >= 1 ? xi.x : xi.y;
      const double xb = mu.j >= 1 ? xi.y : xi.x;
      const double delta = (mu.i == 2 || mu.j == 2) ? 1.0 : 0.0;
      return c_ * (d2 * 4.0 * xa * xb / (r2 * r2) + d1 * 2.0 * delta / r2);
    }
    default: throw Error(ErrorCode::DerivativeUnavailable, "bump derivatives are available up to order 2");
  }
}

RescaledBump RescaledBump::isotropic(const Bump& bump, Point z, double h, int m) {
  require(h > 0.0, ErrorCode::InvalidArgument, "star size must be positive");
  RescaledBump b;
  b.bump_ = &bump;
  b.z_ = z;
  const double s = (m + 1) / h;
  b.s_ = {s, bump.dim() == 2 ? s : 1.0};
  b.jac_ = bump.dim() == 2 ? s * s : s;
  return b;
}

RescaledBump RescaledBump::anisotropic(const Bump& bump, Point z, Point h) {
  require(h.x > 0.0 && (bump.dim() == 1 || h.y > 0.0), ErrorCode::InvalidArgument, "star sizes must be positive");
  RescaledBump b;
  b.bump_ = &bump;
  b.z_ = z;
  b.s_ = {1.0 / h.x, bump.dim() == 2 ? 1.0 / h.y : 1.0};
  b.jac_ = bump.dim() == 2 ? b.s_.x * b.s_.y : b.s_.x;
  return b;
}

double RescaledBump::operator()(Point x) const {
  const Point xi{s_.x * (z_.x - x.x), s_.y * (z_.y - x.y)};
  return jac_ * (*bump_)(bump_->dim() == 1 ? Point{xi.x, 0.0} : xi);
}

double RescaledBump::derivative(Point x, MultiIndex mu) const {
  const Point xi{s_.x * (z_.x - x.x), bump_->dim() == 2 ? s_.y * (z_.y - x.y) : 0.0};
  // d/dx = -s d/dxi
  return jac_ * ipow(-s_.x, mu.i) * ipow(-s_.y, mu.j) * bump_->derivative(xi, mu);
}

Point RescaledBump::toPhysical(Point xi) const {
  return {z_.x - xi.x / s_.x, bump_->dim() == 2 ? z_.y - xi.y / s_.y : 0.0};
}

Point RescaledBump::halfAxes() const { return {bump_->radius() / s_.x, bump_->radius() / s_.y}; }

double RescaledBump::mass() const {
  double s = 0.0;
  for (const auto& q : bump_->massRule()) s += q.w;
  return s;
}

void RescaledBump::verifySupport(const Mesh& mesh, const std::vector<int>& elements) const {
  const Point a = halfAxes();
  bool ok;
  if (mesh.kind() == MeshKind::Tensor && mesh.dim() == 2) {
    double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
    for (int e : elements) {
      Cell c = mesh.cell(e);
      for (auto v : c.vertices) lx = std::min(lx, v.x), hx = std::max(hx, v.x), ly = std::min(ly, v.y), hy = std::max(hy, v.y);
    }
    // a tensor star of an interior vertex is the bounding rectangle itself
    const double eps = 1e-12 * (hx - lx + hy - ly);
    ok = z_.x - a.x >= lx - eps && z_.x + a.x <= hx + eps && z_.y - a.y >= ly - eps && z_.y + a.y <= hy + eps;
  } else {
    const double d = mesh.distanceToUnionBoundary(z_, elements);
    ok = std::max(a.x, mesh.dim() == 2 ? a.y : 0.0) <= d * (1.0 + 1e-12);
  }
  if (!ok) throw Error(ErrorCode::QuadratureFailure, "bump support leaves the star");
}

double RescaledBump::leakedMass(const Mesh& mesh, const std::vector<int>& elements) const {
  double out = 0.0;
  for (const auto& q : bump_->massRule()) {
    const Point x = toPhysical(q.x);
    bool inside = false;
    for (int e : elements)
      if (mesh.cell(e).contains(x, 1e-12)) {
        inside = true;
        break;
      }
    if (!inside) out += q.w;
  }
  return out;
}

double calibrateBumpRadius(const Mesh& mesh, const std::vector<BumpSite>& sites, int m, double margin) {
  double r = 1e300;
  for (const auto& s : sites) r = std::min(r, margin * (m + 1) * mesh.distanceToUnionBoundary(s.z, s.elements) / s.h);
  require(sites.empty() || r > 0.0, ErrorCode::QuadratureFailure, "degenerate star for the bump");
  return sites.empty() ? 1.0 : r;
}

Polynomial taylorPoly(const SmoothFunction& v, Point x, int m) {
  Polynomial p(v.dim(), m, x);
  for (auto a : multiIndicesUpTo(v.dim(), m)) p.coefficient(a) = v.derivative(x, a) / multiFactorial(a);
  return p;
}

Polynomial averagedTaylor(const SmoothFunction& v, const RescaledBump& psi, int m) {
  if (v.isSampled() || v.maxOrder() < m) {
    return averagedTaylorFromValues([&v](Point x) { return v(x); }, v.dim(), psi, m);
  }
  const int n = v.dim();
  const auto alphas = multiIndicesUpTo(n, m);
  Polynomial q(n, m, psi.center());
  const Point s = psi.scale();
  for (const auto& pt : psi.bump().massRule()) {
    const Point x = psi.toPhysical(pt.x);
    const Point d{pt.x.x / s.x, n == 2 ? pt.x.y / s.y : 0.0};  // z - x
    for (auto a : alphas) {
      const double da = v.derivative(x, a) * pt.w;
      for (auto b : alphas) {
        if (b.i > a.i || b.j > a.j) continue;
        const MultiIndex g{a.i - b.i, a.j - b.j};
        q.coefficient(b) += da * ipow(d.x, g.i) * ipow(d.y, g.j) / (multiFactorial(b) * multiFactorial(g));
      }
    }
  }
  return q;
}

Polynomial averagedTaylorFromValues(const std::function<double(Point)>& v, int n, const RescaledBump& psi, int m) {
  require(m <= 2, ErrorCode::InvalidArgument, "averaged Taylor polynomials are implemented for m <= 2");
  const auto alphas = multiIndicesUpTo(n, m);
  Polynomial q(n, m, psi.center());
  const Point s = psi.scale();
  const Bump& bump = psi.bump();
  const double jac = n == 2 ? s.x * s.y : s.x;
  for (const auto& pt : bump.supportRule()) {
    const Point x = psi.toPhysical(pt.x);
    const Point d{pt.x.x / s.x, n == 2 ? pt.x.y / s.y : 0.0};  // z - x
    const double vx = v(x) * pt.w / jac;                        // dx = dxi / prod s
    for (auto a : alphas) {
      const double sign = (a.order() % 2 == 0) ? 1.0 : -1.0;
      for (auto b : alphas) {
        if (b.i > a.i || b.j > a.j) continue;
        const MultiIndex g{a.i - b.i, a.j - b.j};
        // D^a_x [(z-x)^g psi_z(x)] by Leibniz
        double dterm = 0.0;
        for (int m1 = 0; m1 <= a.i; ++m1)
          for (int m2 = 0; m2 <= a.j; ++m2) {
            const MultiIndex nu{a.i - m1, a.j - m2};  // derivatives on the monomial
            if (nu.i > g.i || nu.j > g.j) continue;
            const double mono = ((nu.order() % 2 == 0) ? 1.0 : -1.0) * falling(g.i, nu.i) * falling(g.j, nu.j) *
                                ipow(d.x, g.i - nu.i) * ipow(d.y, g.j - nu.j);
            const double dpsi = jac * ipow(-s.x, m1) * ipow(-s.y, m2) * bump.derivative(pt.x, {m1, m2});
            dterm += binomial(a.i, m1) * binomial(a.j, m2) * mono * dpsi;
          }
        q.coefficient(b) += sign * vx * dterm / (multiFactorial(b) * multiFactorial(g));
      }
    }
  }
  return q;
}

std::pair<Polynomial, Polynomial> derivativeCommutes(const SmoothFunction& v, const RescaledBump& psi, int m,
                                                     MultiIndex alpha) {
  require(alpha.order() <= m, ErrorCode::InvalidArgument, "|alpha| must not exceed m");
  Polynomial lhs = averagedTaylor(v, psi, m).differentiate(alpha);
  Polynomial rhs = averagedTaylor(v.derivativeFunction(alpha), psi, m - alpha.order());
  return {lhs, rhs};
}

StabilityProbe stabilityProbe(const SmoothFunction& v, const RescaledBump& psi, int m, int k, const Weight& w,
                              double p, const Mesh& mesh, const Star& star, const QuadratureRule& rule) {
  require(k >= 0 && k <= m, ErrorCode::InvalidArgument, "stability probe needs 0 <= k <= m");
  const Polynomial q = averagedTaylor(v, psi, m);
  StabilityProbe out;
  // dense barycentric / tensor lattice on every element of the star
  const int lattice = 12;
  for (int e : star.elements) {
    Cell c = mesh.cell(e);
    for (int i = 0; i <= lattice; ++i)
      for (int j = 0; j <= (mesh.dim() == 1 ? 0 : lattice); ++j) {
        Point x;
        if (mesh.dim() == 1) {
          x = c.vertices[0] + (static_cast<double>(i) / lattice) * (c.vertices[1] - c.vertices[0]);
        } else if (c.vertices.size() == 3) {
          if (i + j > lattice) continue;
          x = c.vertices[0] + (static_cast<double>(i) / lattice) * (c.vertices[1] - c.vertices[0]) +
              (static_cast<double>(j) / lattice) * (c.vertices[2] - c.vertices[0]);
        } else {
          x = c.vertices[0] + Point{(c.vertices[2].x - c.vertices[0].x) * i / lattice,
                                    (c.vertices[2].y - c.vertices[0].y) * j / lattice};
        }
        out.lhs = std::max(out.lhs, std::abs(q(x)));
      }
  }
  const double pp = p / (p - 1.0);
  double dual = 0.0;
  for (int e : star.elements) dual += weightedMeasure(w.raised(-pp / p), mesh.cell(e));
  const int n = mesh.dim();
  const double h = star.h;
  double sum = 0.0;
  const Field f = toField(v);
  for (int l = 0; l <= k; ++l) sum += std::pow(h, l) * weightedSeminorm(f, p, l, mesh, rule, &star.elements);
  out.rhs = std::pow(h, -n) * std::pow(dual, 1.0 / pp) * sum;
  return out;
}

PoincareProbe poincareProbe(const Mesh& S, const QuadratureRule& rule, double p, const RescaledBump& chi,
                            const std::vector<SmoothFunction>& samples,
                            const std::vector<PoincareSubdomain>& subdomains) {
  PoincareProbe out;
  auto average = [](const SmoothFunction& v, const RescaledBump& c) {
    double num = 0.0, den = 0.0;
    for (const auto& q : c.bump().massRule()) {
      const Point x = c.toPhysical(q.x);
      num += q.w * v(x);
      den += q.w;
    }
    return num / den;
  };
  for (const auto& v : samples) {
    const double c0 = average(v, chi);
    const SmoothFunction shifted = v + SmoothFunction::constant(v.dim(), -c0);
    const double grad = weightedSeminorm(toField(v), p, 1, S, rule, nullptr, Execution::Serial);
    const double ratio = weightedLpNorm(toField(shifted), p, S, rule, nullptr, Execution::Serial) / grad;
    out.ratios.push_back(ratio);
    out.maxRatio = std::max(out.maxRatio, ratio);
    double patch = 0.0;
    for (const auto& sd : subdomains) {
      sd.chi.verifySupport(S, sd.elements);
      const double ci = average(v, sd.chi);
      const SmoothFunction si = v + SmoothFunction::constant(v.dim(), -ci);
      patch = std::max(patch, weightedLpNorm(toField(si), p, S, rule, nullptr, Execution::Serial) / grad);
    }
    out.patchRatios.push_back(patch);
    out.patchMaxRatio = std::max(out.patchMaxRatio, patch);
  }
  return out;
}

}  // namespace muckfem
