#include "muckfem/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "muckfem/error.hpp"
#include "muckfem/gauss.hpp"

namespace muckfem {

namespace {

int pointsFor(int degree) { return std::max(1, (degree + 2) / 2); }

const Singularity* pointSingularityIn(const std::vector<Singularity>& sing, const Cell& c, int& count) {
  const Singularity* found = nullptr;
  count = 0;
  for (const auto& s : sing) {
    if (s.type != Singularity::Type::Point) continue;
    if (c.contains(s.location, 1e-12)) {
      ++count;
      found = &s;
    }
  }
  return found;
}

// Rule on [0, L] in the distance xi from a singular endpoint; `f(xi)` is the
// weight at that distance. Pure powers get Gauss-Jacobi, anything else dyadic
// panels plus one point carrying the exact mass of the innermost core.
void radialRule1D(double L, const std::optional<PowerForm>& pf, const std::function<double(double)>& weightAt,
                  const std::function<double(double)>& coreMass, int n, double tol,
                  std::vector<std::pair<double, double>>& out) {
  if (pf) {
    Rule1D r = jacobiOnSegment(std::max(n, kSingularRuleOrder), pf->exponent, L);
    for (std::size_t i = 0; i < r.x.size(); ++i) out.push_back({r.x[i], r.w[i] * pf->scale});
    return;
  }
  double total = 0.0;
  double hi = L;
  int level = 0;
  for (; level < kDyadicLevelCap; ++level) {
    const double lo = 0.5 * hi;
    Rule1D r = legendreOn(std::max(n, kSingularRuleOrder), lo, hi);
    double panel = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      const double w = r.w[i] * weightAt(r.x[i]);
      out.push_back({r.x[i], w});
      panel += w;
    }
    total += panel;
    hi = lo;
    if (panel < tol * total) break;
  }
  out.push_back({0.5 * hi, coreMass(hi)});
}

ElementRule intervalRule(double a, double b, const Weight& w, int degree, double tol) {
  ElementRule rule;
  const auto sing = w.singularities();
  std::vector<double> cuts{a, b};
  int inside = 0;
  double s0 = 0.0;
  for (const auto& s : sing) {
    if (s.location.x >= a && s.location.x <= b) {
      ++inside;
      s0 = s.location.x;
    }
  }
  require(inside <= 1, ErrorCode::UnsupportedWeight, "two singular points in one element");
  if (inside == 1 && s0 > a && s0 < b) cuts.push_back(s0);
  for (auto [c, r] : w.kinks())
    for (double x : {c.x - r, c.x + r})
      if (x > a && x < b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  const bool smooth = w.isConstant();
  const int n = pointsFor(degree) + (smooth ? 0 : 4);
  const auto pf = asPurePower(w);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const bool atLo = inside == 1 && lo == s0, atHi = inside == 1 && hi == s0;
    if (!atLo && !atHi) {
      Rule1D r = legendreOn(n, lo, hi);
      for (std::size_t k = 0; k < r.x.size(); ++k) rule.points.push_back({{r.x[k], 0.0}, r.w[k] * w({r.x[k], 0.0})});
      continue;
    }
    rule.adapted = true;
    const double dir = atLo ? 1.0 : -1.0;
    std::vector<std::pair<double, double>> pts;
    radialRule1D(
        hi - lo, pf, [&](double xi) { return w({s0 + dir * xi, 0.0}); },
        [&](double xi) {
          Cell core{1, {{std::min(s0, s0 + dir * xi), 0.0}, {std::max(s0, s0 + dir * xi), 0.0}}};
          return weightedMeasure(w, core, tol);
        },
        n, tol, pts);
    for (auto [xi, wt] : pts) rule.points.push_back({{s0 + dir * xi, 0.0}, wt});
  }
  return rule;
}

// Triangle with a possible singular point at v[0]: x = v0 + s (e1 + t (e2 - e1)).
void duffyRule(const Point v[3], const Weight& w, bool singular, int degree, double tol, ElementRule& rule) {
  const Point e1 = v[1] - v[0], e2 = v[2] - v[0];
  const double jac = std::abs(cross(e1, e2));  // 2|T|
  if (jac <= 0.0) return;
  auto at = [&](double s, double t) { return v[0] + s * (e1 + t * (e2 - e1)); };
  const bool smooth = w.isConstant();
  const int nt = pointsFor(degree) + (smooth ? 0 : 4);
  Rule1D rt = legendreOn(nt, 0.0, 1.0);
  if (!singular) {
    Rule1D rs = jacobiOnSegment(pointsFor(degree + 1) + (smooth ? 0 : 4), 1.0, 1.0);
    for (std::size_t i = 0; i < rs.x.size(); ++i)
      for (std::size_t j = 0; j < rt.x.size(); ++j) {
        const Point x = at(rs.x[i], rt.x[j]);
        rule.points.push_back({x, jac * rs.w[i] * rt.w[j] * w(x)});
      }
    return;
  }
  rule.adapted = true;
  const auto pf = asPurePower(w);
  if (pf) {
    // w = c |x - v0|^e = c s^e |e1 + t (e2 - e1)|^e
    Rule1D rs = jacobiOnSegment(std::max(pointsFor(degree + 1), kSingularRuleOrder), 1.0 + pf->exponent, 1.0);
    Rule1D rt2 = legendreOn(nt + 8, 0.0, 1.0);
    for (std::size_t j = 0; j < rt2.x.size(); ++j) {
      const double dirLen = norm(e1 + rt2.x[j] * (e2 - e1));
      const double angular = pf->scale * std::pow(dirLen, pf->exponent);
      for (std::size_t i = 0; i < rs.x.size(); ++i)
        rule.points.push_back({at(rs.x[i], rt2.x[j]), jac * rs.w[i] * rt2.w[j] * angular});
    }
    return;
  }
  // dyadic panels in s; the innermost similar sub-triangle gets its exact mass
  double total = 0.0, hi = 1.0;
  const int ns = std::max(pointsFor(degree + 1), kSingularRuleOrder);
  for (int level = 0; level < kDyadicLevelCap; ++level) {
    const double lo = 0.5 * hi;
    Rule1D rs = legendreOn(ns, lo, hi);
    double panel = 0.0;
    for (std::size_t i = 0; i < rs.x.size(); ++i)
      for (std::size_t j = 0; j < rt.x.size(); ++j) {
        const Point x = at(rs.x[i], rt.x[j]);
        const double wt = jac * rs.x[i] * rs.w[i] * rt.w[j] * w(x);
        rule.points.push_back({x, wt});
        panel += wt;
      }
    total += panel;
    hi = lo;
    if (panel < tol * total) break;
  }
  Cell core{2, {v[0], v[0] + hi * e1, v[0] + hi * e2}};
  if (cross(core.vertices[1] - core.vertices[0], core.vertices[2] - core.vertices[0]) < 0)
    std::swap(core.vertices[1], core.vertices[2]);
  rule.points.push_back({core.centroid(), weightedMeasure(w, core, tol)});
}

void triangleRule(const Cell& c, const Weight& w, int degree, double tol, ElementRule& rule) {
  const auto sing = w.singularities();
  for (const auto& s : sing) {
    if (s.type == Singularity::Type::Face) {
      const double lo = std::min({c.vertices[0].y, c.vertices[1].y, c.vertices[2].y});
      const double hi = std::max({c.vertices[0].y, c.vertices[1].y, c.vertices[2].y});
      require(s.location.y < lo || s.location.y > hi, ErrorCode::UnsupportedWeight,
              "face singularities are only supported on rectangles");
    }
  }
  int count = 0;
  const Singularity* s = pointSingularityIn(sing, c, count);
  require(count <= 1, ErrorCode::UnsupportedWeight, "two singular points in one element");
  if (!s) {
    const Point v[3] = {c.vertices[0], c.vertices[1], c.vertices[2]};
    duffyRule(v, w, false, degree, tol, rule);
    return;
  }
  const Point x0 = s->location;
  const double scale = c.diameter();
  for (int k = 0; k < 3; ++k) {
    const Point a = c.vertices[k], b = c.vertices[(k + 1) % 3];
    if (std::abs(cross(a - x0, b - x0)) <= 1e-14 * scale * scale) continue;  // x0 on this edge
    const Point v[3] = {x0, a, b};
    duffyRule(v, w, true, degree, tol, rule);
  }
}

void rectangleRule(const Cell& c, const Weight& w, int degree, double tol, ElementRule& rule) {
  const auto sing = w.singularities();
  int count = 0;
  const Singularity* s = pointSingularityIn(sing, c, count);
  if (s) {
    triangleRule(Cell{2, {c.vertices[0], c.vertices[1], c.vertices[2]}}, w, degree, tol, rule);
    triangleRule(Cell{2, {c.vertices[0], c.vertices[2], c.vertices[3]}}, w, degree, tol, rule);
    return;
  }
  const double xa = c.vertices[0].x, xb = c.vertices[2].x, ya = c.vertices[0].y, yb = c.vertices[2].y;
  const bool smooth = w.isConstant();
  const int n = pointsFor(degree) + (smooth ? 0 : 4);
  Rule1D rx = legendreOn(n, xa, xb);
  const Singularity* face = nullptr;
  for (const auto& f : sing)
    if (f.type == Singularity::Type::Face && f.location.y >= ya && f.location.y <= yb) face = &f;
  if (!face) {
    Rule1D ry = legendreOn(n, ya, yb);
    for (std::size_t j = 0; j < ry.x.size(); ++j)
      for (std::size_t i = 0; i < rx.x.size(); ++i) {
        const Point x{rx.x[i], ry.x[j]};
        rule.points.push_back({x, rx.w[i] * ry.w[j] * w(x)});
      }
    return;
  }
  rule.adapted = true;
  const double f0 = face->location.y;
  const auto pf = asPurePower(w);
  Rule1D rxPlain = legendreOn(pointsFor(degree), xa, xb);
  for (auto [lo, hi] : {std::pair{ya, f0}, std::pair{f0, yb}}) {
    if (hi <= lo) continue;
    const double dir = (lo == f0) ? 1.0 : -1.0;
    std::vector<std::pair<double, double>> pts;
    if (pf) {
      radialRule1D(hi - lo, pf, nullptr, nullptr, pointsFor(degree), tol, pts);
      for (auto [eta, wt] : pts)
        for (std::size_t i = 0; i < rxPlain.x.size(); ++i)
          rule.points.push_back({{rxPlain.x[i], f0 + dir * eta}, wt * rxPlain.w[i]});
      continue;
    }
    // weight varies in x too: dyadic panels in the distance to the face
    Rule1D pts1 = legendreOn(kSingularRuleOrder, 0.0, 1.0);
    double total = 0.0, top = hi - lo;
    for (int level = 0; level < kDyadicLevelCap; ++level) {
      const double bottom = 0.5 * top;
      double panel = 0.0;
      for (std::size_t k = 0; k < pts1.x.size(); ++k) {
        const double eta = bottom + (top - bottom) * pts1.x[k];
        for (std::size_t i = 0; i < rx.x.size(); ++i) {
          const Point x{rx.x[i], f0 + dir * eta};
          const double wt = (top - bottom) * pts1.w[k] * rx.w[i] * w(x);
          rule.points.push_back({x, wt});
          panel += wt;
        }
      }
      total += panel;
      top = bottom;
      if (panel < tol * total) break;
    }
    const double y1 = f0 + dir * top;
    Cell core{2, {{xa, std::min(f0, y1)}, {xb, std::min(f0, y1)}, {xb, std::max(f0, y1)}, {xa, std::max(f0, y1)}}};
    rule.points.push_back({core.centroid(), weightedMeasure(w, core, tol)});
  }
}

}  // namespace

ElementRule cellRule(const Cell& c, const Weight& w, int degree, double tol) {
  require(degree >= 1, ErrorCode::InvalidArgument, "exactness degree must be >= 1");
  if (c.dim == 1) {
    return intervalRule(std::min(c.vertices[0].x, c.vertices[1].x), std::max(c.vertices[0].x, c.vertices[1].x), w,
                        degree, tol);
  }
  ElementRule rule;
  if (c.vertices.size() == 3) triangleRule(c, w, degree, tol, rule);
  else if (c.vertices.size() == 4) rectangleRule(c, w, degree, tol, rule);
  else throw Error(ErrorCode::UnsupportedDomain, "cells must be intervals, triangles or rectangles");
  return rule;
}

QuadratureRule buildRule(const Mesh& mesh, const Weight& w, int degree, double tol, Execution exec) {
  require(w.dim() == mesh.dim(), ErrorCode::InvalidArgument, "weight and mesh dimensions differ");
  QuadratureRule rule;
  rule.degree = degree;
  rule.weight = w;
  rule.elements.resize(mesh.numElements());
  forEachIndex(mesh.numElements(), exec, [&](int e) { rule.elements[e] = cellRule(mesh.cell(e), w, degree, tol); });
  return rule;
}

double integrateOver(const std::function<double(int, Point)>& g, const Mesh& mesh, const QuadratureRule& rule,
                     const std::vector<int>* elements, Execution exec) {
  const int n = elements ? static_cast<int>(elements->size()) : mesh.numElements();
  std::vector<double> part(n, 0.0);
  forEachIndex(n, exec, [&](int i) {
    const int e = elements ? (*elements)[i] : i;
    double s = 0.0;
    for (const auto& q : rule[e].points) s += q.w * g(e, q.x);
    part[i] = s;
  });
  return orderedSum(part);
}

std::vector<double> elementSeminormPowers(const Field& f, double p, int k, const Mesh& mesh,
                                          const QuadratureRule& rule, const std::vector<int>* elements,
                                          Execution exec) {
  if (k > f.maxOrder) {
    throw Error(ErrorCode::DerivativeUnavailable,
                "seminorm of order " + std::to_string(k) + " needs derivatives the function does not supply");
  }
  const auto kappas = multiIndicesOfOrder(mesh.dim(), k);
  const int n = elements ? static_cast<int>(elements->size()) : mesh.numElements();
  std::vector<double> part(n, 0.0);
  forEachIndex(n, exec, [&](int i) {
    const int e = elements ? (*elements)[i] : i;
    double s = 0.0;
    for (const auto& q : rule[e].points) {
      if (q.w == 0.0) continue;
      for (auto kappa : kappas) s += q.w * std::pow(std::abs(f(e, q.x, kappa)), p);
    }
    part[i] = s;
  });
  return part;
}

double weightedSeminorm(const Field& f, double p, int k, const Mesh& mesh, const QuadratureRule& rule,
                        const std::vector<int>* elements, Execution exec) {
  require(p >= 1.0, ErrorCode::InvalidArgument, "norm exponent must be >= 1");
  return std::pow(orderedSum(elementSeminormPowers(f, p, k, mesh, rule, elements, exec)), 1.0 / p);
}

double weightedLpNorm(const Field& f, double p, const Mesh& mesh, const QuadratureRule& rule,
                      const std::vector<int>* elements, Execution exec) {
  return weightedSeminorm(f, p, 0, mesh, rule, elements, exec);
}

double weightedSobolevNorm(const Field& f, double p, int k, const Mesh& mesh, const QuadratureRule& rule,
                           const std::vector<int>* elements, Execution exec) {
  double s = 0.0;
  for (int l = 0; l <= k; ++l) s += std::pow(weightedSeminorm(f, p, l, mesh, rule, elements, exec), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace muckfem
