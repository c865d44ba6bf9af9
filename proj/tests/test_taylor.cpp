#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "muckfem/error.hpp"
#include "muckfem/taylor.hpp"

using namespace muckfem;

namespace {

int nodeAt(const Mesh& m, Point p) {
  for (int i = 0; i < m.numNodes(); ++i)
    if (distance(m.node(i), p) < 1e-12) return i;
  return -1;
}

SmoothFunction poly2D() {
  Polynomial p(2, 2, {0.3, -0.2});
  p.coefficient({0, 0}) = 1.5;
  p.coefficient({1, 0}) = -2.0;
  p.coefficient({0, 1}) = 0.7;
  p.coefficient({2, 0}) = 3.0;
  p.coefficient({1, 1}) = -1.1;
  p.coefficient({0, 2}) = 0.4;
  return SmoothFunction::fromPolynomial(p);
}

}  // namespace

TEST(Bump, UnitMass) {
  for (int d : {1, 2})
    for (double r : {0.5, 1.0, 2.7}) {
      Bump b(d, r);
      double s = 0.0;
      for (auto& q : b.massRule()) s += q.w;
      EXPECT_NEAR(s, 1.0, 1e-13);
      double fine = 0.0;
      for (auto& q : b.supportRule()) fine += q.w * b(q.x);
      EXPECT_NEAR(fine, 1.0, 1e-10);
      EXPECT_EQ(b({r * 1.0001, 0.0}), 0.0);
      EXPECT_GT(b({0.0, 0.0}), 0.0);
    }
  Bump b(2, 0.8);
  EXPECT_NEAR(RescaledBump::anisotropic(b, {0.2, 0.3}, {0.01, 0.3}).mass(), 1.0, 1e-10);
  EXPECT_NEAR(RescaledBump::isotropic(b, {0.2, 0.3}, 0.05, 2).mass(), 1.0, 1e-10);
}

TEST(Bump, DerivativesMatchDifferences) {
  Bump b(2, 1.3);
  const Point x{0.31, -0.47};
  const double e = 1e-5;
  auto f = [&](Point y) { return b(y); };
  EXPECT_NEAR(b.derivative(x, {1, 0}), (f({x.x + e, x.y}) - f({x.x - e, x.y})) / (2 * e), 1e-7);
  EXPECT_NEAR(b.derivative(x, {0, 1}), (f({x.x, x.y + e}) - f({x.x, x.y - e})) / (2 * e), 1e-7);
  EXPECT_NEAR(b.derivative(x, {2, 0}), (f({x.x + e, x.y}) - 2 * f(x) + f({x.x - e, x.y})) / (e * e), 1e-4);
  EXPECT_NEAR(b.derivative(x, {1, 1}),
              (f({x.x + e, x.y + e}) - f({x.x + e, x.y - e}) - f({x.x - e, x.y + e}) + f({x.x - e, x.y - e})) /
                  (4 * e * e),
              1e-4);
}

TEST(Taylor, PolynomialExamples) {
  Polynomial p = taylorPoly(functions::exponential(1), {0, 0}, 2);
  EXPECT_NEAR(p.coefficient({0, 0}), 1.0, 1e-15);
  EXPECT_NEAR(p.coefficient({1, 0}), 1.0, 1e-15);
  EXPECT_NEAR(p.coefficient({2, 0}), 0.5, 1e-15);
  SmoothFunction s(1, 5, [](Point x, MultiIndex k) {
    const double v[4] = {std::sin(x.x), std::cos(x.x), -std::sin(x.x), -std::cos(x.x)};
    return v[k.i % 4];
  });
  Polynomial q = taylorPoly(s, {0, 0}, 1);
  EXPECT_NEAR(q.coefficient({0, 0}), 0.0, 1e-15);
  EXPECT_NEAR(q.coefficient({1, 0}), 1.0, 1e-15);
  SmoothFunction v = poly2D();
  Polynomial t = taylorPoly(v, {0.9, 0.1}, 2);
  for (Point y : {Point{0, 0}, Point{1, -1}, Point{0.3, 0.77}}) EXPECT_NEAR(t(y), v(y), 1e-12);
  EXPECT_THROW(taylorPoly(SmoothFunction::sampled(1, [](Point x) { return x.x; }), {0, 0}, 1), Error);
}

TEST(AveragedTaylor, ReproducesPolynomials) {
  Bump b1(1, 1.5), b2(2, 0.9);
  for (int m = 0; m <= 2; ++m) {
    Polynomial p1(1, m, {0.2, 0});
    Polynomial p2(2, m, {0.4, 0.6});
    int c = 1;
    for (auto a : p1.exponents()) p1.coefficient(a) = 0.5 * c++;
    for (auto a : p2.exponents()) p2.coefficient(a) = std::sin(1.0 * c++);
    const auto psi1 = RescaledBump::isotropic(b1, {0.1, 0}, 0.25, m);
    const auto psi2 = RescaledBump::isotropic(b2, {0.5, 0.5}, 0.1, m);
    const auto psi3 = RescaledBump::anisotropic(b2, {0.5, 0.5}, {0.02, 0.2});
    for (bool sampled : {false, true}) {
      SmoothFunction f1 = SmoothFunction::fromPolynomial(p1);
      SmoothFunction f2 = SmoothFunction::fromPolynomial(p2);
      if (sampled) {
        f1 = SmoothFunction::sampled(1, [p1](Point x) { return p1(x); });
        f2 = SmoothFunction::sampled(2, [p2](Point x) { return p2(x); });
      }
      EXPECT_LT(averagedTaylor(f1, psi1, m).maxCoefficientDistance(p1), 1e-9) << m << sampled;
      EXPECT_LT(averagedTaylor(f2, psi2, m).maxCoefficientDistance(p2), 1e-9) << m << sampled;
      EXPECT_LT(averagedTaylor(f2, psi3, m).maxCoefficientDistance(p2), 1e-9) << m << sampled;
    }
  }
}

TEST(AveragedTaylor, ConstantAndMeanOfSquare) {
  Bump b(1, 1.0);
  const auto psi = RescaledBump::isotropic(b, {0.3, 0}, 0.4, 0);
  Polynomial c = averagedTaylor(SmoothFunction::constant(1, 2.5), psi, 2);
  EXPECT_NEAR(c.coefficient({0, 0}), 2.5, 1e-13);
  EXPECT_NEAR(c.coefficient({1, 0}), 0.0, 1e-12);
  SmoothFunction sq(1, 3, [](Point x, MultiIndex k) { return k.i == 0 ? x.x * x.x : k.i == 1 ? 2 * x.x : k.i == 2 ? 2.0 : 0.0; });
  const double q = averagedTaylor(sq, psi, 0).coefficient({0, 0});
  // trapezoid over the support (0.3 - 0.4, 0.3 + 0.4)
  const int n = 200000;
  double t = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -0.1 + 0.8 * i / n;
    t += (i == 0 || i == n ? 0.5 : 1.0) * x * x * psi({x, 0});
  }
  t *= 0.8 / n;
  EXPECT_NEAR(q, t, 1e-9);
}

TEST(AveragedTaylor, DerivativeCommutes) {
  Bump b1(1, 2.0);
  const auto psi = RescaledBump::isotropic(b1, {0.0, 0}, 0.5, 2);
  auto [l, r] = derivativeCommutes(functions::exponential(1), psi, 2, {1, 0});
  EXPECT_LT(l.maxCoefficientDistance(r), 1e-8);
  Bump b2(2, 0.7);
  for (int m = 0; m <= 2; ++m) {
    const auto psi2 = RescaledBump::isotropic(b2, {0.4, 0.45}, 0.3, m);
    for (auto a : multiIndicesUpTo(2, m)) {
      auto [l2, r2] = derivativeCommutes(functions::sinProduct(), psi2, m, a);
      EXPECT_LT(l2.maxCoefficientDistance(r2), 1e-8);
      if (a.order() == m) EXPECT_EQ(l2.degree(), 0);
    }
  }
}

TEST(AveragedTaylor, SampledRouteMatchesSmooth) {
  Bump b(2, 0.8);
  const auto psi = RescaledBump::isotropic(b, {0.2, 0.1}, 0.2, 2);
  SmoothFunction v = functions::exponential(2);
  SmoothFunction s = SmoothFunction::sampled(2, [v](Point x) { return v(x); });
  EXPECT_LT(averagedTaylor(v, psi, 2).maxCoefficientDistance(averagedTaylor(s, psi, 2)), 1e-8);
}

TEST(AveragedTaylor, SupportVerification) {
  Mesh m = Mesh::buildSimplicial(Domain::unitSquare(), 0.25);
  const int z = nodeAt(m, {0.5, 0.5});
  ASSERT_GE(z, 0);
  Star st = m.star(z);
  std::vector<BumpSite> sites;
  for (int i = 0; i < m.numNodes(); ++i)
    if (!m.isBoundary(i)) sites.push_back({m.node(i), m.star(i).elements, m.star(i).h});
  for (int deg = 0; deg <= 2; ++deg) {
    const double r = calibrateBumpRadius(m, sites, deg);
    Bump b(2, r);
    for (auto& s : sites) {
      const auto psi = RescaledBump::isotropic(b, s.z, s.h, deg);
      EXPECT_NO_THROW(psi.verifySupport(m, s.elements));
      EXPECT_LT(psi.leakedMass(m, s.elements), 1e-12);
      EXPECT_NEAR(psi.mass(), 1.0, 1e-10);
    }
    Bump big(2, 2.0 * r / 0.9);
    EXPECT_THROW(RescaledBump::isotropic(big, st.h > 0 ? m.node(z) : Point{}, st.h, deg).verifySupport(m, st.elements),
                 Error);
  }
  Mesh t = Mesh::buildTensor({uniformPartition(0, 1, 4), uniformPartition(0, 1, 8)});
  const int zt = nodeAt(t, {0.5, 0.5});
  Star s2 = t.star(zt);
  Bump b(2, 0.9);
  const auto psi = RescaledBump::anisotropic(b, t.node(zt), s2.hAxis);
  EXPECT_NO_THROW(psi.verifySupport(t, s2.elements));
  EXPECT_LT(psi.leakedMass(t, s2.elements), 1e-12);
}

TEST(AveragedTaylor, StabilityProbe) {
  Bump b(1, 0.9);
  double prev = -1.0;
  for (int n : {8, 16}) {
    Mesh mesh = Mesh::buildTensor({uniformPartition(-1, 1, n)});
    const int z = nodeAt(mesh, {0, 0});
    Star st = mesh.star(z);
    QuadratureRule rule = buildRule(mesh, Weight::constant(1), 6);
    const auto psi = RescaledBump::isotropic(b, {0, 0}, st.h, 0);
    StabilityProbe one = stabilityProbe(SmoothFunction::constant(1, 1.0), psi, 0, 0, Weight::constant(1), 2.0, mesh,
                                        st, rule);
    EXPECT_NEAR(one.lhs, 1.0, 1e-10);
    SmoothFunction x(1, 3, [](Point p, MultiIndex k) { return k.i == 0 ? p.x : k.i == 1 ? 1.0 : 0.0; });
    const auto psi1 = RescaledBump::isotropic(b, {0, 0}, st.h, 1);
    StabilityProbe lin = stabilityProbe(x, psi1, 1, 1, Weight::constant(1), 2.0, mesh, st, rule);
    if (prev > 0) EXPECT_NEAR(lin.ratio(), prev, 1e-8);
    prev = lin.ratio();
  }
}

TEST(Poincare, DilationRelation) {
  std::vector<SmoothFunction> samples{
      SmoothFunction::fromPolynomial([] {
        Polynomial p(1, 3, {0, 0});
        p.coefficient({1, 0}) = 1.0;
        p.coefficient({3, 0}) = -0.5;
        return p;
      }())};
  const Weight w = Weight::power(1, {0, 0}, 0.5);
  Bump b(1, 0.9);
  Mesh ref = Mesh::buildTensor({uniformPartition(-1, 1, 16)});
  QuadratureRule rr = buildRule(ref, w, 8);
  const auto chi = RescaledBump::isotropic(b, {0, 0}, 1.0, 0);
  const double r0 = poincareProbe(ref, rr, 2.0, chi, samples).maxRatio;
  const double a = 0.125;
  Mesh phys = Mesh::buildTensor({uniformPartition(-a, a, 16)});
  QuadratureRule rp = buildRule(phys, w, 8);
  std::vector<SmoothFunction> mapped;
  for (auto& v : samples)
    mapped.emplace_back(1, 3, [v, a](Point x, MultiIndex k) { return v.derivative({x.x / a, 0}, k) / std::pow(a, k.i); });
  const auto chiA = RescaledBump::isotropic(b, {0, 0}, a, 0);
  const double r1 = poincareProbe(phys, rp, 2.0, chiA, mapped).maxRatio;
  EXPECT_NEAR(r1, a * r0, 1e-10 * r1);
}
