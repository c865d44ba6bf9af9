#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "muckfem/error.hpp"
#include "muckfem/interp.hpp"

using namespace muckfem;

namespace {

constexpr double kPi = std::numbers::pi;

SmoothFunction linear2D(double a, double b, double c) {
  Polynomial p(2, 1, {0, 0});
  p.coefficient({0, 0}) = a;
  p.coefficient({1, 0}) = b;
  p.coefficient({0, 1}) = c;
  return SmoothFunction::fromPolynomial(p);
}

SmoothFunction quadratic2D() {
  Polynomial p(2, 2, {0.5, 0.5});
  int c = 1;
  for (auto a : p.exponents()) p.coefficient(a) = std::cos(1.0 * c++);
  return SmoothFunction::fromPolynomial(p);
}

}  // namespace

TEST(FESpace, PartitionOfUnityAndNodalDelta) {
  Mesh tri = Mesh::buildSimplicial(Domain::unitSquare(), 0.3);
  Mesh ten = Mesh::buildTensor({uniformPartition(0, 1, 3), {0.0, 0.2, 0.7, 1.0}});
  Mesh one = Mesh::buildTensor({{0.0, 0.1, 0.5, 1.0}});
  const std::vector<std::pair<const Mesh*, int>> cases{{&tri, 1}, {&tri, 2}, {&ten, 1}, {&one, 1}, {&one, 2}};
  for (auto [mesh, deg] : cases) {
    FESpace V(*mesh, deg);
    for (int e = 0; e < mesh->numElements(); ++e) {
      const auto& d = V.elementDofs(e);
      for (std::size_t l = 0; l < d.size(); ++l)
        for (std::size_t r = 0; r < d.size(); ++r)
          EXPECT_NEAR(V.basis(e, static_cast<int>(l), V.dof(d[r])), l == r ? 1.0 : 0.0, 1e-12);
      const Point c = mesh->cell(e).centroid();
      double s = 0.0, gx = 0.0;
      for (std::size_t l = 0; l < d.size(); ++l) {
        s += V.basis(e, static_cast<int>(l), c);
        gx += V.basis(e, static_cast<int>(l), c, {1, 0});
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
      EXPECT_NEAR(gx, 0.0, 1e-10);
    }
  }
  // Euler: edges = nodes + triangles - 1
  EXPECT_EQ(FESpace(tri, 2).numDofs(), 2 * tri.numNodes() + tri.numElements() - 1);
  EXPECT_THROW(FESpace(ten, 2), Error);
}

TEST(FEFunction, EvaluationIdentities) {
  Mesh tri = Mesh::buildSimplicial(Domain::unitSquare(), 0.3);
  FESpace V(tri, 1);
  FEFunction f(V);
  for (int i = 0; i < V.numDofs(); ++i) f.coefficients()[i] = 1.0 + 2.0 * V.dof(i).x - 3.0 * V.dof(i).y;
  EXPECT_NEAR(f.evaluate({0.37, 0.81}), 1.0 + 0.74 - 2.43, 1e-12);
  EXPECT_NEAR(f.gradientAt({0.37, 0.81}).x, 2.0, 1e-12);
  EXPECT_NEAR(f.gradientAt({0.37, 0.81}).y, -3.0, 1e-12);
  EXPECT_THROW(f.evaluate({1.5, 0.5}), Error);
  Mesh ten = Mesh::buildTensor({uniformPartition(0, 1, 3), {0.0, 0.2, 0.7, 1.0}});
  FESpace Q(ten, 1);
  FEFunction g(Q);
  for (int i = 0; i < Q.numDofs(); ++i) g.coefficients()[i] = Q.dof(i).x * Q.dof(i).y;
  EXPECT_NEAR(g.evaluate({0.41, 0.33}), 0.41 * 0.33, 1e-12);
  for (int i = 0; i < Q.numDofs(); ++i) EXPECT_NEAR(g.evaluate(Q.dof(i)), g[i], 1e-15);
  std::ostringstream os;
  g.dumpCsv(os);
  EXPECT_EQ(os.str().substr(0, 14), "dof,x,y,value\n");
}

TEST(QuasiInterpolant, ZeroLinearityBoundary) {
  Mesh tri = Mesh::buildSimplicial(Domain::unitSquare(), 0.2);
  FESpace V(tri, 1);
  QuasiInterpolant Pi(V);
  FEFunction z = Pi.apply(SmoothFunction::constant(2, 0.0));
  for (double c : z.coefficients()) EXPECT_EQ(c, 0.0);
  const SmoothFunction u = functions::sinProduct();
  const SmoothFunction w = functions::exponential(2);
  FEFunction a = Pi.apply(u), b = Pi.apply(w), ab = Pi.apply(u * 2.0 + w * (-0.5));
  for (int i = 0; i < V.numDofs(); ++i) {
    EXPECT_NEAR(ab[i], 2.0 * a[i] - 0.5 * b[i], 1e-12);
    if (V.onBoundary(i)) EXPECT_EQ(b[i], 0.0);
  }
  // serial and parallel agree bitwise
  FEFunction bs = Pi.apply(w, Execution::Serial);
  EXPECT_EQ(bs.coefficients(), b.coefficients());
}

TEST(QuasiInterpolant, InteriorReproduction) {
  Mesh tri = Mesh::buildSimplicial(Domain::unitSquare(), 0.2);
  for (int deg : {1, 2}) {
    FESpace V(tri, deg);
    const SmoothFunction v = deg == 1 ? linear2D(0.3, -1.0, 2.0) : quadratic2D();
    FEFunction F = quasiInterpolate(v, V);
    QuadratureRule rule = buildRule(tri, Weight::constant(2), 2 * deg + 2);
    int interior = 0;
    for (const auto& r : localErrorTable(v, F, rule, 2.0, 0))
      if (!r.touchesBoundary) {
        ++interior;
        EXPECT_LT(r.error, 1e-9);
      }
    EXPECT_GT(interior, 0);
  }
  Mesh ten = Mesh::buildTensor({uniformPartition(0, 1, 6), {0.0, 0.1, 0.3, 0.45, 0.7, 0.85, 1.0}});
  FESpace Q(ten, 1);
  const SmoothFunction v = linear2D(0.3, -1.0, 2.0);
  FEFunction F = quasiInterpolate(v, Q);
  QuadratureRule rule = buildRule(ten, Weight::constant(2), 4);
  for (const auto& r : localErrorTable(v, F, rule, 2.0, 1))
    if (!r.touchesBoundary) EXPECT_LT(r.error, 1e-9);
}

TEST(QuasiInterpolant, NodalValuesOneDimensional) {
  Mesh m = Mesh::buildTensor({uniformPartition(0, 1, 8)});
  FESpace V(m, 1);
  QuasiInterpolant Pi(V);
  const SmoothFunction v = functions::sinPi(1);
  FEFunction F = Pi.apply(v);
  for (int i = 1; i < 8; ++i) {
    const Point z = V.dof(i);
    EXPECT_LT(std::abs(F[i] - v(z)), kPi * kPi / 4.0 / 64.0);
    // trapezoid oracle for the averaged first order Taylor polynomial at z
    const RescaledBump psi = Pi.bumpAt(i);
    const double a = psi.halfAxes().x;
    const int n = 100000;
    double t = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double x = z.x - a + 2 * a * j / n;
      const double p1 = std::sin(kPi * x) + kPi * std::cos(kPi * x) * (z.x - x);
      t += (j == 0 || j == n ? 0.5 : 1.0) * p1 * psi({x, 0});
    }
    EXPECT_NEAR(F[i], t * 2 * a / n, 1e-9);
  }
}

TEST(QuasiInterpolant, FiniteElementInput) {
  Mesh m = Mesh::buildTensor({uniformPartition(0, 1, 8)});
  FESpace V(m, 1);
  FEFunction f(V);
  for (int i = 0; i < V.numDofs(); ++i) f.coefficients()[i] = V.dof(i).x * (1 - V.dof(i).x);
  FEFunction g = QuasiInterpolant(V).apply(f);
  for (int i = 1; i < 8; ++i) EXPECT_NEAR(g[i], f[i], 1e-3);
}

TEST(ErrorTables, BoundedRatiosAndRates) {
  const SmoothFunction v = functions::sinProduct();
  const Weight w = Weight::power(2, {0.5, 0.5}, 0.5);
  double prevMax = 0.0, prevErr = 0.0, prevH = 0.0;
  for (double h : {0.25, 0.125, 0.0625}) {
    Mesh mesh = Mesh::buildSimplicial(Domain::unitSquare(), h * std::sqrt(2.0));
    FESpace V(mesh, 1);
    FEFunction F = quasiInterpolate(v, V);
    QuadratureRule rule = buildRule(mesh, w, 4);
    double mx = 0.0;
    for (const auto& r : localErrorTable(v, F, rule, 2.0, 1)) mx = std::max(mx, r.ratio);
    const GlobalError g = globalError(v, F, rule, 2.0, 1);
    if (prevMax > 0) {
      EXPECT_LT(mx, 2.0 * prevMax);
      EXPECT_NEAR(std::log(prevErr / g.plain) / std::log(prevH / h), 1.0, 0.2);
    }
    prevMax = mx;
    prevErr = g.plain;
    prevH = h;
  }
}

TEST(ErrorTables, AdditivityAndSampledRejection) {
  Mesh mesh = Mesh::buildSimplicial(Domain::unitSquare(), 0.25);
  FESpace V(mesh, 1);
  const SmoothFunction v = functions::sinProduct();
  FEFunction F = quasiInterpolate(v, V);
  QuadratureRule rule = buildRule(mesh, Weight::constant(2), 4);
  std::vector<int> a, b;
  for (int e = 0; e < mesh.numElements(); ++e) (e % 3 ? a : b).push_back(e);
  const double all = globalError(v, F, rule, 2.0, 0).plain;
  const double pa = globalError(v, F, rule, 2.0, 0, &a).plain;
  const double pb = globalError(v, F, rule, 2.0, 0, &b).plain;
  EXPECT_NEAR(all * all, pa * pa + pb * pb, 1e-14);
  const SmoothFunction s = SmoothFunction::sampled(2, [v](Point x) { return v(x); });
  EXPECT_NO_THROW(quasiInterpolate(s, V));
  try {
    localErrorTable(s, F, rule, 2.0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DerivativeUnavailable);
  }
}

TEST(DifferentMetrics, PairsAndReduction) {
  Mesh mesh = Mesh::buildSimplicial(Domain::unitSquare(), 0.25);
  FESpace V(mesh, 1);
  const SmoothFunction v = functions::sinProduct();
  FEFunction F = quasiInterpolate(v, V);
  QuadratureRule one = buildRule(mesh, Weight::constant(2), 4);
  const MetricsError me = differentMetricsError(v, F, one, 2.0, one, 2.0, 0);
  const auto rows = localErrorTable(v, F, one, 2.0, 0);
  for (std::size_t e = 0; e < rows.size(); ++e) EXPECT_NEAR(me.rows[e].error, rows[e].error, 1e-15);
  const Weight varpi = Weight::diracLog(2, {0.5, 0.5}, std::sqrt(2.0));
  QuadratureRule inv = buildRule(mesh, Weight::reciprocal(varpi), 4);
  EXPECT_NO_THROW(differentMetricsError(v, F, inv, 2.0, one, 2.0, 0));
  QuadratureRule pw = buildRule(mesh, Weight::power(2, {0.5, 0.5}, 0.5), 4);
  EXPECT_NO_THROW(differentMetricsError(v, F, pw, 2.0, pw, 2.0, 1));
  try {
    differentMetricsError(v, F, one, 2.0, inv, 2.0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedPair);
  }
  EXPECT_TRUE(isSupportedPair(Weight::constant(2), Weight::extension(2, -0.5)));
}

TEST(DifferentMetrics, CompatibilityProbe) {
  const std::vector<double> radii{1.0, 0.5, 0.25, 0.125, 0.0625};
  EXPECT_NEAR(compatibilityProbe(Weight::constant(2), 2, Weight::constant(2), 2, {0, 0}, radii), 1.0, 1e-12);
  const Weight varpi = Weight::diracLog(2, {0, 0}, 1.0);
  const double c = compatibilityProbe(Weight::reciprocal(varpi), 2, Weight::constant(2), 2, {0, 0}, radii);
  EXPECT_TRUE(std::isfinite(c));
  EXPECT_LT(c, 10.0);
  const Weight pw = Weight::power(2, {0, 0}, 0.5);
  EXPECT_LE(compatibilityProbe(pw, 2, pw, 2, {0, 0}, radii), 1.0 + 1e-12);
}
