#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "muckfem/error.hpp"
#include "muckfem/fem.hpp"

using namespace muckfem;

namespace {

constexpr double kPi = std::numbers::pi;

int nodeAt(const FESpace& V, Point p) {
  for (int i = 0; i < V.numDofs(); ++i)
    if (distance(V.dof(i), p) < 1e-12) return i;
  return -1;
}

}  // namespace

TEST(Assembly, ClassicalTridiagonal) {
  Mesh m = Mesh::buildTensor({uniformPartition(0, 1, 8)});
  FESpace V(m, 1);
  EllipticProblem p;
  p.space = &V;
  LinearSystem sys = assemble(p);
  const double h = 0.125;
  for (int i = 1; i < 8; ++i) {
    EXPECT_NEAR(sys.A.coeff(i, i), 2.0 / h, 1e-12);
    if (i > 1) EXPECT_NEAR(sys.A.coeff(i, i - 1), -1.0 / h, 1e-12);
  }
  EXPECT_EQ(sys.A.coeff(0, 0), 1.0);
  EXPECT_EQ(sys.A.coeff(0, 1), 0.0);
  std::ostringstream os;
  writeMatrixMarket(os, sys.A);
  EXPECT_EQ(os.str().rfind("%%MatrixMarket", 0), 0u);
}

TEST(Assembly, JacobiColumnIntegral) {
  for (double a : {-0.5, 0.5}) {
    const double h = 0.3;
    Mesh m = Mesh::buildTensor({{0.0, 1.0}, {0.0, h}});
    QuadratureRule r = buildRule(m, Weight::extension(2, a, 0.0), 2);
    double s = 0.0;
    for (auto& q : r[0].points) s += q.w * (1 - q.x.y / h) * (1 - q.x.y / h);
    EXPECT_NEAR(s, std::pow(h, 1 + a) * 2.0 / ((1 + a) * (2 + a) * (3 + a)), 1e-14);
  }
}

TEST(Assembly, SymmetryAndDiracLoad) {
  Mesh m = Mesh::buildSimplicial(Domain::unitSquare(), 0.2);
  FESpace V(m, 1);
  EllipticProblem p;
  p.space = &V;
  p.omega = Weight::power(2, {0.5, 0.5}, 0.5);
  p.load = EllipticProblem::Load::Dirac;
  p.diracPoint = {0.37, 0.61};
  LinearSystem sys = assemble(p);
  Eigen::SparseMatrix<double> d = sys.A - Eigen::SparseMatrix<double>(sys.A.transpose());
  EXPECT_LE(d.coeffs().cwiseAbs().maxCoeff(), 1e-12 * sys.A.coeffs().cwiseAbs().maxCoeff());
  EXPECT_NEAR(sys.b.sum(), 1.0, 1e-12);
  EXPECT_EQ((sys.b.array() != 0.0).count(), 3);
  p.diracPoint = {0.0, 0.5};
  try {
    assemble(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointOnBoundary);
  }
}

TEST(Solve, IdentityPoissonAndIndefinite) {
  Mesh m = Mesh::buildTensor({uniformPartition(0, 1, 32)});
  FESpace V(m, 1);
  SmoothFunction f(1, 2, [](Point x, MultiIndex k) {
    return kPi * kPi * std::pow(kPi, k.i) * (k.i % 2 ? (k.i % 4 == 1 ? 1 : -1) * std::cos(kPi * x.x)
                                                      : (k.i % 4 == 0 ? 1 : -1) * std::sin(kPi * x.x));
  });
  FEFunction U = solveWeightedElliptic(Weight::constant(1), f, std::nullopt, V);
  for (int i = 0; i < V.numDofs(); ++i) EXPECT_NEAR(U[i], std::sin(kPi * V.dof(i).x), 2e-3);
  EXPECT_EQ(U[0], 0.0);
  FEFunction Ucg = solveWeightedElliptic(Weight::constant(1), f, std::nullopt, V, {SolverMethod::CG, 1e-12});
  for (int i = 0; i < V.numDofs(); ++i) EXPECT_NEAR(U[i], Ucg[i], 1e-9);

  Mesh two = Mesh::buildTensor({{0.0, 1.0}});
  FESpace W(two, 1, 0u);
  LinearSystem sys;
  sys.A.resize(2, 2);
  std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {1, 1, 1.0}};
  sys.A.setFromTriplets(t.begin(), t.end());
  sys.b = Eigen::Vector2d(3.0, -4.0);
  sys.constrained = {0, 0};
  FEFunction x = solve(sys, W);
  EXPECT_DOUBLE_EQ(x[0], 3.0);
  EXPECT_DOUBLE_EQ(x[1], -4.0);
  t = {{0, 0, 1.0}, {1, 1, -1.0}};
  sys.A.setFromTriplets(t.begin(), t.end());
  try {
    solve(sys, W);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
  }
}

TEST(Solve, ConvectionSmoke) {
  Mesh m = Mesh::buildTensor({uniformPartition(0, 1, 16)});
  FESpace V(m, 1);
  EllipticProblem p;
  p.space = &V;
  p.convection = [](Point) { return Point{1.0, 0.0}; };
  p.reaction = [](Point) { return 1.0; };
  p.load = EllipticProblem::Load::Source;
  p.source = SmoothFunction::constant(1, 1.0);
  LinearSystem sys = assemble(p);
  EXPECT_FALSE(sys.symmetric);
  FEFunction U = solve(sys, V);
  EXPECT_LT(galerkinResidual(sys, U), 1e-12);
  EXPECT_GT(U[8], 0.0);
}

TEST(WeightedElliptic, ManufacturedOneDimensional) {
  const Weight w = Weight::power(1, {0, 0}, 0.5);
  const SmoothFunction ft = SmoothFunction::fromPolynomial([] {
    Polynomial p(1, 1, {0, 0});
    p.coefficient({0, 0}) = -0.5;
    p.coefficient({1, 0}) = 3.0;
    return p;
  }());
  const SmoothFunction u = functions::bubble1D();
  double prev = 0.0;
  for (int n : {8, 16, 32, 64}) {
    Mesh m = Mesh::buildTensor({uniformPartition(0, 1, n)});
    FESpace V(m, 1);
    EllipticProblem p;
    p.space = &V;
    p.omega = w;
    p.load = EllipticProblem::Load::Source;
    p.source = ft;
    p.sourceWeight = Weight::power(1, {0, 0}, -0.5);
    LinearSystem sys = assemble(p);
    FEFunction U = solve(sys, V);
    EXPECT_LT(galerkinResidual(sys, U), 1e-9);
    QuadratureRule rule = buildRule(m, w, 6);
    const double e = weightedSeminorm(difference(toField(u), U.toField()), 2, 1, m, rule);
    const double ei = weightedSeminorm(difference(toField(u), quasiInterpolate(u, V).toField()), 2, 1, m, rule);
    EXPECT_LE(e, ei + 1e-10);
    if (prev > 0) EXPECT_NEAR(std::log2(prev / e), 1.0, 0.1);
    prev = e;
  }
}

TEST(Dirac, SquareSymmetry) {
  Mesh m = Mesh::buildSimplicial(Domain::unitSquare(), std::sqrt(2.0) / 8);
  FESpace V(m, 1);
  FEFunction U = solveDirac({0.5, 0.5}, V);
  for (int i = 0; i < V.numDofs(); ++i) {
    const Point p = V.dof(i);
    for (Point q : {Point{1 - p.x, p.y}, Point{p.x, 1 - p.y}, Point{p.y, p.x}, Point{1 - p.y, 1 - p.x}}) {
      const int j = nodeAt(V, q);
      ASSERT_GE(j, 0);
      EXPECT_NEAR(U[i], U[j], 1e-10);
    }
  }
  Mesh fine = m.refineUniform();
  FESpace Vf(fine, 1);
  FEFunction Uf = solveDirac({0.5, 0.5}, Vf);
  EXPECT_GT(nestedL2Difference(U, Uf), 0.0);
  EXPECT_NEAR(nestedL2Difference(Uf, Uf), 0.0, 1e-14);
}

TEST(Fractional, ConstantAndExtension) {
  EXPECT_NEAR(extensionConstant(0.5), 1.0, 1e-14);
  for (double s : {0.25, 0.75}) {
    const double a = 1 - 2 * s;
    SmoothFunction ext = exactExtension({1.0}, s);
    const double amp = std::pow(kPi, -2 * s);
    EXPECT_NEAR(ext({0.5, 0.0}), amp, 1e-14);
    const double y = 1e-12;
    // -y^alpha d/dy of the extension at the face recovers d_s lambda^s u
    EXPECT_NEAR(-std::pow(y, a) * ext.derivative({0.5, y}, {0, 1}) / (amp * std::pow(kPi, 2 * s)),
                extensionConstant(s), 1e-4);
    const double e = 1e-6;
    Point x{0.3, 0.4};
    EXPECT_NEAR(ext.derivative(x, {0, 1}), (ext({0.3, 0.4 + e}) - ext({0.3, 0.4 - e})) / (2 * e), 1e-7);
  }
}

TEST(Fractional, OracleAndHalfLaplacian) {
  const SpectralOracle o = spectralOracle({1.0, 1.0}, 0.5);
  EXPECT_NEAR(o.sineCoefficients[0], 1 / kPi, 1e-15);
  EXPECT_NEAR(o.sineCoefficients[1], 1 / (2 * kPi), 1e-15);
  const SpectralOracle q = spectralOracle(functions::sinPi(1), 0.5, 4);
  EXPECT_NEAR(q.sineCoefficients[0], 1 / kPi, 1e-12);
  EXPECT_NEAR(q.sineCoefficients[1], 0.0, 1e-12);
  // s = 1: -u'' = x (1 - x) has u = x/12 - x^3/6 + x^4/12
  const SpectralOracle c = spectralOracle(functions::bubble1D(), 1.0, 200);
  EXPECT_NEAR(c.u({0.3, 0}), 0.3 / 12 - 0.027 / 6 + 0.0081 / 12, 1e-8);

  ExtensionProblem p;
  p.s = 0.5;
  p.Nx = 32;
  p.M = 32;
  p.Y = 6.0;
  p.gamma = 3.0 / (1 - p.alpha()) + 0.1;
  auto f = [](double x) { return std::sin(kPi * x); };
  FractionalSolution sol = solveFractional(p, f);
  EXPECT_NEAR(sol.trace.evaluate({0.5, 0}), 1 / kPi, 5e-3);
  p.gamma = 2.0;
  EXPECT_THROW(solveFractional(p, f), Error);
}

TEST(Fractional, UnitWeightMatchesUnweighted) {
  Mesh m = Mesh::buildTensor({uniformPartition(0, 1, 4), gradedPartition(2.0, 4, 2.0).points});
  FESpace V(m, 1, Left | Right | Top);
  EllipticProblem a, b;
  a.space = b.space = &V;
  a.omega = Weight::extension(2, 0.0, 0.0);
  b.omega = Weight::constant(2);
  Eigen::SparseMatrix<double> d = assemble(a).A - assemble(b).A;
  EXPECT_EQ(d.coeffs().cwiseAbs().maxCoeff(), 0.0);
}
