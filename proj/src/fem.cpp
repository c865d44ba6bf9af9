#include "muckfem/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <ostream>

#include "muckfem/error.hpp"
#include "muckfem/gauss.hpp"

namespace muckfem {

namespace {

constexpr double kPi = std::numbers::pi;

using Triplet = Eigen::Triplet<double>;

struct LocalSystem {
  std::vector<Triplet> entries;
  std::vector<std::pair<int, double>> load;
};

}  // namespace

LinearSystem assemble(const EllipticProblem& prob, Execution exec) {
  require(prob.space != nullptr, ErrorCode::InvalidArgument, "problem without a space");
  const FESpace& V = *prob.space;
  const Mesh& mesh = V.mesh();
  const int m = V.degree();
  const int n = V.numDofs();
  const int deg = prob.quadratureDegree >= 0 ? prob.quadratureDegree : 2 * m;
  const bool lower = static_cast<bool>(prob.convection) || static_cast<bool>(prob.reaction);

  const QuadratureRule stiff = buildRule(mesh, prob.omega, deg, 1e-10, exec);
  QuadratureRule plain;
  if (lower) plain = buildRule(mesh, Weight::constant(mesh.dim()), 2 * m, 1e-10, exec);
  QuadratureRule loadRule;
  if (prob.load == EllipticProblem::Load::Source) {
    loadRule = buildRule(mesh, prob.sourceWeight ? *prob.sourceWeight : Weight::constant(mesh.dim()), m + 6, 1e-10,
                         exec);
  }

  std::vector<LocalSystem> local(mesh.numElements());
  forEachIndex(mesh.numElements(), exec, [&](int e) {
    const auto& dofs = V.elementDofs(e);
    const int nl = static_cast<int>(dofs.size());
    std::vector<double> K(nl * nl, 0.0), F(nl, 0.0);
    std::vector<double> phi;
    std::vector<Point> grad;
    for (const auto& q : stiff[e].points) {
      V.shape(e, q.x, phi, grad);
      for (int a = 0; a < nl; ++a)
        for (int b = 0; b < nl; ++b) K[a * nl + b] += q.w * dot(grad[a], grad[b]);
    }
    if (lower) {
      for (const auto& q : plain[e].points) {
        V.shape(e, q.x, phi, grad);
        const Point bx = prob.convection ? prob.convection(q.x) : Point{};
        const double cx = prob.reaction ? prob.reaction(q.x) : 0.0;
        for (int a = 0; a < nl; ++a)
          for (int b = 0; b < nl; ++b) K[a * nl + b] += q.w * (dot(bx, grad[b]) * phi[a] + cx * phi[b] * phi[a]);
      }
    }
    if (prob.load == EllipticProblem::Load::Source) {
      for (const auto& q : loadRule[e].points) {
        if (q.w == 0.0) continue;
        V.shape(e, q.x, phi, grad);
        const double f = prob.source(q.x);
        for (int a = 0; a < nl; ++a) F[a] += q.w * f * phi[a];
      }
    } else if (prob.load == EllipticProblem::Load::NeumannTrace) {
      require(V.isTensor(), ErrorCode::InvalidArgument, "trace loads need a 2D tensor mesh");
      const auto& el = mesh.element(e);
      const double y0 = mesh.domain().y0;
      const Point pa = mesh.node(el[0]), pb = mesh.node(el[1]);
      if ((mesh.boundaryFaces(el[0]) & Bottom) && (mesh.boundaryFaces(el[1]) & Bottom)) {
        const Rule1D g = legendreOn(m + 6, pa.x, pb.x);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
          V.shape(e, {g.x[i], y0}, phi, grad);
          const double f = prob.traceScale * prob.traceDatum(g.x[i]);
          for (int a = 0; a < nl; ++a) F[a] += g.w[i] * f * phi[a];
        }
      }
    }
    LocalSystem& out = local[e];
    for (int a = 0; a < nl; ++a) {
      if (V.isConstrained(dofs[a])) continue;
      for (int b = 0; b < nl; ++b)
        if (!V.isConstrained(dofs[b])) out.entries.emplace_back(dofs[a], dofs[b], K[a * nl + b]);
      out.load.emplace_back(dofs[a], F[a]);
    }
  });

  LinearSystem sys;
  sys.symmetric = !prob.convection;
  sys.constrained.assign(n, 0);
  sys.b = Eigen::VectorXd::Zero(n);
  std::vector<Triplet> all;
  for (int i = 0; i < n; ++i)
    if (V.isConstrained(i)) {
      sys.constrained[i] = 1;
      all.emplace_back(i, i, 1.0);
    }
  for (const auto& l : local) {
    all.insert(all.end(), l.entries.begin(), l.entries.end());
    for (auto [i, v] : l.load) sys.b[i] += v;
  }
  if (prob.load == EllipticProblem::Load::Dirac) {
    const Point x0 = prob.diracPoint;
    if (mesh.domain().contains(x0) && mesh.domain().faces(x0) != 0)
      throw Error(ErrorCode::PointOnBoundary, "point source on the boundary");
    const int e = mesh.locate(x0);
    if (e < 0) throw Error(ErrorCode::PointOutsideMesh, "point source outside the domain");
    const auto& dofs = V.elementDofs(e);
    for (std::size_t a = 0; a < dofs.size(); ++a)
      if (!V.isConstrained(dofs[a])) sys.b[dofs[a]] += V.basis(e, static_cast<int>(a), x0);
  }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(all.begin(), all.end());
  sys.A.makeCompressed();
  for (int i = 0; i < n; ++i) {
    const double d = sys.A.coeff(i, i);
    if (!(d > 0.0) || !std::isfinite(d))
      throw Error(ErrorCode::SingularAssembly, "non-positive diagonal entry at DOF " + std::to_string(i));
  }
  return sys;
}

FEFunction solve(const LinearSystem& sys, const FESpace& space, const SolveOptions& opts) {
  const int n = static_cast<int>(sys.b.size());
  Eigen::VectorXd x;
  const bool useCG = opts.method == SolverMethod::CG || (opts.method == SolverMethod::Auto && n > opts.cgThreshold);
  if (useCG) {
    require(sys.symmetric, ErrorCode::InvalidArgument, "CG needs a symmetric system");
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(opts.tol);
    cg.setMaxIterations(50 * n);
    cg.compute(sys.A);
    x = cg.solve(sys.b);
    if (cg.info() != Eigen::Success || !x.allFinite())
      throw Error(ErrorCode::SolverDiverged, "CG did not reach the tolerance in " + std::to_string(50 * n) + " steps");
  } else if (sys.symmetric) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.A);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "matrix is not positive definite");
    x = llt.solve(sys.b);
  } else {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(sys.A);
    lu.factorize(sys.A);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "LU factorization failed");
    x = lu.solve(sys.b);
  }
  if (!x.allFinite()) throw Error(ErrorCode::SingularMatrix, "non-finite solution");
  std::vector<double> c(n);
  for (int i = 0; i < n; ++i) c[i] = sys.constrained[i] ? 0.0 : x[i];
  return FEFunction(space, std::move(c));
}

double galerkinResidual(const LinearSystem& sys, const FEFunction& U) {
  const auto& c = U.coefficients();
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  const Eigen::VectorXd r = sys.A * x - sys.b;
  double rm = 0.0, bm = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (sys.constrained[i]) continue;
    rm = std::max(rm, std::abs(r[i]));
    bm = std::max(bm, std::abs(sys.b[i]));
  }
  return bm > 0.0 ? rm / bm : rm;
}

FEFunction solveWeightedElliptic(const Weight& omega, const SmoothFunction& source, const std::optional<Weight>& sourceWeight,
                                 const FESpace& space, const SolveOptions& opts, Execution exec) {
  EllipticProblem p;
  p.space = &space;
  p.omega = omega;
  p.load = EllipticProblem::Load::Source;
  p.source = source;
  p.sourceWeight = sourceWeight;
  return solve(assemble(p, exec), space, opts);
}

FEFunction solveDirac(Point x0, const FESpace& space, const SolveOptions& opts, Execution exec) {
  EllipticProblem p;
  p.space = &space;
  p.omega = Weight::constant(space.mesh().dim());
  p.load = EllipticProblem::Load::Dirac;
  p.diracPoint = x0;
  return solve(assemble(p, exec), space, opts);
}

double nestedL2Difference(const FEFunction& coarse, const FEFunction& fine, int degree) {
  const Mesh& fm = fine.space().mesh();
  const Mesh& cm = coarse.space().mesh();
  const QuadratureRule rule = buildRule(fm, Weight::constant(fm.dim()), degree, 1e-10, Execution::Serial);
  std::vector<double> parts(fm.numElements());
  forEachIndex(fm.numElements(), defaultExecution(), [&](int e) {
    const int ce = cm.locate(fm.cell(e).centroid());
    if (ce < 0) throw Error(ErrorCode::PointOutsideMesh, "fine mesh does not refine the coarse one");
    double s = 0.0;
    for (const auto& q : rule[e].points) {
      const double d = coarse.onElement(ce, q.x) - fine.onElement(e, q.x);
      s += q.w * d * d;
    }
    parts[e] = s;
  });
  return std::sqrt(orderedSum(parts));
}

double extensionConstant(double s) {
  return std::pow(2.0, 1.0 - 2.0 * s) * boost::math::tgamma(1.0 - s) / boost::math::tgamma(s);
}

FractionalSolution solveFractional(const ExtensionProblem& prob, const std::function<double(double)>& f,
                                   const SolveOptions& opts, Execution exec, std::optional<double> dsOverride) {
  require(prob.s > 0.0 && prob.s < 1.0, ErrorCode::InvalidArgument, "s must lie in (0,1)");
  require(prob.Y > 0.0 && prob.Nx >= 2 && prob.M >= 1, ErrorCode::InvalidArgument, "bad extension discretization");
  const double alpha = prob.alpha();
  if (prob.yPoints.empty() && prob.graded && prob.gamma <= 3.0 / (1.0 - alpha) && !prob.allowSubcriticalGrading)
    throw Error(ErrorCode::InvalidGrading, "grading exponent must exceed 3/(1-alpha) = " +
                                               std::to_string(3.0 / (1.0 - alpha)));
  FractionalSolution out;
  const std::vector<double> ys =
      !prob.yPoints.empty() ? prob.yPoints
      : prob.graded ? gradedPartition(prob.Y, prob.M, prob.gamma).points : uniformPartition(0.0, prob.Y, prob.M);
  out.mesh = std::make_unique<Mesh>(Mesh::buildTensor({uniformPartition(0.0, 1.0, prob.Nx), ys}));
  out.space = std::make_unique<FESpace>(*out.mesh, 1, Left | Right | Top);
  EllipticProblem p;
  p.space = out.space.get();
  p.omega = Weight::extension(2, alpha, 0.0);
  p.load = EllipticProblem::Load::NeumannTrace;
  p.traceDatum = f;
  p.traceScale = dsOverride ? *dsOverride : extensionConstant(prob.s);
  out.system = assemble(p, exec);
  out.U = solve(out.system, *out.space, opts);
  for (char c : out.system.constrained) out.dofs += c ? 0 : 1;
  out.traceMesh = std::make_unique<Mesh>(Mesh::buildTensor({uniformPartition(0.0, 1.0, prob.Nx)}));
  out.traceSpace = std::make_unique<FESpace>(*out.traceMesh, 1);
  std::vector<double> tr(prob.Nx + 1);
  for (int i = 0; i <= prob.Nx; ++i) tr[i] = out.U[i];  // row j = 0 of the tensor numbering
  out.trace = FEFunction(*out.traceSpace, std::move(tr));
  return out;
}

SpectralOracle spectralOracle(const std::vector<double>& fSine, double s) {
  SpectralOracle o;
  for (std::size_t k = 0; k < fSine.size(); ++k)
    o.sineCoefficients.push_back(fSine[k] * std::pow((k + 1) * kPi, -2.0 * s));
  o.u = functions::sineSeries(o.sineCoefficients);
  return o;
}

SpectralOracle spectralOracle(const SmoothFunction& f, double s, int K) {
  // composite Gauss, a few points per half wave of the highest mode
  const int panels = std::max(16, 2 * K);
  const Rule1D g = gaussLegendre(10);
  std::vector<double> xs, ws;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      xs.push_back((p + 0.5 * (g.x[i] + 1.0)) / panels);
      ws.push_back(0.5 * g.w[i] / panels);
    }
  std::vector<double> fx(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fx[i] = f({xs[i], 0});
  std::vector<double> c;
  double energy = 0.0, norm2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) norm2 += ws[i] * fx[i] * fx[i];
  for (int k = 1; k <= K; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) ck += 2.0 * ws[i] * fx[i] * std::sin(k * kPi * xs[i]);
    c.push_back(ck);
    energy += 0.5 * ck * ck;
  }
  SpectralOracle o = spectralOracle(c, s);
  o.remainderBound = std::pow((K + 1) * kPi, -2.0 * s) * std::sqrt(std::max(0.0, norm2 - energy));
  return o;
}

SmoothFunction exactExtension(const std::vector<double>& fSine, double s) {
  const double c = std::pow(2.0, 1.0 - s) / boost::math::tgamma(s);
  auto psi = [c, s](double z) { return z <= 0.0 ? 1.0 : c * std::pow(z, s) * boost::math::cyl_bessel_k(s, z); };
  // (z^s K_s)' = -z^s K_{s-1}
  auto dpsi = [c, s](double z) {
    return z <= 0.0 ? 0.0 : -c * std::pow(z, s) * boost::math::cyl_bessel_k(s - 1.0, z);
  };
  return SmoothFunction(
      2, 1,
      [fSine, s, psi, dpsi](Point x, MultiIndex kappa) {
        double v = 0.0;
        for (std::size_t i = 0; i < fSine.size(); ++i) {
          if (fSine[i] == 0.0) continue;
          const double kp = (i + 1) * kPi;
          const double amp = fSine[i] * std::pow(kp, -2.0 * s);
          const double z = kp * x.y;
          if (z > 700.0) continue;  // K_s underflows
          if (kappa.order() == 0) v += amp * std::sin(kp * x.x) * psi(z);
          else if (kappa.i == 1) v += amp * kp * std::cos(kp * x.x) * psi(z);
          else v += amp * std::sin(kp * x.x) * kp * dpsi(z);
        }
        return v;
      },
      "extension");
}

void writeMatrixMarket(std::ostream& os, const Eigen::SparseMatrix<double>& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  os.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace muckfem
