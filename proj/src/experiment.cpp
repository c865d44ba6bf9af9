#include "muckfem/experiment.hpp"

#include <boost/container_hash/hash.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "muckfem/error.hpp"
#include "muckfem/fem.hpp"
#include "muckfem/interp.hpp"
#include "muckfem/taylor.hpp"

namespace muckfem {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> parseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> splitWords(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string describeSpec(const WeightSpec& w) {
  return w.kind + "(" + fmt(w.center.x) + "," + fmt(w.center.y) + ";" + fmt(w.exponent) + ";" + fmt(w.diameter) +
         ";" + (w.reciprocal ? "inv" : "") + ")";
}

// Everything that influences the numbers, in a fixed order.
std::string canonical(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "kind=" << c.kind << "\nlevels=" << c.levels << "\nfit_all=" << c.fitAllLevels << "\nfamily=" << c.family
     << "\ndim=" << c.dim << "\ndomain=" << fmt(c.domain.x0) << ',' << fmt(c.domain.x1) << ',' << fmt(c.domain.y0)
     << ',' << fmt(c.domain.y1) << "\nn0=" << c.n0 << "\ndegree=" << c.degree << "\nweight=" << describeSpec(c.weight)
     << "\nrho=" << describeSpec(c.rho) << "\np=" << fmt(c.p) << "\nq=" << fmt(c.q) << "\nk=" << c.k
     << "\nfunction=" << c.function << "\nx0=" << fmt(c.x0.x) << ',' << fmt(c.x0.y) << "\ns=" << fmt(c.s)
     << "\ngamma=" << fmt(c.gamma) << "\ngraded=" << c.graded << "\nf_sine=" << join(c.fSine)
     << "\nexponents=" << join(c.exponents) << "\ndirection=" << c.direction << "\nn_fixed=" << c.nFixed
     << "\nwindow=" << fmt(c.windowLo) << ',' << fmt(c.windowHi) << "\nsamples=" << c.samples << "\nseed=" << c.seed
     << "\nreference_refinements=" << c.referenceRefinements << "\nquad_tol=" << fmt(c.quadTol)
     << "\nsolver_tol=" << fmt(c.solverTol) << '\n';
  return os.str();
}

}  // namespace

void refreshHash(ExperimentConfig& c) {
  const std::string s = canonical(c);
  const std::size_t h = boost::hash_range(s.begin(), s.end());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016zx", h);
  c.hash = buf;
}

namespace {

WeightSpec parseWeight(const boost::property_tree::ptree& t, int dim) {
  static const std::set<std::string> keys{"kind", "center_x", "center_y", "exponent", "diameter", "reciprocal"};
  for (const auto& kv : t)
    if (!keys.count(kv.first)) throw Error(ErrorCode::ConfigError, "unknown weight key '" + kv.first + "'");
  WeightSpec w;
  w.dim = dim;
  w.kind = t.get<std::string>("kind", "constant");
  w.center = {t.get<double>("center_x", 0.0), t.get<double>("center_y", 0.0)};
  w.exponent = t.get<double>("exponent", 0.0);
  w.diameter = t.get<double>("diameter", 0.0);
  w.reciprocal = t.get<bool>("reciprocal", false);
  return w;
}

Weight buildWeight(WeightSpec spec, const ExperimentConfig& cfg) {
  spec.dim = cfg.dim;
  if (spec.diameter <= 0.0) spec.diameter = cfg.domain.diameter();
  return makeWeight(spec);
}

}  // namespace

ExperimentConfig parseConfig(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  static const std::map<std::string, std::set<std::string>> allowed{
      {"experiment", {"kind", "name", "levels", "fit_all_levels"}},
      {"mesh", {"family", "dim", "x0", "x1", "y0", "y1", "n0", "degree"}},
      {"weight", {}},
      {"rho", {}},
      {"norm", {"p", "q", "k"}},
      {"problem",
       {"function", "x0_x", "x0_y", "s", "gamma", "graded", "f_sine", "exponents", "direction", "n_fixed",
        "window_lo", "window_hi", "samples", "seed", "reference_refinements"}},
      {"tolerances", {"quadrature", "solver"}},
      {"output", {"dir", "formats"}},
  };
  for (const auto& sec : tree) {
    auto it = allowed.find(sec.first);
    if (it == allowed.end()) throw Error(ErrorCode::ConfigError, "unknown section [" + sec.first + "]");
    if (sec.first == "weight" || sec.first == "rho") continue;
    for (const auto& kv : sec.second)
      if (!it->second.count(kv.first))
        throw Error(ErrorCode::ConfigError, "unknown key '" + kv.first + "' in [" + sec.first + "]");
  }
  ExperimentConfig c;
  try {
    c.kind = tree.get<std::string>("experiment.kind");
    c.name = tree.get<std::string>("experiment.name", c.kind);
    c.levels = tree.get<int>("experiment.levels", c.levels);
    c.fitAllLevels = tree.get<bool>("experiment.fit_all_levels", false);
    c.family = tree.get<std::string>("mesh.family", c.family);
    c.dim = tree.get<int>("mesh.dim", c.dim);
    const double x0 = tree.get<double>("mesh.x0", 0.0), x1 = tree.get<double>("mesh.x1", 1.0);
    const double y0 = tree.get<double>("mesh.y0", 0.0), y1 = tree.get<double>("mesh.y1", 1.0);
    c.domain = c.dim == 1 ? Domain::interval(x0, x1) : Domain::rectangle(x0, x1, y0, y1);
    c.n0 = tree.get<int>("mesh.n0", c.n0);
    c.degree = tree.get<int>("mesh.degree", c.degree);
    c.weight = parseWeight(tree.get_child("weight", {}), c.dim);
    c.rho = parseWeight(tree.get_child("rho", {}), c.dim);
    c.p = tree.get<double>("norm.p", c.p);
    c.q = tree.get<double>("norm.q", c.p);
    c.k = tree.get<int>("norm.k", c.k);
    c.function = tree.get<std::string>("problem.function", c.dim == 1 ? "sin" : "sin-product");
    c.x0 = {tree.get<double>("problem.x0_x", 0.5), tree.get<double>("problem.x0_y", c.dim == 1 ? 0.0 : 0.5)};
    c.s = tree.get<double>("problem.s", c.s);
    c.gamma = tree.get<double>("problem.gamma", 0.0);
    c.graded = tree.get<bool>("problem.graded", true);
    if (auto v = tree.get_optional<std::string>("problem.f_sine")) c.fSine = parseList(*v);
    if (auto v = tree.get_optional<std::string>("problem.exponents")) c.exponents = parseList(*v);
    c.direction = tree.get<std::string>("problem.direction", c.direction);
    c.nFixed = tree.get<int>("problem.n_fixed", c.nFixed);
    c.windowLo = tree.get<double>("problem.window_lo", c.windowLo);
    c.windowHi = tree.get<double>("problem.window_hi", c.windowHi);
    c.samples = tree.get<int>("problem.samples", c.samples);
    c.seed = tree.get<std::uint64_t>("problem.seed", c.seed);
    c.referenceRefinements = tree.get<int>("problem.reference_refinements", c.referenceRefinements);
    c.quadTol = tree.get<double>("tolerances.quadrature", c.quadTol);
    c.solverTol = tree.get<double>("tolerances.solver", c.solverTol);
    c.outDir = tree.get<std::string>("output.dir", c.outDir);
    if (auto v = tree.get_optional<std::string>("output.formats")) c.formats = splitWords(*v);
  } catch (const pt::ptree_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  const auto kinds = listExperiments();
  bool known = false;
  for (const auto& k : kinds) known = known || k.first == c.kind;
  require(known, ErrorCode::ConfigError, "unknown experiment kind '" + c.kind + "'");
  require(c.dim == 1 || c.dim == 2, ErrorCode::ConfigError, "mesh.dim must be 1 or 2");
  require(c.levels >= 1, ErrorCode::ConfigError, "levels must be positive");
  require(c.n0 >= 1, ErrorCode::ConfigError, "mesh.n0 must be positive");
  require(c.family == "simplicial" || c.family == "tensor", ErrorCode::ConfigError, "mesh.family must be simplicial or tensor");
  require(c.p > 1.0 && c.q >= 1.0, ErrorCode::ConfigError, "norm exponents out of range");
  for (const auto& f : c.formats)
    require(f == "csv" || f == "summary" || f == "plot", ErrorCode::ConfigError, "unknown output format '" + f + "'");
  refreshHash(c);
  return c;
}

ExperimentConfig loadConfig(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot read config '" + path + "'");
  ExperimentConfig c = parseConfig(is);
  if (c.name == c.kind) c.name = std::filesystem::path(path).stem().string();
  return c;
}

double ConvergenceReport::value(int row, const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) return rows.at(row).at(i);
  throw Error(ErrorCode::InvalidArgument, "no column '" + column + "'");
}

const ConvergenceReport::Fit* ConvergenceReport::fit(const std::string& column) const {
  for (const auto& f : fits)
    if (f.column == column) return &f;
  return nullptr;
}

std::string ConvergenceReport::infoValue(const std::string& key) const {
  for (const auto& kv : info)
    if (kv.first == key) return kv.second;
  return {};
}

ConvergenceReport::Fit fitColumn(const ConvergenceReport& rep, const std::string& x, const std::string& y,
                                 bool allRows) {
  const int n = static_cast<int>(rep.rows.size());
  const int use = allRows ? n : std::min(n, std::max(3, n - 1));
  std::vector<double> xs, ys;
  for (int r = n - use; r < n; ++r) {
    xs.push_back(rep.value(r, x));
    ys.push_back(rep.value(r, y));
  }
  ConvergenceReport::Fit f;
  f.column = y;
  f.abscissa = x;
  f.rowsUsed = use;
  f.result = fitOrder(xs, ys);
  return f;
}

namespace {

class Table {
 public:
  Table(ConvergenceReport& rep, std::vector<std::string> cols) : rep_(rep) { rep_.columns = std::move(cols); }
  void add(std::vector<double> row) { rep_.rows.push_back(std::move(row)); }

 private:
  ConvergenceReport& rep_;
};

void addFit(ConvergenceReport& rep, const ExperimentConfig& cfg, const std::string& x, const std::string& y) {
  if (rep.rows.size() < 2) return;
  rep.fits.push_back(fitColumn(rep, x, y, cfg.fitAllLevels));
}

template <class F>
auto atLevel(int level, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), "level " + std::to_string(level) + ": " + e.what());
  }
}

Mesh baseMesh(const ExperimentConfig& c) {
  if (c.dim == 1) return Mesh::buildTensor({uniformPartition(c.domain.x0, c.domain.x1, c.n0)});
  if (c.family == "tensor")
    return Mesh::buildTensor(
        {uniformPartition(c.domain.x0, c.domain.x1, c.n0), uniformPartition(c.domain.y0, c.domain.y1, c.n0)});
  // union-jack with n0 cells per side of the square
  return Mesh::buildSimplicial(c.domain, c.domain.diameter() / c.n0);
}

std::vector<Mesh> meshHierarchy(const ExperimentConfig& c, int extra = 0) {
  std::vector<Mesh> out;
  out.push_back(baseMesh(c));
  for (int l = 1; l < c.levels + extra; ++l) out.push_back(out.back().refineUniform());
  return out;
}

double relativeChange(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x / v.front() - 1.0));
  return m;
}

// ---------------------------------------------------------------- interp-rate
ConvergenceReport runInterp(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  Table t(rep, {"level", "h", "dofs", "err_Lp", "err_W1p", "max_local_ratio_W1p", "scaled_W1p"});
  const SmoothFunction v = functions::byName(cfg.function, cfg.dim);
  const Weight w = buildWeight(cfg.weight, cfg);
  const auto meshes = meshHierarchy(cfg);
  for (int l = 0; l < cfg.levels; ++l) {
    atLevel(l, [&] {
      const Mesh& mesh = meshes[l];
      FESpace V(mesh, cfg.degree);
      const FEFunction F = QuasiInterpolant(V).apply(v);
      const QuadratureRule rule = buildRule(mesh, w, 2 * cfg.degree + 2, cfg.quadTol);
      const GlobalError e0 = globalError(v, F, rule, cfg.p, 0);
      const GlobalError e1 = globalError(v, F, rule, cfg.p, 1);
      double ratio = 0.0;
      for (const auto& r : localErrorTable(v, F, rule, cfg.p, 1)) ratio = std::max(ratio, r.ratio);
      t.add({double(l), mesh.maxDiameter(), double(V.numDofs()), e0.plain, e1.plain, ratio, e1.scaled});
      return 0;
    });
  }
  addFit(rep, cfg, "h", "err_Lp");
  addFit(rep, cfg, "h", "err_W1p");
  return rep;
}

// ---------------------------------------------------------------- aniso-rate
ConvergenceReport runAniso(const ExperimentConfig& cfg) {
  require(cfg.dim == 2, ErrorCode::ConfigError, "aniso-rate runs on 2D tensor meshes");
  require(cfg.direction == "x" || cfg.direction == "y", ErrorCode::ConfigError, "direction must be x or y");
  ConvergenceReport rep;
  Table t(rep, {"level", "hx", "hy", "dofs", "err_Lp", "err_W1p", "err_dx", "err_dy"});
  const SmoothFunction v = functions::byName(cfg.function, 2);
  const Weight w = buildWeight(cfg.weight, cfg);
  std::vector<double> e0s, e1s;
  for (int l = 0; l < cfg.levels; ++l) {
    atLevel(l, [&] {
      const int nr = cfg.n0 << l;
      const int nx = cfg.direction == "x" ? nr : cfg.nFixed;
      const int ny = cfg.direction == "y" ? nr : cfg.nFixed;
      const Mesh mesh = Mesh::buildTensor({uniformPartition(cfg.domain.x0, cfg.domain.x1, nx),
                                           uniformPartition(cfg.domain.y0, cfg.domain.y1, ny)});
      std::vector<int> window;
      for (int e = 0; e < mesh.numElements(); ++e) {
        const Cell c = mesh.cell(e);
        const double tol = 1e-12;
        if (c.vertices[0].y >= cfg.windowLo - tol && c.vertices[2].y <= cfg.windowHi + tol) window.push_back(e);
      }
      require(!window.empty(), ErrorCode::ConfigError, "empty measurement window");
      FESpace V(mesh, 1);
      const FEFunction F = QuasiInterpolant(V).apply(v);
      const QuadratureRule rule = buildRule(mesh, w, 4, cfg.quadTol);
      const double e0 = globalError(v, F, rule, cfg.p, 0, &window).plain;
      const double e1 = globalError(v, F, rule, cfg.p, 1, &window).plain;
      const Field diff = difference(toField(v), F.toField());
      auto directional = [&](MultiIndex k) {
        Field d = diff;
        d.eval = [diff, k](int e, Point x, MultiIndex) { return diff.eval(e, x, k); };
        return weightedLpNorm(d, cfg.p, mesh, rule, &window);
      };
      e0s.push_back(e0);
      e1s.push_back(e1);
      t.add({double(l), 1.0 / nx * (cfg.domain.x1 - cfg.domain.x0), 1.0 / ny * (cfg.domain.y1 - cfg.domain.y0),
             double(V.numDofs()), e0, e1, directional({1, 0}), directional({0, 1})});
      return 0;
    });
  }
  const std::string h = cfg.direction == "x" ? "hx" : "hy";
  addFit(rep, cfg, h, "err_Lp");
  addFit(rep, cfg, h, "err_W1p");
  rep.info.push_back({"relative_change_Lp", fmt(relativeChange(e0s))});
  rep.info.push_back({"relative_change_W1p", fmt(relativeChange(e1s))});
  return rep;
}

// ---------------------------------------------------------------- ap-check
ConvergenceReport runAp(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  Table t(rep, {"exponent", "sampled_max", "divergent", "expected_divergent", "balls"});
  std::vector<double> exps = cfg.exponents;
  if (exps.empty()) exps.push_back(cfg.weight.exponent);
  bool allMatch = true;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    atLevel(static_cast<int>(i), [&] {
      WeightSpec s = cfg.weight;
      s.exponent = exps[i];
      const Weight w = buildWeight(s, cfg);
      BallSampler sampler;
      sampler.levels = 20;
      const ApEstimate est = estimateApConstant(w, cfg.p, sampler, cfg.quadTol);
      double expected = std::nan("");
      if (s.kind == "power") {
        const double g = s.reciprocal ? -exps[i] : exps[i];
        const bool inside = g > -cfg.dim && g < cfg.dim * (cfg.p - 1.0);
        expected = inside ? 0.0 : 1.0;
        allMatch = allMatch && (expected == (est.divergent ? 1.0 : 0.0));
      }
      t.add({exps[i], est.divergent ? std::nan("") : est.sampledMax, est.divergent ? 1.0 : 0.0, expected,
             double(est.ballsSampled)});
      return 0;
    });
  }
  rep.info.push_back({"divergence_flags_match", allMatch ? "1" : "0"});
  return rep;
}

// ---------------------------------------------------------------- poincare
ConvergenceReport runPoincare(const ExperimentConfig& cfg) {
  require(cfg.dim == 1, ErrorCode::ConfigError, "the Poincare probe runs on intervals");
  ConvergenceReport rep;
  Table t(rep, {"level", "a", "ref_max_ratio", "phys_max_ratio", "relation_residual", "patch_max_ratio"});
  const Weight w = buildWeight(cfg.weight, cfg);
  const double lo = cfg.domain.x0, hi = cfg.domain.x1;
  // random cubics, fixed seed
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<SmoothFunction> samples;
  for (int i = 0; i < cfg.samples; ++i) {
    Polynomial p(1, 3, {0, 0});
    for (int j = 0; j <= 3; ++j) p.coefficient({j, 0}) = coef(rng);
    samples.push_back(SmoothFunction::fromPolynomial(p));
  }
  const Bump bump(1, 0.9);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  // overlapping halves: (lo, mid + 0.1|S|) and (mid - 0.1|S|, hi)
  const double ov = 0.2 * half;
  const Mesh ref = Mesh::buildTensor({uniformPartition(lo, hi, cfg.n0)});
  auto subdomains = [&](const Mesh& m, double a) {
    std::vector<PoincareSubdomain> out;
    const double cuts[2][2] = {{lo, mid + ov}, {mid - ov, hi}};
    for (auto& c : cuts) {
      PoincareSubdomain sd;
      for (int e = 0; e < m.numElements(); ++e) {
        const Point cc = m.cell(e).centroid();
        if (cc.x / a > c[0] && cc.x / a < c[1]) sd.elements.push_back(e);
      }
      sd.chi = RescaledBump::isotropic(bump, {a * 0.5 * (c[0] + c[1]), 0}, a * 0.5 * (c[1] - c[0]), 0);
      out.push_back(sd);
    }
    return out;
  };
  double worstRelation = 0.0, first = 0.0, worstRef = 0.0;
  for (int l = 0; l < cfg.levels; ++l) {
    atLevel(l, [&] {
      const double a = std::ldexp(1.0, -l);
      // reference domain S with mu = w(a x)
      const QuadratureRule rr = buildRule(ref, w.pulledBack(a, {0, 0}), 8, cfg.quadTol);
      const auto chi = RescaledBump::isotropic(bump, {mid, 0}, half, 0);
      const PoincareProbe pr = poincareProbe(ref, rr, cfg.p, chi, samples, subdomains(ref, 1.0));
      // physical domain aS with the original weight
      const Mesh phys = Mesh::buildTensor({uniformPartition(a * lo, a * hi, cfg.n0)});
      const QuadratureRule rp = buildRule(phys, w, 8, cfg.quadTol);
      std::vector<SmoothFunction> mapped;
      for (const auto& v : samples)
        mapped.emplace_back(1, 3, [v, a](Point x, MultiIndex k) {
          return v.derivative({x.x / a, 0}, k) / std::pow(a, k.i);
        });
      const auto chiA = RescaledBump::isotropic(bump, {a * mid, 0}, a * half, 0);
      const PoincareProbe pp = poincareProbe(phys, rp, cfg.p, chiA, mapped, subdomains(phys, a));
      double rel = 0.0;
      for (std::size_t i = 0; i < pr.ratios.size(); ++i)
        rel = std::max(rel, std::abs(pp.ratios[i] - a * pr.ratios[i]) / (a * pr.ratios[i]));
      worstRelation = std::max(worstRelation, rel);
      if (l == 0) first = pr.maxRatio;
      worstRef = std::max(worstRef, pr.maxRatio);
      t.add({double(l), a, pr.maxRatio, pp.maxRatio, rel, pr.patchMaxRatio});
      return 0;
    });
  }
  rep.info.push_back({"max_relation_residual", fmt(worstRelation)});
  rep.info.push_back({"bounded_by_1.05_coarsest", worstRef <= 1.05 * first ? "1" : "0"});
  return rep;
}

// ---------------------------------------------------------------- elliptic-rate
struct Manufactured {
  SmoothFunction u;
  SmoothFunction reduced;  // f / sourceWeight
  std::optional<Weight> sourceWeight;
};

// -div(|x - c|^g grad u) = |x - c|^{g-1} (r (-Lap u) - g (x - c).grad u / r)
Manufactured manufactured(const ExperimentConfig& cfg, const Weight& omega) {
  Manufactured m;
  m.u = cfg.dim == 1 ? functions::bubble1D() : functions::sinProduct();
  double g = 0.0;
  Point c{};
  if (!omega.isConstant()) {
    const auto pf = asPurePower(omega);
    require(pf && pf->type == Singularity::Type::Point, ErrorCode::ConfigError,
            "elliptic-rate supports constant or |x - x0|^g weights");
    g = pf->exponent;
    c = pf->center;
    require(pf->scale == 1.0, ErrorCode::ConfigError, "weight scale must be one");
  }
  const SmoothFunction u = m.u;
  const int dim = cfg.dim;
  m.reduced = SmoothFunction(dim, 0, [u, g, c, dim](Point x, MultiIndex) {
    const Point d = x - c;
    const double r = dim == 1 ? std::abs(d.x) : norm(d);
    double lap = u.derivative(x, {2, 0});
    double dg = d.x * u.derivative(x, {1, 0});
    if (dim == 2) {
      lap += u.derivative(x, {0, 2});
      dg += d.y * u.derivative(x, {0, 1});
    }
    if (g == 0.0) return -lap;
    return r > 0.0 ? -r * lap - g * dg / r : 0.0;
  });
  if (g != 0.0) m.sourceWeight = Weight::power(dim, c, g - 1.0);
  return m;
}

ConvergenceReport runElliptic(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  Table t(rep, {"level", "h", "dofs", "err_energy", "err_L2w", "interp_energy", "galerkin_residual", "cea_holds"});
  const Weight w = buildWeight(cfg.weight, cfg);
  const Manufactured mf = manufactured(cfg, w);
  const auto meshes = meshHierarchy(cfg);
  double worstRes = 0.0;
  bool cea = true;
  for (int l = 0; l < cfg.levels; ++l) {
    atLevel(l, [&] {
      const Mesh& mesh = meshes[l];
      FESpace V(mesh, cfg.degree);
      EllipticProblem prob;
      prob.space = &V;
      prob.omega = w;
      prob.load = EllipticProblem::Load::Source;
      prob.source = mf.reduced;
      prob.sourceWeight = mf.sourceWeight;
      const LinearSystem sys = assemble(prob);
      SolveOptions opts;
      opts.tol = cfg.solverTol;
      const FEFunction U = solve(sys, V, opts);
      const double res = galerkinResidual(sys, U);
      const QuadratureRule rule = buildRule(mesh, w, 2 * cfg.degree + 2, cfg.quadTol);
      const Field eu = difference(toField(mf.u), U.toField());
      const double e1 = weightedSeminorm(eu, 2.0, 1, mesh, rule);
      const double e0 = weightedLpNorm(eu, 2.0, mesh, rule);
      const FEFunction PiU = QuasiInterpolant(V).apply(mf.u);
      const double ei = weightedSeminorm(difference(toField(mf.u), PiU.toField()), 2.0, 1, mesh, rule);
      const bool ok = e1 <= ei + cfg.solverTol;
      cea = cea && ok;
      worstRes = std::max(worstRes, res);
      t.add({double(l), mesh.maxDiameter(), double(V.numDofs()), e1, e0, ei, res, ok ? 1.0 : 0.0});
      return 0;
    });
  }
  addFit(rep, cfg, "h", "err_energy");
  addFit(rep, cfg, "h", "err_L2w");
  rep.info.push_back({"max_galerkin_residual", fmt(worstRes)});
  rep.info.push_back({"cea_all_levels", cea ? "1" : "0"});
  return rep;
}

// ---------------------------------------------------------------- dirac-rate
ConvergenceReport runDirac(const ExperimentConfig& cfg) {
  require(cfg.dim == 2 && cfg.family == "simplicial", ErrorCode::ConfigError, "dirac-rate runs on 2D simplicial meshes");
  ConvergenceReport rep;
  Table t(rep, {"level", "h", "dofs", "err_L2", "grad_L2_varpi", "sigma", "sigma_over_hlogh"});
  const auto meshes = meshHierarchy(cfg, cfg.referenceRefinements);
  SolveOptions opts;
  opts.tol = cfg.solverTol;
  const Mesh& fine = meshes.back();
  FESpace Vref(fine, 1);
  const FEFunction Uref = atLevel(static_cast<int>(meshes.size()) - 1, [&] { return solveDirac(cfg.x0, Vref, opts); });
  const Weight varpi = Weight::diracLog(2, cfg.x0, cfg.domain.diameter());
  const Weight inv = Weight::reciprocal(varpi);
  std::vector<double> grads;
  for (int l = 0; l < cfg.levels; ++l) {
    atLevel(l, [&] {
      const Mesh& mesh = meshes[l];
      FESpace V(mesh, 1);
      const FEFunction U = solveDirac(cfg.x0, V, opts);
      const double err = nestedL2Difference(U, Uref);
      const QuadratureRule rule = buildRule(mesh, varpi, 2, cfg.quadTol);
      const double g = weightedSeminorm(U.toField(), 2.0, 1, mesh, rule);
      grads.push_back(g);
      const double h = mesh.maxDiameter();
      const double sigma = dualityFactor(inv, cfg.x0, h, cfg.quadTol);
      t.add({double(l), h, double(V.numDofs()), err, g, sigma, sigma / (h * std::abs(std::log(h)))});
      return 0;
    });
  }
  addFit(rep, cfg, "h", "err_L2");
  rep.info.push_back({"reference_dofs", std::to_string(Vref.numDofs())});
  if (grads.size() >= 3) {
    const std::size_t n = grads.size();
    rep.info.push_back({"grad_increment_last", fmt((grads[n - 1] - grads[n - 2]) / grads[n - 2])});
    rep.info.push_back({"grad_increment_previous", fmt((grads[n - 2] - grads[n - 3]) / grads[n - 3])});
  }
  return rep;
}

// ---------------------------------------------------------------- fractional-rate
struct FractionalLevel {
  double traceError = 0.0;
  double energyError = 0.0;
  double amplitude = 0.0;
  int dofs = 0;
  FractionalSolution sol;
};

ConvergenceReport runFractional(const ExperimentConfig& cfg) {
  require(cfg.dim == 1, ErrorCode::ConfigError, "fractional-rate works on (0,1)");
  require(cfg.s > 0.0 && cfg.s < 1.0, ErrorCode::ConfigError, "s must lie in (0,1)");
  ConvergenceReport rep;
  Table t(rep, {"level", "nx", "m", "dofs", "Y", "err_trace_L2", "err_energy"});
  const double alpha = 1.0 - 2.0 * cfg.s;
  const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 3.0 / (1.0 - alpha) + 0.1;
  SolveOptions opts;
  opts.tol = cfg.solverTol;

  auto partition = [&](double Y, int M) {
    return cfg.graded ? gradedPartition(Y, M, gamma).points : uniformPartition(0.0, Y, M);
  };
  auto run = [&](const std::vector<double>& fs, int nx, std::vector<double> ys, std::optional<double> ds,
                 bool energy) {
    ExtensionProblem prob;
    prob.s = cfg.s;
    prob.Nx = nx;
    prob.yPoints = std::move(ys);
    prob.Y = prob.yPoints.back();
    prob.M = static_cast<int>(prob.yPoints.size()) - 1;
    auto f = [fs](double x) {
      double v = 0.0;
      for (std::size_t k = 0; k < fs.size(); ++k) v += fs[k] * std::sin((k + 1) * kPi * x);
      return v;
    };
    FractionalLevel out;
    out.sol = solveFractional(prob, f, opts, defaultExecution(), ds);
    const SpectralOracle o = spectralOracle(fs, cfg.s);
    const Mesh& tm = *out.sol.traceMesh;
    const QuadratureRule tr = buildRule(tm, Weight::constant(1), 8, cfg.quadTol);
    out.traceError = weightedLpNorm(difference(toField(o.u), out.sol.trace.toField()), 2.0, tm, tr);
    const FEFunction trace = out.sol.trace;
    out.amplitude = 2.0 * integrateOver([&](int e, Point x) { return trace.onElement(e, x) * std::sin(kPi * x.x); },
                                        tm, tr);
    if (energy) {
      const QuadratureRule er = buildRule(*out.sol.mesh, Weight::extension(2, alpha, 0.0), 4, cfg.quadTol);
      out.energyError =
          weightedSeminorm(difference(toField(exactExtension(fs, cfg.s)), out.sol.U.toField()), 2.0, 1, *out.sol.mesh, er);
    }
    out.dofs = out.sol.dofs;
    return out;
  };

  // truncation constant: Y = c log(#T), c grown until doubling Y moves the
  // level-0 trace by less than a tenth of its error
  const int nx0 = cfg.n0;
  const double logT0 = std::log(double(nx0) * nx0);
  double c = 0.5, proxy = 0.0, err0 = 0.0;
  for (;; c += 0.25) {
    const double Y = c * logT0;
    std::vector<double> ys = partition(Y, nx0);
    const FractionalLevel a = run(cfg.fSine, nx0, ys, std::nullopt, false);
    // same cells below Y, then cells of the last size up to 2Y
    const double dy = ys[ys.size() - 1] - ys[ys.size() - 2];
    while (ys.back() < 2.0 * Y - 0.5 * dy) ys.push_back(ys.back() + dy);
    ys.back() = 2.0 * Y;
    const FractionalLevel b = run(cfg.fSine, nx0, ys, std::nullopt, false);
    const QuadratureRule tr = buildRule(*a.sol.traceMesh, Weight::constant(1), 4);
    proxy = weightedLpNorm(difference(a.sol.trace.toField(), b.sol.trace.toField()), 2.0, *a.sol.traceMesh, tr);
    err0 = a.traceError;
    if (proxy < 0.1 * err0 || c >= 4.0) break;
  }
  rep.info.push_back({"truncation_constant", fmt(c)});
  rep.info.push_back({"truncation_proxy_level0", fmt(proxy)});
  rep.info.push_back({"trace_error_level0", fmt(err0)});
  rep.info.push_back({"truncation_proxy_ok", proxy < 0.1 * err0 ? "1" : "0"});
  rep.info.push_back({"grading_gamma", fmt(cfg.graded ? gamma : 1.0)});

  auto yFor = [&](int nx) { return c * std::log(double(nx) * nx); };

  // d_s check on the first eigenfunction at the two finest levels
  double ds = extensionConstant(cfg.s);
  rep.info.push_back({"ds", fmt(ds)});
  {
    const int L = cfg.levels - 1;
    const int nf = nx0 << L, nc = nx0 << std::max(L - 1, 0);
    const double exact = std::pow(kPi, -2.0 * cfg.s);
    const double af = run({1.0}, nf, partition(yFor(nf), nf), std::nullopt, false).amplitude;
    const double ac = run({1.0}, nc, partition(yFor(nc), nc), std::nullopt, false).amplitude;
    const bool ok = std::abs(af - exact) <= 3.0 * std::abs(af - ac) + 1e-12 * exact;
    rep.info.push_back({"ds_amplitude", fmt(af)});
    rep.info.push_back({"ds_amplitude_exact", fmt(exact)});
    rep.info.push_back({"ds_amplitude_previous", fmt(ac)});
    rep.info.push_back({"ds_validated", ok ? "1" : "0"});
    if (!ok) {
      ds *= exact / af;  // amplitude is linear in d_s
      rep.info.push_back({"ds_recalibrated", fmt(ds)});
    }
  }
  const bool recal = !rep.infoValue("ds_recalibrated").empty();

  for (int l = 0; l < cfg.levels; ++l) {
    atLevel(l, [&] {
      const int nx = nx0 << l;
      const double Y = yFor(nx);
      const FractionalLevel r =
          run(cfg.fSine, nx, partition(Y, nx), recal ? std::optional<double>(ds) : std::nullopt, true);
      t.add({double(l), double(nx), double(nx), double(r.dofs), Y, r.traceError, r.energyError});
      return 0;
    });
  }
  addFit(rep, cfg, "dofs", "err_trace_L2");
  addFit(rep, cfg, "dofs", "err_energy");
  return rep;
}

// ---------------------------------------------------------------- metrics-check
ConvergenceReport runMetrics(const ExperimentConfig& cfg) {
  require(cfg.k == 0 || cfg.k == 1, ErrorCode::ConfigError, "metrics-check uses k = 0 or 1");
  ConvergenceReport rep;
  Table t(rep, {"level", "h", "dofs", "err_Lq_rho", "max_ratio"});
  const Weight rho = buildWeight(cfg.rho, cfg);
  const Weight omega = buildWeight(cfg.weight, cfg);
  if (!isSupportedPair(rho, omega))
    throw Error(ErrorCode::UnsupportedPair, rho.describe() + " with " + omega.describe());
  const SmoothFunction v = functions::byName(cfg.function, cfg.dim);
  const auto meshes = meshHierarchy(cfg);
  for (int l = 0; l < cfg.levels; ++l) {
    atLevel(l, [&] {
      const Mesh& mesh = meshes[l];
      FESpace V(mesh, cfg.degree);
      const FEFunction F = QuasiInterpolant(V).apply(v);
      const QuadratureRule rr = buildRule(mesh, rho, 2 * cfg.degree + 2, cfg.quadTol);
      const QuadratureRule orl = buildRule(mesh, omega, 2 * cfg.degree + 2, cfg.quadTol);
      const MetricsError me = differentMetricsError(v, F, rr, cfg.q, orl, cfg.p, cfg.k);
      t.add({double(l), mesh.maxDiameter(), double(V.numDofs()), me.error, me.maxRatio});
      return 0;
    });
  }
  addFit(rep, cfg, "h", "err_Lq_rho");
  std::vector<double> radii;
  for (int j = 0; j <= 10; ++j) radii.push_back(0.5 * std::ldexp(1.0, -j));
  rep.info.push_back({"compatibility_quotient", fmt(compatibilityProbe(rho, cfg.q, omega, cfg.p, cfg.x0, radii))});
  return rep;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> listExperiments() {
  return {
      {"interp-rate", "quasi-interpolation error rates on uniformly refined meshes"},
      {"aniso-rate", "Q1 interpolation on tensor meshes refined in one direction"},
      {"ap-check", "sampled Muckenhoupt constants and divergence flags"},
      {"poincare", "weighted Poincare ratios under dilations"},
      {"elliptic-rate", "weighted elliptic problem with a manufactured solution"},
      {"dirac-rate", "point source in the unit square against a finer reference"},
      {"fractional-rate", "fractional Laplacian through the truncated extension"},
      {"metrics-check", "interpolation errors measured in a second weighted metric"},
  };
}

ConvergenceReport runExperiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ConvergenceReport rep;
  if (cfg.kind == "interp-rate") rep = runInterp(cfg);
  else if (cfg.kind == "aniso-rate") rep = runAniso(cfg);
  else if (cfg.kind == "ap-check") rep = runAp(cfg);
  else if (cfg.kind == "poincare") rep = runPoincare(cfg);
  else if (cfg.kind == "elliptic-rate") rep = runElliptic(cfg);
  else if (cfg.kind == "dirac-rate") rep = runDirac(cfg);
  else if (cfg.kind == "fractional-rate") rep = runFractional(cfg);
  else if (cfg.kind == "metrics-check") rep = runMetrics(cfg);
  else throw Error(ErrorCode::ConfigError, "unknown experiment kind '" + cfg.kind + "'");
  rep.kind = cfg.kind;
  rep.name = cfg.name;
  rep.configHash = cfg.hash;
  rep.info.insert(rep.info.begin(), {{"tolerance_quadrature", fmt(cfg.quadTol)},
                                     {"tolerance_solver", fmt(cfg.solverTol)},
                                     {"bump_margin", fmt(0.9)}});
  rep.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

void writeCsv(std::ostream& os, const ConvergenceReport& rep) {
  os << "# kind=" << rep.kind << " config_hash=" << rep.configHash << '\n';
  for (std::size_t i = 0; i < rep.columns.size(); ++i) os << (i ? "," : "") << rep.columns[i];
  os << '\n';
  for (const auto& r : rep.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << '\n';
  }
}

void writeSummary(std::ostream& os, const ConvergenceReport& rep) {
  os << "kind = " << rep.kind << '\n';
  os << "name = " << rep.name << '\n';
  os << "config_hash = " << rep.configHash << '\n';
  os << "rows = " << rep.rows.size() << '\n';
  for (const auto& f : rep.fits) {
    os << "fittedOrder." << f.column << " = " << fmt(f.result.slope) << '\n';
    os << "r2." << f.column << " = " << fmt(f.result.r2) << '\n';
    os << "fit_abscissa." << f.column << " = " << f.abscissa << '\n';
    os << "fit_rows." << f.column << " = " << f.rowsUsed << '\n';
  }
  for (const auto& kv : rep.info) os << kv.first << " = " << kv.second << '\n';
}

std::vector<std::string> emitReport(const ConvergenceReport& rep, const std::string& dir,
                                    const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IOError, "cannot create '" + dir + "': " + ec.message());
  std::vector<std::string> out;
  auto open = [&](const std::string& file) {
    const std::string path = (fs::path(dir) / file).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IOError, "cannot write '" + path + "'");
    out.push_back(path);
    return os;
  };
  for (const auto& f : formats) {
    if (f == "csv") {
      auto os = open(rep.name + ".csv");
      writeCsv(os, rep);
    } else if (f == "summary") {
      auto os = open(rep.name + ".summary");
      writeSummary(os, rep);
    } else if (f == "plot") {
      for (const auto& fit : rep.fits) {
        auto os = open(rep.name + "." + fit.column + ".dat");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t r = 0; r < rep.rows.size(); ++r)
          pts.emplace_back(rep.value(static_cast<int>(r), fit.abscissa), rep.value(static_cast<int>(r), fit.column));
        // descending abscissa: coarse to fine in h
        std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
        os << "# " << fit.abscissa << ' ' << fit.column << '\n';
        for (auto [x, y] : pts) os << fmt(x) << ' ' << fmt(y) << '\n';
      }
    } else {
      throw Error(ErrorCode::ConfigError, "unknown output format '" + f + "'");
    }
    if (!out.empty()) {
      std::ifstream check(out.back());
      if (!check) throw Error(ErrorCode::IOError, "write failed for '" + out.back() + "'");
    }
  }
  return out;
}

}  // namespace muckfem
