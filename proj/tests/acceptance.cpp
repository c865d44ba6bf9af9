// Acceptance suite: one PASS/FAIL line per criterion. `acceptance AC4` runs
// a single criterion, no argument runs all of them.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "muckfem/error.hpp"
#include "muckfem/experiment.hpp"
#include "muckfem/quadrature.hpp"
#include "muckfem/taylor.hpp"
#include "muckfem/weights.hpp"

using namespace muckfem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [X]");
  }
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ConvergenceReport runConfig(const std::string& file) {
  return runExperiment(loadConfig(std::string(MUCKFEM_CONFIG_DIR) + "/" + file));
}

double order(const ConvergenceReport& r, const std::string& col) {
  const auto* f = r.fit(col);
  if (!f) throw Error(ErrorCode::InvalidArgument, "no fit for " + col);
  return f->result.slope;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// ---------------------------------------------------------------- AC1
Outcome ac1() {
  Outcome out;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  struct Case {
    std::string label;
    Weight w;
    std::function<Ball()> draw;
  };
  const Weight varpi = Weight::diracLog(2, {0.5, 0.5}, std::sqrt(2.0));
  std::vector<Case> cases{
      {"1", Weight::constant(1), [&] { return Ball{{-1.0 + 2.0 * u01(rng), 0}, 0.01 + 0.99 * u01(rng)}; }},
      {"|x|^1/2", Weight::power(1, {0, 0}, 0.5),
       [&] { return Ball{{-1.0 + 2.0 * u01(rng), 0}, 0.01 + 0.99 * u01(rng)}; }},
      // balls well inside |x - x0| < diameter, where the logarithm is positive
      {"varpi", varpi, [&] { return Ball{{0.2 + 0.6 * u01(rng), 0.2 + 0.6 * u01(rng)}, 0.01 + 0.19 * u01(rng)}; }},
  };
  for (auto& c : cases) {
    double worstPair = 0.0, minRatio = 1e300;
    for (int i = 0; i < 50; ++i) {
      const Ball b = c.draw();
      for (double p : {2.0, 3.0}) {
        const auto [r1, r2] = dualWeightIdentity(c.w, p, b, 1e-12);
        worstPair = std::max(worstPair, std::abs(r1 - r2) / std::abs(r2));
        minRatio = std::min(minRatio, muckenhouptRatio(c.w, p, b, 1e-12));
      }
    }
    out.check(worstPair <= 1e-8, c.label + " dual pair rel " + num(worstPair, 2));
    out.check(minRatio >= 1.0 - 1e-8, c.label + " min ratio " + num(minRatio, 10));
  }
  double worst = 0.0;
  for (double r : {1.0, 0.3, 1e-3}) {
    const double ratio = muckenhouptRatio(Weight::power(1, {0, 0}, 0.5), 2.0, Ball{{0, 0}, r}, 1e-12);
    worst = std::max(worst, std::abs(ratio - 4.0 / 3.0));
  }
  out.check(worst <= 1e-6, "centred |x|^1/2 ratio - 4/3 = " + num(worst, 2));
  return out;
}

// ---------------------------------------------------------------- AC2
Outcome ac2() {
  Outcome out;
  const ConvergenceReport r = runConfig("ap_power_1d.ini");
  std::string flags;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const int row = static_cast<int>(i);
    const double g = r.value(row, "exponent");
    const bool expected = !(g > -1.0 && g < 1.0);
    const bool got = r.value(row, "divergent") == 1.0;
    out.pass = out.pass && expected == got;
    flags += num(g, 2) + (got ? ":div " : ":ok ");
  }
  out.check(r.rows.size() == 6, "flags " + flags);
  return out;
}

// ---------------------------------------------------------------- AC3
Polynomial randomPoly(int dim, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  Polynomial p(dim, m, {0.0, 0.0});
  for (auto b : multiIndicesUpTo(dim, m)) p.coefficient(b) = c(rng);
  return p;
}

Outcome ac3() {
  Outcome out;
  std::mt19937_64 rng(11);
  double worstRepro = 0.0, worstComm = 0.0;
  for (int dim : {1, 2}) {
    const Bump b(dim, 0.8);
    for (int m = 0; m <= 2; ++m) {
      const Point z = dim == 1 ? Point{0.3, 0} : Point{0.3, 0.6};
      const auto psi = RescaledBump::isotropic(b, z, 0.25, m);
      for (int t = 0; t < 5; ++t) {
        const Polynomial P = randomPoly(dim, m, rng);
        const SmoothFunction v = SmoothFunction::fromPolynomial(P);
        worstRepro = std::max(worstRepro, averagedTaylor(v, psi, m).maxCoefficientDistance(P));
        const SmoothFunction s = SmoothFunction::sampled(dim, [v](Point x) { return v(x); });
        worstRepro = std::max(worstRepro, averagedTaylor(s, psi, m).maxCoefficientDistance(P));
      }
      const SmoothFunction v = dim == 1 ? functions::exponential(1) : functions::sinProduct();
      for (auto a : multiIndicesUpTo(dim, m)) {
        auto [l, r] = derivativeCommutes(v, psi, m, a);
        worstComm = std::max(worstComm, l.maxCoefficientDistance(r));
      }
    }
  }
  out.check(worstRepro <= 1e-9, "reproduction " + num(worstRepro, 2));
  out.check(worstComm <= 1e-8, "commutation " + num(worstComm, 2));

  // local order of ||v - Q v||_{W^k_p(w,S_z)} / |v|_{W^{m+1}_p(w,S_z)} as the
  // star around the weight's singular point shrinks
  const SmoothFunction v = functions::exponential(1);
  std::string orders;
  for (int m = 0; m <= 2; ++m)
    for (const Weight& w : {Weight::constant(1), Weight::power(1, {0, 0}, 0.5)})
      for (double p : {2.0, 3.0}) {
        std::vector<std::vector<double>> ratio(m + 1);
        std::vector<double> hs;
        for (int l = 0; l < 5; ++l) {
          const Mesh mesh = Mesh::buildTensor({uniformPartition(-1.0, 1.0, 8 << l)});
          int z = 0;
          while (std::abs(mesh.node(z).x) > 1e-12) ++z;
          const Star st = mesh.star(z);
          const double r = calibrateBumpRadius(mesh, {{mesh.node(z), st.elements, st.h}}, m);
          const Bump bump(1, r);
          const auto psi = RescaledBump::isotropic(bump, mesh.node(z), st.h, m);
          psi.verifySupport(mesh, st.elements);
          const Polynomial Q = averagedTaylor(v, psi, m);
          const QuadratureRule rule = buildRule(mesh, w, 2 * m + 8, 1e-12);
          const Field e = difference(toField(v), toField(SmoothFunction::fromPolynomial(Q)));
          const double top = weightedSeminorm(toField(v), p, m + 1, mesh, rule, &st.elements);
          for (int k = 0; k <= m; ++k)
            ratio[k].push_back(weightedSeminorm(e, p, k, mesh, rule, &st.elements) / top);
          hs.push_back(st.h);
        }
        for (int k = 0; k <= m; ++k) {
          const double s = fitOrder(hs, ratio[k]).slope;
          const bool ok = within(s, m + 1 - k, 0.2);
          out.pass = out.pass && ok;
          if (!ok || (k == 0 && p == 2.0))
            orders += " m" + std::to_string(m) + "k" + std::to_string(k) + (w.isConstant() ? "" : "w") + "p" +
                      num(p, 1) + "=" + num(s, 3) + (ok ? "" : "[X]");
        }
      }
  out.detail += "; local orders" + orders;
  return out;
}

// ---------------------------------------------------------------- AC4
Outcome ac4() {
  Outcome out;
  for (const char* f : {"interp_p1_unweighted.ini", "interp_p1_power.ini"}) {
    const ConvergenceReport r = runConfig(f);
    const double l2 = order(r, "err_Lp"), w1 = order(r, "err_W1p");
    out.check(within(l2, 2.0, 0.2) && within(w1, 1.0, 0.15),
              std::string(f) + " L2 " + num(l2) + " W1 " + num(w1));
  }
  const ConvergenceReport r = runConfig("interp_p2_1d.ini");
  out.check(within(order(r, "err_Lp"), 3.0, 0.2), "P2 1D L2 " + num(order(r, "err_Lp")));
  return out;
}

// ---------------------------------------------------------------- AC5
Outcome ac5() {
  Outcome out;
  for (const std::string w : {"unweighted", "extension"}) {
    const ConvergenceReport rx = runConfig("aniso_x_" + w + ".ini");
    const double l2 = order(rx, "err_Lp"), w1 = order(rx, "err_W1p");
    out.check(within(l2, 2.0, 0.2) && within(w1, 1.0, 0.15), w + " x-refined L2 " + num(l2) + " W1 " + num(w1));
    const ConvergenceReport ry = runConfig("aniso_y_" + w + ".ini");
    const double c0 = std::stod(ry.infoValue("relative_change_Lp"));
    const double c1 = std::stod(ry.infoValue("relative_change_W1p"));
    out.check(c0 < 0.05 && c1 < 0.05, w + " y-refined change " + num(std::max(c0, c1), 2));
  }
  return out;
}

// ---------------------------------------------------------------- AC6
Outcome ac6() {
  Outcome out;
  for (const char* f : {"elliptic_power_1d.ini", "elliptic_power_2d.ini"}) {
    const ConvergenceReport r = runConfig(f);
    const double e = order(r, "err_energy");
    const double res = std::stod(r.infoValue("max_galerkin_residual"));
    const bool cea = r.infoValue("cea_all_levels") == "1";
    out.check(within(e, 1.0, 0.15) && res <= 1e-9 && cea,
              std::string(f) + " H1w " + num(e) + " residual " + num(res, 2) + (cea ? " cea ok" : " cea broken"));
  }
  return out;
}

// ---------------------------------------------------------------- AC7
Outcome ac7() {
  Outcome out;
  const ConvergenceReport r = runConfig("dirac_square.ini");
  const double e = order(r, "err_L2");
  out.check(e >= 0.8, "L2 order " + num(e));
  const double last = std::stod(r.infoValue("grad_increment_last"));
  const double prev = std::stod(r.infoValue("grad_increment_previous"));
  out.check(std::abs(last) < 0.1 && std::abs(prev) < 0.1 && last <= prev,
            "grad increments " + num(prev, 3) + " -> " + num(last, 3));
  return out;
}

// ---------------------------------------------------------------- AC8
Outcome ac8() {
  Outcome out;
  double graded075 = 0.0;
  for (const char* tag : {"025", "05", "075"}) {
    const ConvergenceReport r = runConfig(std::string("fractional_s") + tag + "_graded.ini");
    const double t = order(r, "err_trace_L2");
    if (std::string(tag) == "075") graded075 = t;
    out.check(within(t, -0.5, 0.15), std::string("s0.") + (tag + 1) + " trace " + num(t) + " (energy " +
                                         num(order(r, "err_energy")) + ")");
    out.check(r.infoValue("ds_validated") == "1", "d_s amplitude " + r.infoValue("ds_amplitude").substr(0, 8) +
                                                     " vs " + r.infoValue("ds_amplitude_exact").substr(0, 8));
  }
  const ConvergenceReport u = runConfig("fractional_s075_uniform.ini");
  const double tu = order(u, "err_trace_L2");
  out.check(tu - graded075 >= 0.1, "uniform s0.75 trace " + num(tu) + " gap " + num(tu - graded075));
  return out;
}

// ---------------------------------------------------------------- AC9
Outcome ac9() {
  Outcome out;
  const ConvergenceReport r = runConfig("poincare_dilation.ini");
  out.check(r.rows.size() >= 5, std::to_string(r.rows.size() - 1) + " dilations");
  out.check(r.infoValue("bounded_by_1.05_coarsest") == "1", "ratios bounded");
  const double res = std::stod(r.infoValue("max_relation_residual"));
  out.check(res <= 1e-10, "dilation relation " + num(res, 2));
  return out;
}

// ---------------------------------------------------------------- AC10
Outcome ac10() {
  Outcome out;
  for (const char* f : {"ap_power_1d.ini", "poincare_dilation.ini", "interp_p2_1d.ini", "elliptic_power_1d.ini",
                        "fractional_s05_graded.ini", "interp_p1_power.ini", "dirac_square.ini"}) {
    ExperimentConfig cfg = loadConfig(std::string(MUCKFEM_CONFIG_DIR) + "/" + f);
    cfg.levels = std::min(cfg.levels, 3);
    refreshHash(cfg);
    std::ostringstream a, b;
    writeCsv(a, runExperiment(cfg));
    writeCsv(b, runExperiment(cfg));
    out.pass = out.pass && a.str() == b.str() && !a.str().empty();
    if (a.str() != b.str()) out.detail += std::string(f) + " differs [X]; ";
  }
  if (out.pass) out.detail = "7 configs reproduce byte for byte";
  return out;
}

struct Criterion {
  const char* id;
  double budget;  // seconds
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{{"AC1", 10, ac1},  {"AC2", 10, ac2},  {"AC3", 60, ac3},  {"AC4", 180, ac4},
                                   {"AC5", 120, ac5}, {"AC6", 180, ac6}, {"AC7", 300, ac7}, {"AC8", 600, ac8},
                                   {"AC9", 30, ac9},  {"AC10", 600, ac10}};
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && only != c.id) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    std::printf("%s %s (%.1f s): %s\n", c.id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
