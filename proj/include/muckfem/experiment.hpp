#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "muckfem/fit.hpp"
#include "muckfem/mesh.hpp"
#include "muckfem/weights.hpp"

namespace muckfem {

/// One experiment per INI file. Sections: [experiment], [mesh], [weight],
/// [rho] (second weight of metrics-check), [norm], [problem], [tolerances],
/// [output]. Unknown keys are a ConfigError so typos do not pass silently.
struct ExperimentConfig {
  std::string kind;
  std::string name = "experiment";
  int levels = 5;
  bool fitAllLevels = false;

  // mesh
  std::string family = "simplicial";  // simplicial | tensor
  int dim = 2;
  Domain domain = Domain::unitSquare();
  int n0 = 4;  // elements per side on the coarsest level
  int degree = 1;

  WeightSpec weight;
  WeightSpec rho;

  // norms
  double p = 2.0;
  double q = 2.0;
  int k = 0;

  // problem
  std::string function = "sin-product";
  Point x0{0.5, 0.5};
  double s = 0.5;
  double gamma = 0.0;  // 0: 3/(1-alpha) + 0.1
  bool graded = true;
  std::vector<double> fSine{1.0, 1.0};
  std::vector<double> exponents;
  std::string direction = "x";
  int nFixed = 8;
  double windowLo = -0.5, windowHi = 0.5;
  int samples = 20;
  std::uint64_t seed = 20240601;
  int referenceRefinements = 2;

  double quadTol = 1e-10;
  double solverTol = 1e-10;

  std::string outDir = ".";
  std::vector<std::string> formats{"csv", "summary"};

  std::string hash;  // of the canonical key = value listing
};

ExperimentConfig parseConfig(std::istream& is);
ExperimentConfig loadConfig(const std::string& path);
/// Recompute cfg.hash after editing fields (CLI overrides).
void refreshHash(ExperimentConfig& cfg);

struct ConvergenceReport {
  struct Fit {
    std::string column;
    std::string abscissa;
    FitResult result;
    int rowsUsed = 0;
  };

  std::string kind;
  std::string name;
  std::string configHash;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Fit> fits;
  std::vector<std::pair<std::string, std::string>> info;  // flags and tolerances
  double wallSeconds = 0.0;                                // never written to files

  double value(int row, const std::string& column) const;
  const Fit* fit(const std::string& column) const;
  std::string infoValue(const std::string& key) const;
};

/// Kinds: interp-rate, aniso-rate, ap-check, poincare, elliptic-rate,
/// dirac-rate, fractional-rate, metrics-check. Module errors propagate with
/// the failing level in the message.
ConvergenceReport runExperiment(const ExperimentConfig& cfg);

std::vector<std::pair<std::string, std::string>> listExperiments();

/// Least squares over the last max(3, levels - 1) rows (all rows if asked).
ConvergenceReport::Fit fitColumn(const ConvergenceReport& rep, const std::string& x, const std::string& y,
                                 bool allRows);

void writeCsv(std::ostream& os, const ConvergenceReport& rep);
void writeSummary(std::ostream& os, const ConvergenceReport& rep);
/// Writes <name>.csv, <name>.summary and <name>.<column>.dat as requested;
/// returns the paths. IOError on failure.
std::vector<std::string> emitReport(const ConvergenceReport& rep, const std::string& dir,
                                    const std::vector<std::string>& formats);

}  // namespace muckfem
