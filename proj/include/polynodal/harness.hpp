// Manufactured-solution registry, convergence studies and report emission.
#pragma once

#include "polynodal/norms.hpp"

#include <map>

namespace polynodal {

struct ManufacturedCase {
  std::string name;
  ScalarField u;
  VectorField gradU;
  ScalarField lapU;
  ScalarField f;          // -lapU
  int polynomialDegree = -1;  // -1 for non-polynomial (smooth) cases
};

/// Shipped cases: zero, linear, quadratic, bubble4, sinsin.
const std::map<std::string, ManufacturedCase> &case_registry();
const ManufacturedCase &find_case(const std::string &name);

/// Pure monomial x^a y^b with its closed-form derivatives.
ManufacturedCase monomial_case(int ax, int ay);

/// Checks -lap u = f on a 10x10 interior sample grid.
double manufactured_defect(const ManufacturedCase &mc);

struct StudyRow {
  MeshFamily family;
  int n = 0;
  double h = 0.;
  int k = 0;
  double energyError = 0.;
  double dualEh = 0.;
  double dualFrakEh = 0.;
  double coercivityMin = 0.;
  double coercivityMax = 0.;
};

struct ConvergenceReport {
  std::vector<StudyRow> rows;  // sorted by decreasing h

  double eoc(size_t i, double StudyRow::*field) const;
};

struct StudyConfig {
  std::string caseName = "sinsin";
  MeshFamily family = MeshFamily::Cartesian;
  int k = 1;
  std::vector<int> levels = {4, 8, 16, 32};
  std::uint64_t seed = 0;
  LoadVariant loadVariant = LoadVariant::Projected;
  int threads = 1;
  // Scatter-add runs in element order after the parallel per-element stage,
  // so results are reproducible for any thread count either way.
  bool orderedAccumulation = true;
};

StudyConfig study_config_from_json(const std::string &text);

/// For each level: generate, assemble, solve, and record the energy error and
/// the dual norms of both consistency functionals.
ConvergenceReport run_study(const ManufacturedCase &mc, const StudyConfig &config);

std::string emit_csv(const ConvergenceReport &report);
std::string emit_json(const ConvergenceReport &report);

/// Named scalar fields accepted by the CLI for forcing and boundary data.
ScalarField named_field(const std::string &name);

}  // namespace polynodal
