// Global scheme: stabilized stiffness assembly, load vectors (two variants),
// Dirichlet elimination, sparse Cholesky solve, and coercivity diagnostics.
#pragma once

#include "polynodal/recon.hpp"

#include <Eigen/Sparse>

#include <optional>

namespace polynodal {

enum class LoadVariant { Projected, Potential };

LoadVariant load_variant_from_string(const std::string &name);
std::string to_string(LoadVariant variant);

struct LinearSystem {
  const Operators *ops = nullptr;
  Eigen::SparseMatrix<double> matrix;  // interior x interior, SPD
  VectorXd rhs;                        // interior
  DofVector boundaryData;              // full vector, zero on interior DOFs
};

/// Local load vector of one element for the selected variant.
VectorXd local_load(const Operators &ops, int element, LoadVariant variant, const ScalarField &f);

/// Assembles the eliminated interior system for -div grad u = f with Dirichlet
/// data g. If f is declared polynomial, its degree must fit the quadrature
/// budget (degree <= k+3).
LinearSystem assemble(const Operators &ops, LoadVariant variant, const ScalarField &f,
                      const ScalarField &g, std::optional<int> fPolynomialDegree = {});

/// Sparse Cholesky solve; returns the full DOF vector including the Dirichlet
/// data and checks the relative residual.
DofVector solve(const LinearSystem &system);

struct CoercivityBrackets {
  double min = 0.;  // over all elements, smallest generalized Rayleigh quotient
  double max = 0.;
  int argminElement = -1;
};

/// Extremes of a_T(v,v) / |v|_{V_T}^2 per element, computed by a dense
/// generalized eigensolve on the complement of the common constant kernel.
CoercivityBrackets coercivity_brackets(const Operators &ops);

/// Rayleigh extremes for a single element (exposed for sampling tests).
std::pair<double, double> element_rayleigh_extremes(const MatrixXd &form, const MatrixXd &norm);

}  // namespace polynodal
