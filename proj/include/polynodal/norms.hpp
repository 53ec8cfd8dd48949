// Discrete norms on the DOF space, dual norms through the norm Gram, the two
// consistency-error functionals, and the norm-equivalence probe.
#pragma once

#include "polynodal/scheme.hpp"

namespace polynodal {

enum class GramKind { Energy, DofH1 };

/// Energy norm built from the reconstruction operators.
double energy_norm(const Operators &ops, const DofVector &v);

/// H1-like norm built directly from the DOFs.
double dof_h1_norm(const Operators &ops, const DofVector &v);

/// Global Gram of the selected norm restricted to the interior DOFs.
Eigen::SparseMatrix<double> interior_gram(const Operators &ops, GramKind kind);

enum class ConsistencyKind { Eh, FrakEh };

/// Linear functional on the interior DOFs, materialized as a vector in solver
/// numbering.
struct ConsistencyFunctional {
  ConsistencyKind kind = ConsistencyKind::Eh;
  VectorXd values;
};

/// Eh is ell_h(.) - a_h(sigma_h u, .); FrakEh replaces the load by the strong
/// form -sum_T (div grad u, R_T^a .).
ConsistencyFunctional consistency_functional(const Operators &ops, ConsistencyKind kind,
                                             const ScalarField &u, const ScalarField &f,
                                             const ScalarField &lapU, LoadVariant variant);

/// Dual norm sqrt(eps' N^{-1} eps) for the given interior Gram.
double dual_norm(const ConsistencyFunctional &functional,
                 const Eigen::SparseMatrix<double> &gram);

struct EquivalenceProbe {
  double sampleMin = 0., sampleMax = 0.;  // ratios |v|_{1,h} / |v|_{V_h}
  double eigenMin = 0., eigenMax = 0.;    // generalized eigenvalues of (H1, energy)
  bool eigenComputed = false;
};

/// Ratio statistics over seeded random interior vectors; if denseEigen is set
/// the exact generalized-eigenvalue brackets are also computed.
EquivalenceProbe norm_equivalence_probe(const Operators &ops, int samples, std::uint64_t seed,
                                        bool denseEigen);

}  // namespace polynodal
