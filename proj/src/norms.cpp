#include "polynodal/norms.hpp"

#include <cmath>
#include <limits>

namespace polynodal {

namespace {

double quadratic_sum(const Operators &ops, const DofVector &v,
                     MatrixXd ElementOps::*gram) {
  double total = 0.;
  for (int iT = 0; iT < ops.mesh->nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    VectorXd local(el.nloc);
    for (int i = 0; i < el.nloc; i++) local[i] = v.data[el.globalDofs[i]];
    total += local.dot((el.*gram) * local);
  }
  return std::sqrt(std::max(0., total));
}

}  // namespace

double energy_norm(const Operators &ops, const DofVector &v) {
  return quadratic_sum(ops, v, &ElementOps::energyGram);
}

double dof_h1_norm(const Operators &ops, const DofVector &v) {
  return quadratic_sum(ops, v, &ElementOps::h1Gram);
}

Eigen::SparseMatrix<double> interior_gram(const Operators &ops, GramKind kind) {
  const DofLayout &layout = ops.layout;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int iT = 0; iT < ops.mesh->nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    const MatrixXd &G = (kind == GramKind::Energy) ? el.energyGram : el.h1Gram;
    for (int i = 0; i < el.nloc; i++) {
      long gi = layout.toSolver[el.globalDofs[i]];
      if (gi >= layout.nInterior) continue;
      for (int j = 0; j < el.nloc; j++) {
        long gj = layout.toSolver[el.globalDofs[j]];
        if (gj < layout.nInterior) triplets.emplace_back(gi, gj, G(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> gram(layout.nInterior, layout.nInterior);
  gram.setFromTriplets(triplets.begin(), triplets.end());
  return gram;
}

ConsistencyFunctional consistency_functional(const Operators &ops, ConsistencyKind kind,
                                             const ScalarField &u, const ScalarField &f,
                                             const ScalarField &lapU, LoadVariant variant) {
  const DofLayout &layout = ops.layout;
  DofVector sigmaU = interpolate(ops, u);

  ConsistencyFunctional out;
  out.kind = kind;
  out.values = VectorXd::Zero(layout.nInterior);
  for (int iT = 0; iT < ops.mesh->nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    VectorXd load;
    if (kind == ConsistencyKind::Eh) {
      load = local_load(ops, iT, variant, f);
    } else {
      // Strong form: -(div grad u, R_T^a .), shares the load quadrature path.
      load = local_load(ops, iT, LoadVariant::Potential,
                        [&lapU](const Vector2d &x) { return -lapU(x); });
    }
    VectorXd localU(el.nloc);
    for (int i = 0; i < el.nloc; i++) localU[i] = sigmaU.data[el.globalDofs[i]];
    VectorXd contribution = load - el.stiffness * localU;
    for (int i = 0; i < el.nloc; i++) {
      long gi = layout.toSolver[el.globalDofs[i]];
      if (gi < layout.nInterior) out.values[gi] += contribution[i];
    }
  }
  return out;
}

double dual_norm(const ConsistencyFunctional &functional,
                 const Eigen::SparseMatrix<double> &gram) {
  if (functional.values.size() == 0) return 0.;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("norm Gram is not positive definite");
  VectorXd riesz = llt.solve(functional.values);
  return std::sqrt(std::max(0., functional.values.dot(riesz)));
}

EquivalenceProbe norm_equivalence_probe(const Operators &ops, int samples, std::uint64_t seed,
                                        bool denseEigen) {
  const DofLayout &layout = ops.layout;
  EquivalenceProbe probe;
  if (layout.nInterior == 0) return probe;

  Eigen::SparseMatrix<double> energy = interior_gram(ops, GramKind::Energy);
  Eigen::SparseMatrix<double> h1 = interior_gram(ops, GramKind::DofH1);

  std::mt19937_64 rng(seed);
  probe.sampleMin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; s++) {
    VectorXd x(layout.nInterior);
    for (long i = 0; i < layout.nInterior; i++) x[i] = unit_real(rng);
    double num = std::sqrt(std::max(0., x.dot(h1 * x)));
    double den = std::sqrt(std::max(0., x.dot(energy * x)));
    double ratio = num / den;
    probe.sampleMin = std::min(probe.sampleMin, ratio);
    probe.sampleMax = std::max(probe.sampleMax, ratio);
  }

  if (denseEigen) {
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> eig(MatrixXd(h1), MatrixXd(energy),
                                                           Eigen::EigenvaluesOnly);
    probe.eigenMin = eig.eigenvalues().minCoeff();
    probe.eigenMax = eig.eigenvalues().maxCoeff();
    probe.eigenComputed = true;
  }
  return probe;
}

}  // namespace polynodal
