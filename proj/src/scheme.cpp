#include "polynodal/scheme.hpp"

#include <cmath>
#include <limits>

namespace polynodal {

LoadVariant load_variant_from_string(const std::string &name) {
  if (name == "projected") return LoadVariant::Projected;
  if (name == "potential") return LoadVariant::Potential;
  throw ParseError("unknown load variant: " + name);
}

std::string to_string(LoadVariant variant) {
  return variant == LoadVariant::Projected ? "projected" : "potential";
}

VectorXd local_load(const Operators &ops, int element, LoadVariant variant,
                    const ScalarField &f) {
  const ElementOps &el = ops.elements[element];
  const VectorXd &w = el.loadQuad.rule.weights;
  VectorXd fv(w.size());
  for (int q = 0; q < w.size(); q++) fv[q] = f(el.loadQuad.rule.points.row(q).transpose());
  if (variant == LoadVariant::Projected) {
    VectorXd moments = el.basisK.values(el.loadQuad.rule.points).transpose() * (w.asDiagonal() * fv);
    return el.projectedPotential.transpose() * moments;
  }
  VectorXd moments = el.basisK1.values(el.loadQuad.rule.points).transpose() * (w.asDiagonal() * fv);
  return el.potential.transpose() * moments;
}

LinearSystem assemble(const Operators &ops, LoadVariant variant, const ScalarField &f,
                      const ScalarField &g, std::optional<int> fPolynomialDegree) {
  if (fPolynomialDegree && *fPolynomialDegree > ops.k + 3)
    throw ValidationError("declared polynomial degree " + std::to_string(*fPolynomialDegree) +
                          " of f exceeds the quadrature budget k+3");

  const DofLayout &layout = ops.layout;
  LinearSystem sys;
  sys.ops = &ops;
  sys.boundaryData = apply_dirichlet(ops, zero_dof_vector(layout), g);

  VectorXd rhs = VectorXd::Zero(layout.nInterior);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int iT = 0; iT < ops.mesh->nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    VectorXd load = local_load(ops, iT, variant, f);
    for (int i = 0; i < el.nloc; i++) {
      long gi = layout.toSolver[el.globalDofs[i]];
      if (gi >= layout.nInterior) continue;
      rhs[gi] += load[i];
      for (int j = 0; j < el.nloc; j++) {
        long gj = layout.toSolver[el.globalDofs[j]];
        double a = el.stiffness(i, j);
        if (gj < layout.nInterior) {
          triplets.emplace_back(gi, gj, a);
        } else {
          rhs[gi] -= a * sys.boundaryData.data[el.globalDofs[j]];
        }
      }
    }
  }
  sys.matrix.resize(layout.nInterior, layout.nInterior);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.rhs = rhs;
  return sys;
}

DofVector solve(const LinearSystem &system) {
  const Operators &ops = *system.ops;
  const DofLayout &layout = ops.layout;
  DofVector u = system.boundaryData;
  if (layout.nInterior == 0) return u;

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(system.matrix);
  if (llt.info() != Eigen::Success)
    throw NumericalError("interior matrix is not positive definite (Cholesky failed)");
  VectorXd x = llt.solve(system.rhs);
  double rhsNorm = system.rhs.norm();
  double residual = (system.matrix * x - system.rhs).norm();
  if (rhsNorm > 0. && residual > 1e-12 * std::max(1., rhsNorm))
    throw NumericalError("solver residual " + std::to_string(residual / rhsNorm) +
                         " exceeds tolerance");
  for (long s = 0; s < layout.nInterior; s++) u.data[layout.fromSolver[s]] = x[s];
  return u;
}

std::pair<double, double> element_rayleigh_extremes(const MatrixXd &form, const MatrixXd &norm) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eigB(norm);
  const VectorXd &lambda = eigB.eigenvalues();
  double lmax = lambda.maxCoeff();
  // Deflate the common kernel (the constants) before forming the pencil.
  std::vector<int> keep;
  for (int i = 0; i < lambda.size(); i++)
    if (lambda[i] > 1e-10 * lmax) keep.push_back(i);
  if (keep.empty()) throw NumericalError("norm Gram has no positive directions");
  MatrixXd Z(norm.rows(), keep.size());
  for (size_t c = 0; c < keep.size(); c++)
    Z.col(c) = eigB.eigenvectors().col(keep[c]) / std::sqrt(lambda[keep[c]]);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eigA(Z.transpose() * form * Z,
                                               Eigen::EigenvaluesOnly);
  return {eigA.eigenvalues().minCoeff(), eigA.eigenvalues().maxCoeff()};
}

CoercivityBrackets coercivity_brackets(const Operators &ops) {
  CoercivityBrackets out;
  out.min = std::numeric_limits<double>::infinity();
  out.max = 0.;
  for (int iT = 0; iT < ops.mesh->nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    auto [lo, hi] = element_rayleigh_extremes(el.stiffness, el.energyGram);
    if (lo < out.min) {
      out.min = lo;
      out.argminElement = iT;
    }
    out.max = std::max(out.max, hi);
  }
  return out;
}

}  // namespace polynodal
