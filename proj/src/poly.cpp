#include "polynodal/poly.hpp"

#include <cmath>

namespace polynodal {

std::pair<VectorXd, VectorXd> gauss_legendre(int npoints) {
  VectorXd x(npoints), w(npoints);
  for (int i = 0; i < npoints; i++) {
    double t = std::cos(M_PI * (i + 0.75) / (npoints + 0.5));
    double dp = 0.;
    for (int it = 0; it < 100; it++) {
      // Legendre recurrence for P_n(t) and its derivative.
      double p0 = 1., p1 = t;
      for (int n = 2; n <= npoints; n++) {
        double p2 = ((2 * n - 1) * t * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = npoints * (t * p1 - p0) / (t * t - 1.);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2. / ((1. - t * t) * dp * dp);
  }
  return {x, w};
}

QuadratureRule triangle_rule(const Vector2d &a, const Vector2d &b, const Vector2d &c, int degree) {
  // Collapsed-square map x(u,v) = a + u (b - a) + u v (c - b) with Jacobian
  // 2 |K| u: a total-degree-d integrand is degree <= d+1 in u and <= d in v,
  // so tensorized Gauss of the sizes below integrates it exactly.
  int nu = (degree + 3) / 2;
  int nv = (degree + 2) / 2;
  nu = std::max(nu, 1);
  nv = std::max(nv, 1);
  auto [xu, wu] = gauss_legendre(nu);
  auto [xv, wv] = gauss_legendre(nv);

  double area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  QuadratureRule rule;
  rule.exactness = degree;
  rule.points.resize(nu * nv, 2);
  rule.weights.resize(nu * nv);
  int q = 0;
  for (int i = 0; i < nu; i++) {
    double u = 0.5 * (xu[i] + 1.);
    for (int j = 0; j < nv; j++, q++) {
      double v = 0.5 * (xv[j] + 1.);
      Vector2d p = a + u * (b - a) + u * v * (c - b);
      rule.points.row(q) = p.transpose();
      rule.weights[q] = 2. * area * u * wu[i] * wv[j] * 0.25;
    }
  }
  return rule;
}

ElementQuadrature element_quadrature(const PolygonalMesh &, const SimplicialSubmesh &submesh,
                                     int element, int degree) {
  ElementQuadrature eq;
  eq.rule.exactness = degree;
  int first = submesh.elementFirstTriangle[element];
  int last = submesh.elementFirstTriangle[element + 1];

  std::vector<QuadratureRule> parts;
  int total = 0;
  for (int t = first; t < last; t++) {
    const auto &tri = submesh.triangles[t];
    const Vector2d &a = submesh.points[tri.v[0]];
    const Vector2d &b = submesh.points[tri.v[1]];
    const Vector2d &c = submesh.points[tri.v[2]];
    parts.push_back(triangle_rule(a, b, c, degree));
    eq.triangleCorners.push_back({a, b, c});
    total += static_cast<int>(parts.back().weights.size());
  }
  eq.rule.points.resize(total, 2);
  eq.rule.weights.resize(total);
  eq.chunkOffsets.push_back(0);
  int at = 0;
  for (const auto &part : parts) {
    int m = static_cast<int>(part.weights.size());
    eq.rule.points.middleRows(at, m) = part.points;
    eq.rule.weights.segment(at, m) = part.weights;
    at += m;
    eq.chunkOffsets.push_back(at);
  }
  return eq;
}

EdgeQuadrature edge_quadrature(const Vector2d &v0, const Vector2d &v1, int npoints) {
  auto [x, w] = gauss_legendre(npoints);
  double len = (v1 - v0).norm();
  Vector2d mid = 0.5 * (v0 + v1);
  EdgeQuadrature eq;
  eq.exactness = 2 * npoints - 1;
  eq.ts.resize(npoints);
  eq.points.resize(npoints, 2);
  eq.weights.resize(npoints);
  for (int i = 0; i < npoints; i++) {
    eq.ts[i] = 0.5 * x[i];
    eq.points.row(i) = (mid + eq.ts[i] * (v1 - v0)).transpose();
    eq.weights[i] = 0.5 * w[i] * len;
  }
  return eq;
}

ElementBasis::ElementBasis(const Vector2d &center, double h, int degree)
    : center_(center), h_(h), degree_(degree) {
  for (int d = 0; d <= degree; d++)
    for (int ax = d; ax >= 0; ax--) exponents_.push_back({ax, d - ax});
  transform_ = MatrixXd::Identity(size(), size());
}

void ElementBasis::orthonormalize(const QuadratureRule &quad) {
  MatrixXd raw = values(quad.points);
  MatrixXd gram = gram_matrix(raw, quad.weights);
  Eigen::LLT<MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("element basis Gram is not positive definite");
  MatrixXd L = llt.matrixL();
  transform_ = L.triangularView<Eigen::Lower>().solve(transform_);
  orthonormalized_ = true;
}

MatrixXd ElementBasis::values(const PointList &pts) const {
  const int np = static_cast<int>(pts.rows());
  MatrixXd mono(np, size());
  for (int q = 0; q < np; q++) {
    double xi = (pts(q, 0) - center_.x()) / h_;
    double eta = (pts(q, 1) - center_.y()) / h_;
    for (int i = 0; i < size(); i++)
      mono(q, i) = std::pow(xi, exponents_[i][0]) * std::pow(eta, exponents_[i][1]);
  }
  return mono * transform_.transpose();
}

std::pair<MatrixXd, MatrixXd> ElementBasis::gradients(const PointList &pts) const {
  const int np = static_cast<int>(pts.rows());
  MatrixXd dx(np, size()), dy(np, size());
  for (int q = 0; q < np; q++) {
    double xi = (pts(q, 0) - center_.x()) / h_;
    double eta = (pts(q, 1) - center_.y()) / h_;
    for (int i = 0; i < size(); i++) {
      int a = exponents_[i][0], b = exponents_[i][1];
      dx(q, i) = a == 0 ? 0. : a * std::pow(xi, a - 1) * std::pow(eta, b) / h_;
      dy(q, i) = b == 0 ? 0. : b * std::pow(xi, a) * std::pow(eta, b - 1) / h_;
    }
  }
  return {dx * transform_.transpose(), dy * transform_.transpose()};
}

MatrixXd EdgeBasis::values(const VectorXd &ts) const {
  MatrixXd out(ts.size(), size());
  for (int q = 0; q < ts.size(); q++)
    for (int j = 0; j < size(); j++) out(q, j) = std::pow(ts[q], j);
  return out;
}

MatrixXd gram_matrix(const MatrixXd &values, const VectorXd &weights) {
  return values.transpose() * weights.asDiagonal() * values;
}

MatrixXd mixed_gram(const MatrixXd &testValues, const MatrixXd &trialValues,
                    const VectorXd &weights) {
  return testValues.transpose() * weights.asDiagonal() * trialValues;
}

double checked_condition(const MatrixXd &gram, const std::string &what) {
  if (gram.rows() == 0) return 1.;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  double lmin = eig.eigenvalues().minCoeff();
  double lmax = eig.eigenvalues().maxCoeff();
  if (lmin <= 0. || lmax / lmin > 1e12)
    throw NumericalError(what + ": Gram condition " +
                         std::to_string(lmin > 0. ? lmax / lmin : -1.) + " exceeds 1e12");
  return lmax / lmin;
}

namespace {

VectorXd project_from_values(const MatrixXd &basisValues, const VectorXd &weights,
                             const VectorXd &fValues) {
  if (basisValues.cols() == 0) return VectorXd();
  MatrixXd gram = gram_matrix(basisValues, weights);
  VectorXd rhs = basisValues.transpose() * (weights.asDiagonal() * fValues);
  Eigen::LDLT<MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError("singular Gram in L2 projection");
  return ldlt.solve(rhs);
}

}  // namespace

VectorXd l2_project(const ElementBasis &basis, const ElementQuadrature &quad,
                    const ScalarField &f) {
  VectorXd fv(quad.rule.weights.size());
  for (int q = 0; q < fv.size(); q++) fv[q] = f(quad.rule.points.row(q).transpose());
  return project_from_values(basis.values(quad.rule.points), quad.rule.weights, fv);
}

VectorXd l2_project(const EdgeBasis &basis, const EdgeQuadrature &quad, const ScalarField &f) {
  VectorXd fv(quad.weights.size());
  for (int q = 0; q < fv.size(); q++) fv[q] = f(quad.points.row(q).transpose());
  return project_from_values(basis.values(quad.ts), quad.weights, fv);
}

VectorPolyMatrices vector_mass_and_div_matrices(const ElementBasis &basisK,
                                                const ElementBasis &basisK1,
                                                const ElementQuadrature &quad) {
  const VectorXd &w = quad.rule.weights;
  const int nk = basisK.size();
  const int nk1 = basisK1.size();

  VectorPolyMatrices out;
  MatrixXd massK = gram_matrix(basisK.values(quad.rule.points), w);
  out.vecMass = MatrixXd::Zero(2 * nk, 2 * nk);
  out.vecMass.topLeftCorner(nk, nk) = massK;
  out.vecMass.bottomRightCorner(nk, nk) = massK;

  // div((x - x_T) m_j) = 2 m_j + (x - x_T) . grad m_j, a polynomial of degree
  // <= k+1 whose coefficients are recovered against the degree-(k+1) Gram.
  MatrixXd valK1 = basisK1.values(quad.rule.points);
  auto [dxK1, dyK1] = basisK1.gradients(quad.rule.points);
  MatrixXd divVals(w.size(), nk1);
  for (int q = 0; q < w.size(); q++) {
    Vector2d r = quad.rule.points.row(q).transpose() - basisK1.center();
    divVals.row(q) = 2. * valK1.row(q) + r.x() * dxK1.row(q) + r.y() * dyK1.row(q);
  }
  MatrixXd gramK1 = gram_matrix(valK1, w);
  MatrixXd rhs = mixed_gram(valK1, divVals, w);
  Eigen::PartialPivLU<MatrixXd> lu(gramK1);
  out.divMatrix = lu.solve(rhs);

  Eigen::PartialPivLU<MatrixXd> divLU(out.divMatrix);
  out.divDeterminant = divLU.determinant();
  VectorXd diag = divLU.matrixLU().diagonal().cwiseAbs();
  if (diag.size() > 0 && diag.minCoeff() < 1e-13 * diag.maxCoeff())
    throw NumericalError("divergence matrix numerically singular (pivot ratio " +
                         std::to_string(diag.minCoeff() / diag.maxCoeff()) + ")");
  return out;
}

}  // namespace polynodal
