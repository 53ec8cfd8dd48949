// Scaled polynomial bases on elements and edges, quadrature on the fan
// submesh, mass matrices and L2-orthogonal projections.
#pragma once

#include "polynodal/common.hpp"
#include "polynodal/mesh.hpp"

namespace polynodal {

struct QuadratureRule {
  PointList points;
  VectorXd weights;
  int exactness = 0;
};

/// Element rule assembled by mapping a tensorized Gauss rule (exact for the
/// declared total degree) to each fan triangle. Chunk c covers the points of
/// fan triangle c, whose corners are kept for barycentric evaluations.
struct ElementQuadrature {
  QuadratureRule rule;
  std::vector<int> chunkOffsets;                          // size nTriangles + 1
  std::vector<std::array<Vector2d, 3>> triangleCorners;   // first corner is x_T
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<VectorXd, VectorXd> gauss_legendre(int npoints);

QuadratureRule triangle_rule(const Vector2d &a, const Vector2d &b, const Vector2d &c, int degree);

ElementQuadrature element_quadrature(const PolygonalMesh &mesh, const SimplicialSubmesh &submesh,
                                     int element, int degree);

struct EdgeQuadrature {
  VectorXd ts;       // arclength parameter (s - s_E)/h_E in [-1/2, 1/2]
  PointList points;  // physical coordinates
  VectorXd weights;  // include the edge length, so weights sum to |E|
  int exactness = 0;
};

EdgeQuadrature edge_quadrature(const Vector2d &v0, const Vector2d &v1, int npoints);

/// Monomials ((x - x_T)/h_T)^alpha, |alpha| <= degree, in graded lexicographic
/// order, optionally orthonormalized against a quadrature-defined inner
/// product (Cholesky of the raw Gram).
class ElementBasis {
 public:
  ElementBasis() = default;
  ElementBasis(const Vector2d &center, double h, int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const Vector2d &center() const { return center_; }
  double lengthScale() const { return h_; }

  void orthonormalize(const QuadratureRule &quad);
  bool orthonormalized() const { return orthonormalized_; }

  /// Values of all basis functions at the given points (rows: points).
  MatrixXd values(const PointList &pts) const;
  /// x- and y-derivatives of all basis functions at the given points.
  std::pair<MatrixXd, MatrixXd> gradients(const PointList &pts) const;

 private:
  Vector2d center_ = Vector2d::Zero();
  double h_ = 1.;
  int degree_ = -1;
  std::vector<std::array<int, 2>> exponents_;
  MatrixXd transform_;  // rows: basis functions, cols: raw monomials
  bool orthonormalized_ = false;
};

/// Scaled 1D monomials t^j in the arclength parameter of an edge.
class EdgeBasis {
 public:
  EdgeBasis() = default;
  explicit EdgeBasis(int degree) : degree_(degree) {}

  int degree() const { return degree_; }
  int size() const { return edge_poly_dim(degree_); }

  MatrixXd values(const VectorXd &ts) const;

 private:
  int degree_ = -1;
};

/// Gram matrix of basis values under the quadrature weights.
MatrixXd gram_matrix(const MatrixXd &values, const VectorXd &weights);
MatrixXd mixed_gram(const MatrixXd &testValues, const MatrixXd &trialValues,
                    const VectorXd &weights);

/// Spectral condition number of a symmetric positive definite matrix; throws
/// NumericalError past 1e12, the degenerate-geometry threshold.
double checked_condition(const MatrixXd &gram, const std::string &what);

/// Coefficients of the L2-orthogonal projection of f onto the element basis.
VectorXd l2_project(const ElementBasis &basis, const ElementQuadrature &quad,
                    const ScalarField &f);
/// Same on an edge, f given in the edge arclength parameter through points.
VectorXd l2_project(const EdgeBasis &basis, const EdgeQuadrature &quad, const ScalarField &f);

struct VectorPolyMatrices {
  MatrixXd vecMass;    // 2 Nk x 2 Nk mass of P^k(T;R^2), componentwise blocks
  MatrixXd divMatrix;  // Nk1 x Nk1, coefficients of div((x-x_T) m_j) in the degree-(k+1) basis
  double divDeterminant = 0.;
};

/// Mass matrix of P^k(T;R^2) and the matrix of the divergence isomorphism
/// from (x - x_T) P^{k+1}(T) onto P^{k+1}(T).
VectorPolyMatrices vector_mass_and_div_matrices(const ElementBasis &basisK,
                                                const ElementBasis &basisK1,
                                                const ElementQuadrature &quad);

}  // namespace polynodal
