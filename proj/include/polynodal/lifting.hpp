// Conforming lifting of DOF vectors into the Lagrange space of degree k+1 on
// the fan submesh: skeleton traces plus interior potential values, then a
// bubble correction restoring the element-wise degree-k moments.
#pragma once

#include "polynodal/recon.hpp"

namespace polynodal {

/// Continuous Lagrange space of degree k+1 on the simplicial submesh. Nodes
/// are the submesh points, then uniformly placed nodes on submesh edges, then
/// triangle-interior lattice nodes.
struct LagrangeSpace {
  int degree = 1;  // k + 1
  std::vector<Vector2d> nodes;
  std::vector<bool> boundaryNode;  // on the domain boundary
  std::vector<bool> skeletonNode;  // on the mesh skeleton (all mesh edges)
  std::vector<int> nodeMeshEdge;   // owning mesh edge for skeleton nodes, else -1
  std::vector<double> nodeEdgeParam;  // arclength parameter on the owning edge
  std::vector<int> nodeElement;    // owning element for non-skeleton nodes, else -1
  std::vector<std::vector<int>> triangleNodes;  // per submesh triangle, local lattice order
  MatrixXd referenceShape;  // inverse Vandermonde on the reference lattice

  int nodesPerTriangle() const { return (degree + 1) * (degree + 2) / 2; }
  int nNodes() const { return static_cast<int>(nodes.size()); }
};

LagrangeSpace build_lagrange_space(const PolygonalMesh &mesh, const SimplicialSubmesh &submesh,
                                   int k);

struct LiftedFunction {
  const LagrangeSpace *space = nullptr;
  VectorXd nodal;
};

/// Shape-function values at barycentric coordinates (rows: points, cols: the
/// local lattice nodes of a triangle).
MatrixXd lagrange_shape_values(const LagrangeSpace &space, const MatrixXd &barycentric);

/// Evaluates a lifted function (and its gradient) at points inside one
/// submesh triangle.
VectorXd evaluate_on_triangle(const LagrangeSpace &space, const SimplicialSubmesh &submesh,
                              const LiftedFunction &f, int triangle, const PointList &pts);
PointList gradient_on_triangle(const LagrangeSpace &space, const SimplicialSubmesh &submesh,
                               const LiftedFunction &f, int triangle, const PointList &pts);

/// First stage: skeleton nodes take the edge-trace values, interior nodes the
/// potential reconstruction of their element.
LiftedFunction lift_l1(const Operators &ops, const LagrangeSpace &space, const DofVector &v);

/// Second stage: per-element bubble correction b_T q with q in P^k(T) matching
/// the moments of the projected potential.
LiftedFunction lift_l2(const Operators &ops, const LagrangeSpace &space, const DofVector &v,
                       const LiftedFunction &l1);

LiftedFunction lift(const Operators &ops, const LagrangeSpace &space, const DofVector &v);

struct LiftReport {
  double projectionResidual = 0.;   // max_T |pi_T^k(L v) - R_T^L v|_{L2(T)}
  double consistencyResidual = 0.;  // max over T and spanning w of the form mismatch
  double boundednessRatio = 0.;     // |grad L v|_{L2} / |v|_{V_h}
};

LiftReport verify_lifting(const Operators &ops, const LagrangeSpace &space, const DofVector &v,
                          const LiftedFunction &lifted);

}  // namespace polynodal
