// Fully discrete DOF space: element and edge polynomial moments plus vertex
// values, with interpolation, local restriction and Dirichlet handling.
#pragma once

#include "polynodal/common.hpp"
#include "polynodal/mesh.hpp"

namespace polynodal {

struct Operators;  // recon.hpp

/// Entity-ordered storage layout: all element blocks, then all edge blocks,
/// then vertex values. The solver numbering permutes interior DOFs first and
/// boundary DOFs contiguously at the tail.
struct DofLayout {
  int k = 0;
  int nElements = 0, nEdges = 0, nVertices = 0;
  int elemBlock = 0;  // dim P^{k-1}(T) = k(k+1)/2
  int edgeBlock = 0;  // dim P^{k-1}(E) = k
  long nInterior = 0, nBoundary = 0;
  std::vector<long> toSolver;    // entity index -> solver index
  std::vector<long> fromSolver;  // solver index -> entity index

  long total() const { return static_cast<long>(toSolver.size()); }
  long elemOffset(int T) const { return static_cast<long>(T) * elemBlock; }
  long edgeOffset(int E) const {
    return static_cast<long>(nElements) * elemBlock + static_cast<long>(E) * edgeBlock;
  }
  long vertexOffset(int V) const {
    return static_cast<long>(nElements) * elemBlock + static_cast<long>(nEdges) * edgeBlock + V;
  }
};

DofLayout make_dof_layout(const PolygonalMesh &mesh, int k);

/// Coefficient vector in entity order; realizes the DOF spaces with and
/// without the homogeneous boundary constraint.
struct DofVector {
  int k = 0;
  VectorXd data;
};

DofVector zero_dof_vector(const DofLayout &layout);

/// Entity-ordered global indices of the local DOFs of one element: element
/// moments, then the moments of each edge in E_T order, then the vertex
/// values in cycle order.
std::vector<long> local_dof_indices(const PolygonalMesh &mesh, const DofLayout &layout,
                                    int element);

/// Local restriction v_T of a DOF vector.
VectorXd restrict_local(const PolygonalMesh &mesh, const DofLayout &layout, const DofVector &v,
                        int element);

/// Interpolator: element and edge moments are L2 projections of v, vertex
/// entries are point values.
DofVector interpolate(const Operators &ops, const ScalarField &v);

/// Overwrites boundary edge moments and boundary vertex values with the data
/// of g; interior entries are untouched.
DofVector apply_dirichlet(const Operators &ops, const DofVector &v, const ScalarField &g);

std::string to_json(const DofVector &v, const DofLayout &layout, const std::string &meshChecksum);
DofVector dof_vector_from_json(const std::string &text, const DofLayout &layout);

}  // namespace polynodal
