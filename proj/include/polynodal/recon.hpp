// Per-element reconstruction operators: edge traces, discrete gradient,
// potential reconstruction and its projection, all materialized as dense
// matrices acting on the local DOF ordering.
#pragma once

#include "polynodal/dofs.hpp"
#include "polynodal/poly.hpp"

namespace polynodal {

struct EdgeOps {
  int index = -1;
  Vector2d v0, v1;  // canonical endpoints of the mesh edge
  double length = 0.;
  bool boundary = false;
  EdgeQuadrature quad;
  EdgeBasis basisK1;   // trace space P^{k+1}(E)
  EdgeBasis basisKm1;  // moment space P^{k-1}(E)
  MatrixXd valK1;      // trace basis at the quadrature parameters
  MatrixXd valKm1;
  MatrixXd gramKm1;
  /// (k+2) x (k+2) solve of the trace conditions: acts on [moments; v(v0); v(v1)].
  MatrixXd trace;
};

struct ElementEdge {
  int edge = -1;
  bool flip = false;  // element traverses the edge from v1 to v0
  Vector2d normal;    // outward unit normal
  int momentSlot = -1;
  int endSlot0 = -1, endSlot1 = -1;  // local slots of the values at v0 / v1
};

struct ElementOps {
  int index = -1;
  Vector2d center;
  double h = 0., area = 0.;

  ElementQuadrature quad;      // exact to degree 2(k+2)
  ElementQuadrature loadQuad;  // higher degree, for integrals against data
  ElementBasis basisK1, basisK, basisKm1;
  MatrixXd valK1, dxK1, dyK1;
  MatrixXd valK, dxK, dyK;
  MatrixXd valKm1, dxKm1, dyKm1;
  MatrixXd gramK1, gramK, gramKm1;
  MatrixXd vecGram;  // block-diagonal mass of P^k(T;R^2)

  std::vector<ElementEdge> edges;
  std::vector<MatrixXd> edgeValK1, edgeValK, edgeValKm1;  // element bases on edge quadrature
  std::vector<MatrixXd> traceLocal;  // per edge: (k+2) x nloc, edge trace from local DOFs

  int nloc = 0;
  std::vector<long> globalDofs;

  MatrixXd gradient;            // 2 Nk x nloc
  MatrixXd potential;           // Nk1 x nloc
  MatrixXd projectedPotential;  // Nk x nloc
  MatrixXd interp;              // nloc x Nk1, sigma_T of a degree-(k+1) polynomial
  MatrixXd stabilization;       // nloc x nloc
  MatrixXd stiffness;           // nloc x nloc
  MatrixXd energyGram;          // nloc x nloc
  MatrixXd h1Gram;              // nloc x nloc

  int vertexSlot(int cyclePos) const;
};

/// Immutable per-mesh cache of all local operators for a fixed degree k.
struct Operators {
  const PolygonalMesh *mesh = nullptr;
  const SimplicialSubmesh *submesh = nullptr;
  int k = 0;
  DofLayout layout;
  std::vector<EdgeOps> edges;
  std::vector<ElementOps> elements;
};

Operators build_operators(const PolygonalMesh &mesh, const SimplicialSubmesh &submesh, int k,
                          int threads = 1);

/// Coefficients of the edge trace polynomial recovered from [moments; endpoint
/// values] of one edge.
VectorXd edge_trace(const EdgeOps &edge, const VectorXd &edgeDofs);

struct BoundednessProbe {
  double maxRatio = 0.;
  double minRatio = 0.;
};

/// Samples random members of P^{k+1}(T), which belong to the discrete space
/// through their DOFs, and returns the extreme ratios of the projected-norm
/// bound (projection norms over DOF norms).
BoundednessProbe projection_boundedness_probe(const Operators &ops, int element, int samples,
                                              std::uint64_t seed);

}  // namespace polynodal
