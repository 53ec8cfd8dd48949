#include "polynodal/recon.hpp"

#include <cmath>
#include <limits>

namespace polynodal {

int ElementOps::vertexSlot(int cyclePos) const {
  int k = basisK.degree();
  return poly_dim(k - 1) + static_cast<int>(edges.size()) * k + cyclePos;
}

namespace {

EdgeOps build_edge_ops(const PolygonalMesh &mesh, int iE, int k) {
  const Edge &edge = mesh.edges[iE];
  EdgeOps ops;
  ops.index = iE;
  ops.v0 = mesh.vertices[edge.v0];
  ops.v1 = mesh.vertices[edge.v1];
  ops.length = (ops.v1 - ops.v0).norm();
  ops.boundary = edge.boundary;
  ops.quad = edge_quadrature(ops.v0, ops.v1, k + 2);
  ops.basisK1 = EdgeBasis(k + 1);
  ops.basisKm1 = EdgeBasis(k - 1);
  ops.valK1 = ops.basisK1.values(ops.quad.ts);
  ops.valKm1 = ops.basisKm1.values(ops.quad.ts);
  ops.gramKm1 = gram_matrix(ops.valKm1, ops.quad.weights);

  // Defining conditions of the trace: moments against P^{k-1}(E) match the
  // moment polynomial, endpoint values match the vertex DOFs.
  const int n = k + 2;
  MatrixXd system(n, n), data = MatrixXd::Zero(n, n);
  system.topRows(k) = mixed_gram(ops.valKm1, ops.valK1, ops.quad.weights);
  data.topLeftCorner(k, k) = ops.gramKm1;
  VectorXd ends(2);
  ends << -0.5, 0.5;
  MatrixXd endVals = ops.basisK1.values(ends);
  system.row(k) = endVals.row(0);
  system.row(k + 1) = endVals.row(1);
  data(k, k) = 1.;
  data(k + 1, k + 1) = 1.;
  Eigen::PartialPivLU<MatrixXd> lu(system);
  VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.minCoeff() < 1e-13 * diag.maxCoeff())
    throw NumericalError("degenerate edge trace system on edge " + std::to_string(iE));
  ops.trace = lu.solve(data);
  return ops;
}

}  // namespace

VectorXd edge_trace(const EdgeOps &edge, const VectorXd &edgeDofs) {
  return edge.trace * edgeDofs;
}

namespace {

void build_element_ops(const PolygonalMesh &mesh, const SimplicialSubmesh &submesh,
                       const std::vector<EdgeOps> &edgeOps, const DofLayout &layout, int iT,
                       int k, ElementOps &el) {
  const Element &E = mesh.elements[iT];
  const int nE = static_cast<int>(E.edges.size());
  const int nV = static_cast<int>(E.vertices.size());
  const int nkm1 = poly_dim(k - 1);
  const int nk = poly_dim(k);
  const int nk1 = poly_dim(k + 1);

  el.index = iT;
  el.center = E.center;
  el.h = E.diameter;
  el.area = E.area;
  el.quad = element_quadrature(mesh, submesh, iT, 2 * (k + 2));
  el.loadQuad = element_quadrature(mesh, submesh, iT, 2 * (k + 2) + 4);
  const VectorXd &w = el.quad.rule.weights;

  el.basisK1 = ElementBasis(el.center, el.h, k + 1);
  el.basisK = ElementBasis(el.center, el.h, k);
  el.basisKm1 = ElementBasis(el.center, el.h, k - 1);
  if (k >= 2) {
    el.basisK1.orthonormalize(el.quad.rule);
    el.basisK.orthonormalize(el.quad.rule);
    el.basisKm1.orthonormalize(el.quad.rule);
  }

  el.valK1 = el.basisK1.values(el.quad.rule.points);
  std::tie(el.dxK1, el.dyK1) = el.basisK1.gradients(el.quad.rule.points);
  el.valK = el.basisK.values(el.quad.rule.points);
  std::tie(el.dxK, el.dyK) = el.basisK.gradients(el.quad.rule.points);
  el.valKm1 = el.basisKm1.values(el.quad.rule.points);
  std::tie(el.dxKm1, el.dyKm1) = el.basisKm1.gradients(el.quad.rule.points);
  el.gramK1 = gram_matrix(el.valK1, w);
  el.gramK = gram_matrix(el.valK, w);
  el.gramKm1 = gram_matrix(el.valKm1, w);
  checked_condition(el.gramK1, "element " + std::to_string(iT));

  el.vecGram = MatrixXd::Zero(2 * nk, 2 * nk);
  el.vecGram.topLeftCorner(nk, nk) = el.gramK;
  el.vecGram.bottomRightCorner(nk, nk) = el.gramK;

  // Local ordering: element moments, per-edge moments, vertex values.
  el.nloc = nkm1 + nE * k + nV;
  el.globalDofs.clear();
  for (int i = 0; i < nkm1; i++) el.globalDofs.push_back(layout.elemOffset(iT) + i);
  for (int e = 0; e < nE; e++)
    for (int i = 0; i < k; i++) el.globalDofs.push_back(layout.edgeOffset(E.edges[e]) + i);
  for (int v = 0; v < nV; v++) el.globalDofs.push_back(layout.vertexOffset(E.vertices[v]));

  auto cyclePos = [&](int vertex) {
    for (int i = 0; i < nV; i++)
      if (E.vertices[i] == vertex) return i;
    throw ValidationError("vertex not on element cycle");
  };

  el.edges.resize(nE);
  el.edgeValK1.resize(nE);
  el.edgeValK.resize(nE);
  el.edgeValKm1.resize(nE);
  el.traceLocal.resize(nE);
  for (int e = 0; e < nE; e++) {
    const EdgeOps &eo = edgeOps[E.edges[e]];
    ElementEdge &ee = el.edges[e];
    ee.edge = E.edges[e];
    int a = E.vertices[e], b = E.vertices[(e + 1) % nV];
    ee.flip = (a != mesh.edges[ee.edge].v0);
    Vector2d tangent = (mesh.vertices[b] - mesh.vertices[a]).normalized();
    ee.normal = Vector2d(tangent.y(), -tangent.x());
    ee.momentSlot = nkm1 + e * k;
    ee.endSlot0 = nkm1 + nE * k + cyclePos(mesh.edges[ee.edge].v0);
    ee.endSlot1 = nkm1 + nE * k + cyclePos(mesh.edges[ee.edge].v1);

    el.edgeValK1[e] = el.basisK1.values(eo.quad.points);
    el.edgeValK[e] = el.basisK.values(eo.quad.points);
    el.edgeValKm1[e] = el.basisKm1.values(eo.quad.points);

    MatrixXd gather = MatrixXd::Zero(k + 2, el.nloc);
    for (int i = 0; i < k; i++) gather(i, ee.momentSlot + i) = 1.;
    gather(k, ee.endSlot0) = 1.;
    gather(k + 1, ee.endSlot1) = 1.;
    el.traceLocal[e] = eo.trace * gather;
  }

  // Discrete gradient: vecGram * gradient = rhs, tested against P^k(T;R^2).
  MatrixXd rhsG = MatrixXd::Zero(2 * nk, el.nloc);
  if (nkm1 > 0) {
    rhsG.topRows(nk).leftCols(nkm1) -= mixed_gram(el.dxK, el.valKm1, w);
    rhsG.bottomRows(nk).leftCols(nkm1) -= mixed_gram(el.dyK, el.valKm1, w);
  }
  for (int e = 0; e < nE; e++) {
    const EdgeOps &eo = edgeOps[el.edges[e].edge];
    MatrixXd gammaVals = eo.valK1 * el.traceLocal[e];  // nqE x nloc
    MatrixXd flux = el.edgeValK[e].transpose() * eo.quad.weights.asDiagonal() * gammaVals;
    rhsG.topRows(nk) += el.edges[e].normal.x() * flux;
    rhsG.bottomRows(nk) += el.edges[e].normal.y() * flux;
  }
  Eigen::LDLT<MatrixXd> vecLDLT(el.vecGram);
  if (vecLDLT.info() != Eigen::Success)
    throw NumericalError("singular vector mass matrix on element " + std::to_string(iT));
  el.gradient = vecLDLT.solve(rhsG);

  // Potential reconstruction, tested against (x - x_T) P^{k+1}(T).
  MatrixXd tauX(w.size(), nk1), tauY(w.size(), nk1), divVals(w.size(), nk1);
  for (int q = 0; q < w.size(); q++) {
    Vector2d r = el.quad.rule.points.row(q).transpose() - el.center;
    tauX.row(q) = r.x() * el.valK1.row(q);
    tauY.row(q) = r.y() * el.valK1.row(q);
    divVals.row(q) = 2. * el.valK1.row(q) + r.x() * el.dxK1.row(q) + r.y() * el.dyK1.row(q);
  }
  MatrixXd lhsR = mixed_gram(divVals, el.valK1, w);  // rows: tau_j, cols: potential coeffs
  MatrixXd crossG(nk1, 2 * nk);
  crossG.leftCols(nk) = mixed_gram(tauX, el.valK, w);
  crossG.rightCols(nk) = mixed_gram(tauY, el.valK, w);
  MatrixXd rhsR = -crossG * el.gradient;
  for (int e = 0; e < nE; e++) {
    const EdgeOps &eo = edgeOps[el.edges[e].edge];
    const Vector2d &n = el.edges[e].normal;
    MatrixXd tauN(eo.quad.ts.size(), nk1);
    for (int q = 0; q < eo.quad.ts.size(); q++) {
      Vector2d r = eo.quad.points.row(q).transpose() - el.center;
      tauN.row(q) = (r.x() * n.x() + r.y() * n.y()) * el.edgeValK1[e].row(q);
    }
    MatrixXd gammaVals = eo.valK1 * el.traceLocal[e];
    rhsR += tauN.transpose() * eo.quad.weights.asDiagonal() * gammaVals;
  }
  Eigen::PartialPivLU<MatrixXd> luR(lhsR);
  VectorXd diagR = luR.matrixLU().diagonal().cwiseAbs();
  if (diagR.minCoeff() < 1e-13 * diagR.maxCoeff())
    throw NumericalError("singular divergence system on element " + std::to_string(iT));
  el.potential = luR.solve(rhsR);

  Eigen::LDLT<MatrixXd> gramKldlt(el.gramK);
  el.projectedPotential = gramKldlt.solve(mixed_gram(el.valK, el.valK1, w)) * el.potential;

  // Interpolation of a degree-(k+1) polynomial back into the local DOFs.
  el.interp = MatrixXd::Zero(el.nloc, nk1);
  if (nkm1 > 0)
    el.interp.topRows(nkm1) =
        Eigen::LDLT<MatrixXd>(el.gramKm1).solve(mixed_gram(el.valKm1, el.valK1, w));
  if (k > 0) {
    for (int e = 0; e < nE; e++) {
      const EdgeOps &eo = edgeOps[el.edges[e].edge];
      MatrixXd moments = eo.valKm1.transpose() * eo.quad.weights.asDiagonal() * el.edgeValK1[e];
      el.interp.middleRows(el.edges[e].momentSlot, k) =
          Eigen::LDLT<MatrixXd>(eo.gramKm1).solve(moments);
    }
  }
  PointList corners(nV, 2);
  for (int v = 0; v < nV; v++) corners.row(v) = mesh.vertices[E.vertices[v]].transpose();
  el.interp.bottomRows(nV) = el.basisK1.values(corners);

  // Stabilization on raw local vectors.
  el.stabilization = MatrixXd::Zero(el.nloc, el.nloc);
  for (int e = 0; e < nE; e++) {
    const EdgeOps &eo = edgeOps[el.edges[e].edge];
    if (k > 0)
      el.stabilization.block(el.edges[e].momentSlot, el.edges[e].momentSlot, k, k) +=
          eo.gramKm1 / el.h;
  }
  for (int v = 0; v < nV; v++) {
    int slot = nkm1 + nE * k + v;
    el.stabilization(slot, slot) += 1.;
  }

  MatrixXd consistency = el.gradient.transpose() * el.vecGram * el.gradient;
  MatrixXd delta = MatrixXd::Identity(el.nloc, el.nloc) - el.interp * el.potential;
  el.stiffness = consistency + delta.transpose() * el.stabilization * delta;
  el.stiffness = 0.5 * (el.stiffness + el.stiffness.transpose()).eval();

  // Energy norm Gram: gradient part plus the scaled boundary mismatch
  // between the potential trace and the edge trace reconstruction.
  el.energyGram = consistency;
  for (int e = 0; e < nE; e++) {
    const EdgeOps &eo = edgeOps[el.edges[e].edge];
    MatrixXd mismatch = el.edgeValK1[e] * el.potential - eo.valK1 * el.traceLocal[e];
    el.energyGram += mismatch.transpose() * eo.quad.weights.asDiagonal() * mismatch / el.h;
  }
  el.energyGram = 0.5 * (el.energyGram + el.energyGram.transpose()).eval();

  // DOF-based H1 norm Gram, with the element polynomial extended by zero
  // when k = 0.
  el.h1Gram = MatrixXd::Zero(el.nloc, el.nloc);
  if (nkm1 > 0) {
    el.h1Gram.topLeftCorner(nkm1, nkm1) =
        mixed_gram(el.dxKm1, el.dxKm1, w) + mixed_gram(el.dyKm1, el.dyKm1, w);
  }
  for (int e = 0; e < nE; e++) {
    const EdgeOps &eo = edgeOps[el.edges[e].edge];
    MatrixXd jump = MatrixXd::Zero(eo.quad.ts.size(), el.nloc);
    if (nkm1 > 0) jump.leftCols(nkm1) = el.edgeValKm1[e];
    if (k > 0) jump.middleCols(el.edges[e].momentSlot, k) -= eo.valKm1;
    el.h1Gram += jump.transpose() * eo.quad.weights.asDiagonal() * jump / el.h;
  }
  MatrixXd cornerKm1 = el.basisKm1.values(corners);
  for (int v = 0; v < nV; v++) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(el.nloc);
    if (nkm1 > 0) row.leftCols(nkm1) = cornerKm1.row(v);
    row(nkm1 + nE * k + v) -= 1.;
    el.h1Gram += row.transpose() * row;
  }
  el.h1Gram = 0.5 * (el.h1Gram + el.h1Gram.transpose()).eval();
}

}  // namespace

Operators build_operators(const PolygonalMesh &mesh, const SimplicialSubmesh &submesh, int k,
                          int threads) {
  if (k < 0) throw ValidationError("polynomial degree k must be >= 0");
  Operators ops;
  ops.mesh = &mesh;
  ops.submesh = &submesh;
  ops.k = k;
  ops.layout = make_dof_layout(mesh, k);
  ops.edges.resize(mesh.nEdges());
  parallel_for(mesh.nEdges(), threads,
               [&](int iE) { ops.edges[iE] = build_edge_ops(mesh, iE, k); });
  ops.elements.resize(mesh.nElements());
  parallel_for(mesh.nElements(), threads, [&](int iT) {
    build_element_ops(mesh, submesh, ops.edges, ops.layout, iT, k, ops.elements[iT]);
  });
  return ops;
}

BoundednessProbe projection_boundedness_probe(const Operators &ops, int element, int samples,
                                              std::uint64_t seed) {
  const ElementOps &el = ops.elements[element];
  const int nk1 = el.basisK1.size();
  const VectorXd &w = el.quad.rule.weights;
  std::mt19937_64 rng(seed);

  MatrixXd gradGramK1 =
      mixed_gram(el.dxK1, el.dxK1, w) + mixed_gram(el.dyK1, el.dyK1, w);
  MatrixXd toKm1 = el.interp.topRows(el.basisKm1.size());
  const Element &E = ops.mesh->elements[element];
  PointList corners(E.vertices.size(), 2);
  for (size_t v = 0; v < E.vertices.size(); v++)
    corners.row(v) = ops.mesh->vertices[E.vertices[v]].transpose();
  MatrixXd cornerVals = el.basisK1.values(corners);

  BoundednessProbe probe;
  probe.minRatio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; s++) {
    VectorXd c(nk1);
    for (int i = 0; i < nk1; i++) c[i] = unit_real(rng);
    double lhs = std::sqrt(c.dot(el.gramK1 * c)) + el.h * std::sqrt(c.dot(gradGramK1 * c));
    double rhs = 0.;
    if (toKm1.rows() > 0) {
      VectorXd pc = toKm1 * c;
      rhs += std::sqrt(pc.dot(el.gramKm1 * pc));
    }
    if (ops.k > 0) {
      for (size_t e = 0; e < el.edges.size(); e++) {
        const EdgeOps &eo = ops.edges[el.edges[e].edge];
        VectorXd moments = Eigen::LDLT<MatrixXd>(eo.gramKm1)
                               .solve(eo.valKm1.transpose() *
                                      (eo.quad.weights.asDiagonal() * (el.edgeValK1[e] * c)));
        rhs += std::sqrt(el.h) * std::sqrt(moments.dot(eo.gramKm1 * moments));
      }
    }
    rhs += el.h * (cornerVals * c).cwiseAbs().sum();
    double ratio = lhs / rhs;
    probe.maxRatio = std::max(probe.maxRatio, ratio);
    probe.minRatio = std::min(probe.minRatio, ratio);
  }
  return probe;
}

}  // namespace polynodal
