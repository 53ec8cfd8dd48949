#include "polynodal/lifting.hpp"

#include <cmath>
#include <map>

namespace polynodal {

namespace {

struct SubEdgeKey {
  int lo, hi;
  bool operator<(const SubEdgeKey &o) const {
    return lo < o.lo || (lo == o.lo && hi < o.hi);
  }
};

MatrixXd barycentric_coords(const std::array<Vector2d, 3> &corners, const PointList &pts) {
  Matrix2d J;
  J.col(0) = corners[1] - corners[0];
  J.col(1) = corners[2] - corners[0];
  Matrix2d Jinv = J.inverse();
  MatrixXd lam(pts.rows(), 2);
  for (int q = 0; q < pts.rows(); q++) {
    Vector2d r = pts.row(q).transpose() - corners[0];
    lam.row(q) = (Jinv * r).transpose();
  }
  return lam;
}

// Monomials lambda1^a lambda2^b with a + b <= p, in the fixed exponent order.
void lattice_exponents(int p, std::vector<std::array<int, 2>> &exps) {
  exps.clear();
  for (int d = 0; d <= p; d++)
    for (int a = d; a >= 0; a--) exps.push_back({a, d - a});
}

MatrixXd monomial_values(const std::vector<std::array<int, 2>> &exps, const MatrixXd &lam) {
  MatrixXd out(lam.rows(), exps.size());
  for (int q = 0; q < lam.rows(); q++)
    for (size_t m = 0; m < exps.size(); m++)
      out(q, m) = std::pow(lam(q, 0), exps[m][0]) * std::pow(lam(q, 1), exps[m][1]);
  return out;
}

}  // namespace

LagrangeSpace build_lagrange_space(const PolygonalMesh &mesh, const SimplicialSubmesh &submesh,
                                   int k) {
  const int p = k + 1;
  LagrangeSpace space;
  space.degree = p;

  const int nPoints = static_cast<int>(submesh.points.size());
  const int nMeshVertices = mesh.nVertices();

  // Submesh edges, with a link to the mesh edge they coincide with (if any).
  std::map<SubEdgeKey, int> subEdgeIndex;
  std::vector<SubEdgeKey> subEdges;
  for (const auto &tri : submesh.triangles) {
    for (int e = 0; e < 3; e++) {
      int a = tri.v[e], b = tri.v[(e + 1) % 3];
      SubEdgeKey key{std::min(a, b), std::max(a, b)};
      if (subEdgeIndex.emplace(key, static_cast<int>(subEdges.size())).second)
        subEdges.push_back(key);
    }
  }
  std::map<SubEdgeKey, int> meshEdgeOf;
  for (int e = 0; e < mesh.nEdges(); e++)
    meshEdgeOf[{mesh.edges[e].v0, mesh.edges[e].v1}] = e;

  const int nSubEdges = static_cast<int>(subEdges.size());
  const int perEdge = p - 1;
  const int perTri = (p - 1) * (p - 2) / 2;
  const int nTris = static_cast<int>(submesh.triangles.size());

  space.nodes.resize(nPoints + nSubEdges * perEdge + nTris * perTri);
  space.boundaryNode.assign(space.nNodes(), false);
  space.skeletonNode.assign(space.nNodes(), false);
  space.nodeMeshEdge.assign(space.nNodes(), -1);
  space.nodeEdgeParam.assign(space.nNodes(), 0.);
  space.nodeElement.assign(space.nNodes(), -1);

  for (int i = 0; i < nPoints; i++) {
    space.nodes[i] = submesh.points[i];
    if (i < nMeshVertices) {
      space.skeletonNode[i] = true;
      space.boundaryNode[i] = mesh.boundaryVertex[i];
    } else {
      space.nodeElement[i] = i - nMeshVertices;  // element centers
    }
  }
  for (int e = 0; e < nSubEdges; e++) {
    const auto &key = subEdges[e];
    auto meshIt = meshEdgeOf.find(key);
    int meshEdge = meshIt == meshEdgeOf.end() ? -1 : meshIt->second;
    int owner = -1;
    if (meshEdge < 0) {
      // Fan edge: one endpoint is an element center.
      owner = std::max(key.lo, key.hi) - nMeshVertices;
      if (owner < 0) throw ValidationError("submesh edge is neither a mesh edge nor a fan edge");
    }
    for (int m = 1; m < p; m++) {
      int id = nPoints + e * perEdge + (m - 1);
      double t = double(m) / p;
      space.nodes[id] = submesh.points[key.lo] + t * (submesh.points[key.hi] - submesh.points[key.lo]);
      if (meshEdge >= 0) {
        space.skeletonNode[id] = true;
        space.nodeMeshEdge[id] = meshEdge;
        space.nodeEdgeParam[id] = t - 0.5;  // canonical v0 < v1 matches lo < hi
        space.boundaryNode[id] = mesh.edges[meshEdge].boundary;
      } else {
        space.nodeElement[id] = owner;
      }
    }
  }

  // Per-triangle node lists in lattice order (i, j, l), i from p down to 0.
  std::vector<std::array<int, 2>> exps;
  lattice_exponents(p, exps);
  MatrixXd latticeLam(static_cast<int>(exps.size()), 2);

  space.triangleNodes.resize(nTris);
  for (int t = 0; t < nTris; t++) {
    const auto &tri = submesh.triangles[t];
    int interiorSeen = 0;
    int row = 0;
    for (int i = p; i >= 0; i--) {
      for (int j = p - i; j >= 0; j--, row++) {
        int l = p - i - j;
        if (t == 0) latticeLam.row(row) << double(j) / p, double(l) / p;
        int id = -1;
        if (j == 0 && l == 0) {
          id = tri.v[0];
        } else if (i == 0 && l == 0) {
          id = tri.v[1];
        } else if (i == 0 && j == 0) {
          id = tri.v[2];
        } else if (i == 0 || j == 0 || l == 0) {
          int a, b, m;
          if (i == 0) {
            a = tri.v[1]; b = tri.v[2]; m = l;
          } else if (j == 0) {
            a = tri.v[0]; b = tri.v[2]; m = l;
          } else {
            a = tri.v[0]; b = tri.v[1]; m = j;
          }
          SubEdgeKey key{std::min(a, b), std::max(a, b)};
          int e = subEdgeIndex.at(key);
          // Parameter measured from the canonical low endpoint.
          int fromLo = (key.lo == a) ? m : p - m;
          id = nPoints + e * perEdge + (fromLo - 1);
        } else {
          int base = nPoints + nSubEdges * perEdge + t * perTri;
          id = base + interiorSeen;
          space.nodes[id] = (double(i) * submesh.points[tri.v[0]] +
                             double(j) * submesh.points[tri.v[1]] +
                             double(l) * submesh.points[tri.v[2]]) /
                            p;
          space.nodeElement[id] = tri.parent;
          interiorSeen++;
        }
        space.triangleNodes[t].push_back(id);
      }
    }
  }

  MatrixXd vander = monomial_values(exps, latticeLam);
  Eigen::PartialPivLU<MatrixXd> lu(vander);
  space.referenceShape = lu.solve(MatrixXd::Identity(vander.rows(), vander.cols()));
  return space;
}

MatrixXd lagrange_shape_values(const LagrangeSpace &space, const MatrixXd &barycentric) {
  std::vector<std::array<int, 2>> exps;
  lattice_exponents(space.degree, exps);
  return monomial_values(exps, barycentric) * space.referenceShape;
}

VectorXd evaluate_on_triangle(const LagrangeSpace &space, const SimplicialSubmesh &submesh,
                              const LiftedFunction &f, int triangle, const PointList &pts) {
  const auto &tri = submesh.triangles[triangle];
  std::array<Vector2d, 3> corners = {submesh.points[tri.v[0]], submesh.points[tri.v[1]],
                                     submesh.points[tri.v[2]]};
  MatrixXd shapes = lagrange_shape_values(space, barycentric_coords(corners, pts));
  VectorXd local(space.nodesPerTriangle());
  for (int i = 0; i < local.size(); i++) local[i] = f.nodal[space.triangleNodes[triangle][i]];
  return shapes * local;
}

PointList gradient_on_triangle(const LagrangeSpace &space, const SimplicialSubmesh &submesh,
                               const LiftedFunction &f, int triangle, const PointList &pts) {
  const auto &tri = submesh.triangles[triangle];
  std::array<Vector2d, 3> corners = {submesh.points[tri.v[0]], submesh.points[tri.v[1]],
                                     submesh.points[tri.v[2]]};
  Matrix2d J;
  J.col(0) = corners[1] - corners[0];
  J.col(1) = corners[2] - corners[0];
  Matrix2d Jinv = J.inverse();

  std::vector<std::array<int, 2>> exps;
  lattice_exponents(space.degree, exps);
  MatrixXd lam = barycentric_coords(corners, pts);
  const int nm = static_cast<int>(exps.size());
  MatrixXd d1(pts.rows(), nm), d2(pts.rows(), nm);
  for (int q = 0; q < pts.rows(); q++)
    for (int m = 0; m < nm; m++) {
      int a = exps[m][0], b = exps[m][1];
      d1(q, m) = a == 0 ? 0. : a * std::pow(lam(q, 0), a - 1) * std::pow(lam(q, 1), b);
      d2(q, m) = b == 0 ? 0. : b * std::pow(lam(q, 0), a) * std::pow(lam(q, 1), b - 1);
    }
  MatrixXd dShape1 = d1 * space.referenceShape;
  MatrixXd dShape2 = d2 * space.referenceShape;

  VectorXd local(space.nodesPerTriangle());
  for (int i = 0; i < local.size(); i++) local[i] = f.nodal[space.triangleNodes[triangle][i]];
  VectorXd g1 = dShape1 * local, g2 = dShape2 * local;

  // grad = g1 grad(lambda1) + g2 grad(lambda2); the rows of Jinv are those gradients.
  PointList grads(pts.rows(), 2);
  for (int q = 0; q < pts.rows(); q++)
    grads.row(q) = (g1[q] * Jinv.row(0) + g2[q] * Jinv.row(1));
  return grads;
}

LiftedFunction lift_l1(const Operators &ops, const LagrangeSpace &space, const DofVector &v) {
  const PolygonalMesh &mesh = *ops.mesh;
  const DofLayout &layout = ops.layout;
  LiftedFunction out;
  out.space = &space;
  out.nodal = VectorXd::Zero(space.nNodes());

  // Trace coefficients per mesh edge (the skeleton function is continuous).
  std::vector<VectorXd> traceCoeffs(mesh.nEdges());
  for (int e = 0; e < mesh.nEdges(); e++) {
    VectorXd edgeDofs(ops.k + 2);
    for (int i = 0; i < ops.k; i++) edgeDofs[i] = v.data[layout.edgeOffset(e) + i];
    edgeDofs[ops.k] = v.data[layout.vertexOffset(mesh.edges[e].v0)];
    edgeDofs[ops.k + 1] = v.data[layout.vertexOffset(mesh.edges[e].v1)];
    traceCoeffs[e] = edge_trace(ops.edges[e], edgeDofs);
  }

  std::vector<VectorXd> potentialCoeffs(mesh.nElements());
  for (int iT = 0; iT < mesh.nElements(); iT++) {
    VectorXd local = restrict_local(mesh, layout, v, iT);
    potentialCoeffs[iT] = ops.elements[iT].potential * local;
  }

  for (int id = 0; id < space.nNodes(); id++) {
    if (space.skeletonNode[id]) {
      if (id < mesh.nVertices()) {
        out.nodal[id] = v.data[layout.vertexOffset(id)];
      } else {
        int e = space.nodeMeshEdge[id];
        VectorXd t(1);
        t[0] = space.nodeEdgeParam[id];
        out.nodal[id] = (ops.edges[e].basisK1.values(t) * traceCoeffs[e])(0);
      }
    } else {
      int iT = space.nodeElement[id];
      PointList pt(1, 2);
      pt.row(0) = space.nodes[id].transpose();
      out.nodal[id] = (ops.elements[iT].basisK1.values(pt) * potentialCoeffs[iT])(0);
    }
  }
  return out;
}

LiftedFunction lift_l2(const Operators &ops, const LagrangeSpace &space, const DofVector &v,
                       const LiftedFunction &l1) {
  const PolygonalMesh &mesh = *ops.mesh;
  const SimplicialSubmesh &submesh = *ops.submesh;
  const int p = space.degree;
  LiftedFunction out;
  out.space = &space;
  out.nodal = VectorXd::Zero(space.nNodes());

  for (int iT = 0; iT < mesh.nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    const int nk = el.basisK.size();
    VectorXd local = restrict_local(mesh, ops.layout, v, iT);
    VectorXd rlCoeffs = el.projectedPotential * local;

    // Weighted Gram with the hat-function bubble and the moment defect of L1.
    MatrixXd W = MatrixXd::Zero(nk, nk);
    VectorXd rhs = VectorXd::Zero(nk);
    int firstTri = submesh.elementFirstTriangle[iT];
    for (size_t c = 0; c + 1 < el.quad.chunkOffsets.size(); c++) {
      int begin = el.quad.chunkOffsets[c], end = el.quad.chunkOffsets[c + 1];
      int nq = end - begin;
      PointList pts = el.quad.rule.points.middleRows(begin, nq);
      VectorXd wq = el.quad.rule.weights.segment(begin, nq);
      MatrixXd lam = barycentric_coords(el.quad.triangleCorners[c], pts);
      VectorXd bubble(nq);
      for (int q = 0; q < nq; q++) bubble[q] = 1. - lam(q, 0) - lam(q, 1);

      MatrixXd valK = el.valK.middleRows(begin, nq);
      W += valK.transpose() * (wq.cwiseProduct(bubble)).asDiagonal() * valK;
      VectorXd rl = valK * rlCoeffs;
      VectorXd l1v = evaluate_on_triangle(space, submesh, l1, firstTri + static_cast<int>(c), pts);
      rhs += valK.transpose() * (wq.cwiseProduct(rl - l1v));
    }
    Eigen::LLT<MatrixXd> llt(W);
    if (llt.info() != Eigen::Success)
      throw NumericalError("bubble-weighted Gram not positive definite on element " +
                           std::to_string(iT));
    VectorXd q = llt.solve(rhs);

    // Nodal values of b_T q on the nodes interior to T; the bubble weight at a
    // lattice node (i, j, l) of a fan triangle is i/p (hat at the center).
    for (int t = firstTri; t < submesh.elementFirstTriangle[iT + 1]; t++) {
      int row = 0;
      for (int i = p; i >= 0; i--) {
        for (int j = p - i; j >= 0; j--, row++) {
          int id = space.triangleNodes[t][row];
          if (i == 0 || space.skeletonNode[id]) continue;
          PointList pt(1, 2);
          pt.row(0) = space.nodes[id].transpose();
          double qval = (el.basisK.values(pt) * q)(0);
          out.nodal[id] = (double(i) / p) * qval;
        }
      }
    }
  }
  return out;
}

LiftedFunction lift(const Operators &ops, const LagrangeSpace &space, const DofVector &v) {
  LiftedFunction l1 = lift_l1(ops, space, v);
  LiftedFunction l2 = lift_l2(ops, space, v, l1);
  LiftedFunction out;
  out.space = &space;
  out.nodal = l1.nodal + l2.nodal;
  return out;
}

LiftReport verify_lifting(const Operators &ops, const LagrangeSpace &space, const DofVector &v,
                          const LiftedFunction &lifted) {
  const PolygonalMesh &mesh = *ops.mesh;
  const SimplicialSubmesh &submesh = *ops.submesh;
  LiftReport report;
  double gradNormSq = 0.;
  double vNormSq = 0.;

  for (int iT = 0; iT < mesh.nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    const int nk1 = el.basisK1.size();
    VectorXd local = restrict_local(mesh, ops.layout, v, iT);
    int firstTri = submesh.elementFirstTriangle[iT];

    VectorXd momentsK = VectorXd::Zero(el.basisK.size());
    VectorXd formRhs = VectorXd::Zero(nk1);  // int_T grad w . grad(L v) per basis w
    double localGradSq = 0.;
    for (size_t c = 0; c + 1 < el.quad.chunkOffsets.size(); c++) {
      int begin = el.quad.chunkOffsets[c], end = el.quad.chunkOffsets[c + 1];
      int nq = end - begin;
      PointList pts = el.quad.rule.points.middleRows(begin, nq);
      VectorXd wq = el.quad.rule.weights.segment(begin, nq);
      int tri = firstTri + static_cast<int>(c);

      VectorXd lv = evaluate_on_triangle(space, submesh, lifted, tri, pts);
      momentsK += el.valK.middleRows(begin, nq).transpose() * wq.cwiseProduct(lv);

      PointList gl = gradient_on_triangle(space, submesh, lifted, tri, pts);
      formRhs += el.dxK1.middleRows(begin, nq).transpose() * wq.cwiseProduct(gl.col(0)) +
                 el.dyK1.middleRows(begin, nq).transpose() * wq.cwiseProduct(gl.col(1));
      localGradSq += wq.dot(gl.rowwise().squaredNorm());
    }
    gradNormSq += localGradSq;
    double localNormSq = local.dot(el.energyGram * local);
    vNormSq += std::max(0., localNormSq);

    VectorXd projected = Eigen::LDLT<MatrixXd>(el.gramK).solve(momentsK);
    VectorXd diff = projected - el.projectedPotential * local;
    report.projectionResidual =
        std::max(report.projectionResidual, std::sqrt(std::max(0., diff.dot(el.gramK * diff))));

    VectorXd formLhs = (el.interp).transpose() * (el.stiffness * local);
    double scale = std::max(1e-14, std::sqrt(std::max(0., localNormSq)));
    report.consistencyResidual =
        std::max(report.consistencyResidual, (formLhs - formRhs).cwiseAbs().maxCoeff() / scale);
  }
  double vNorm = std::sqrt(vNormSq);
  report.boundednessRatio = vNorm > 0. ? std::sqrt(gradNormSq) / vNorm : 0.;
  return report;
}

}  // namespace polynodal
