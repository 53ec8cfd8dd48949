#include "polynodal/dofs.hpp"

#include "polynodal/recon.hpp"

#include <nlohmann/json.hpp>

namespace polynodal {

DofLayout make_dof_layout(const PolygonalMesh &mesh, int k) {
  DofLayout layout;
  layout.k = k;
  layout.nElements = mesh.nElements();
  layout.nEdges = mesh.nEdges();
  layout.nVertices = mesh.nVertices();
  layout.elemBlock = poly_dim(k - 1);
  layout.edgeBlock = k;

  long total = static_cast<long>(layout.nElements) * layout.elemBlock +
               static_cast<long>(layout.nEdges) * layout.edgeBlock + layout.nVertices;
  std::vector<bool> boundaryDof(total, false);
  for (int e = 0; e < layout.nEdges; e++)
    if (mesh.edges[e].boundary)
      for (int i = 0; i < layout.edgeBlock; i++) boundaryDof[layout.edgeOffset(e) + i] = true;
  for (int v = 0; v < layout.nVertices; v++)
    if (mesh.boundaryVertex[v]) boundaryDof[layout.vertexOffset(v)] = true;

  layout.toSolver.assign(total, -1);
  long interior = 0;
  for (long i = 0; i < total; i++)
    if (!boundaryDof[i]) layout.toSolver[i] = interior++;
  layout.nInterior = interior;
  long boundary = interior;
  for (long i = 0; i < total; i++)
    if (boundaryDof[i]) layout.toSolver[i] = boundary++;
  layout.nBoundary = total - interior;
  layout.fromSolver.assign(total, -1);
  for (long i = 0; i < total; i++) layout.fromSolver[layout.toSolver[i]] = i;
  return layout;
}

DofVector zero_dof_vector(const DofLayout &layout) {
  DofVector v;
  v.k = layout.k;
  v.data = VectorXd::Zero(layout.total());
  return v;
}

std::vector<long> local_dof_indices(const PolygonalMesh &mesh, const DofLayout &layout,
                                    int element) {
  const Element &el = mesh.elements[element];
  std::vector<long> idx;
  idx.reserve(layout.elemBlock + el.edges.size() * layout.edgeBlock + el.vertices.size());
  for (int i = 0; i < layout.elemBlock; i++) idx.push_back(layout.elemOffset(element) + i);
  for (int e : el.edges)
    for (int i = 0; i < layout.edgeBlock; i++) idx.push_back(layout.edgeOffset(e) + i);
  for (int v : el.vertices) idx.push_back(layout.vertexOffset(v));
  return idx;
}

VectorXd restrict_local(const PolygonalMesh &mesh, const DofLayout &layout, const DofVector &v,
                        int element) {
  auto idx = local_dof_indices(mesh, layout, element);
  VectorXd local(idx.size());
  for (size_t i = 0; i < idx.size(); i++) local[i] = v.data[idx[i]];
  return local;
}

DofVector interpolate(const Operators &ops, const ScalarField &v) {
  const PolygonalMesh &mesh = *ops.mesh;
  const DofLayout &layout = ops.layout;
  DofVector out = zero_dof_vector(layout);

  for (int iT = 0; iT < mesh.nElements(); iT++) {
    const ElementOps &el = ops.elements[iT];
    if (layout.elemBlock > 0)
      out.data.segment(layout.elemOffset(iT), layout.elemBlock) =
          l2_project(el.basisKm1, el.loadQuad, v);
  }
  for (int iE = 0; iE < mesh.nEdges(); iE++) {
    const EdgeOps &eo = ops.edges[iE];
    if (layout.edgeBlock > 0)
      out.data.segment(layout.edgeOffset(iE), layout.edgeBlock) =
          l2_project(eo.basisKm1, eo.quad, v);
  }
  for (int iV = 0; iV < mesh.nVertices(); iV++)
    out.data[layout.vertexOffset(iV)] = v(mesh.vertices[iV]);
  return out;
}

DofVector apply_dirichlet(const Operators &ops, const DofVector &v, const ScalarField &g) {
  const PolygonalMesh &mesh = *ops.mesh;
  const DofLayout &layout = ops.layout;
  DofVector out = v;
  for (int iE = 0; iE < mesh.nEdges(); iE++) {
    if (!mesh.edges[iE].boundary || layout.edgeBlock == 0) continue;
    out.data.segment(layout.edgeOffset(iE), layout.edgeBlock) =
        l2_project(ops.edges[iE].basisKm1, ops.edges[iE].quad, g);
  }
  for (int iV = 0; iV < mesh.nVertices(); iV++)
    if (mesh.boundaryVertex[iV]) out.data[layout.vertexOffset(iV)] = g(mesh.vertices[iV]);
  return out;
}

std::string to_json(const DofVector &v, const DofLayout &layout,
                    const std::string &meshChecksum) {
  nlohmann::json j;
  j["k"] = v.k;
  j["meshChecksum"] = meshChecksum;
  auto block = [&](long offset, int size) {
    std::vector<double> vals(size);
    for (int i = 0; i < size; i++) vals[i] = v.data[offset + i];
    return vals;
  };
  j["elements"] = nlohmann::json::array();
  for (int T = 0; T < layout.nElements; T++)
    j["elements"].push_back(block(layout.elemOffset(T), layout.elemBlock));
  j["edges"] = nlohmann::json::array();
  for (int E = 0; E < layout.nEdges; E++)
    j["edges"].push_back(block(layout.edgeOffset(E), layout.edgeBlock));
  j["vertices"] = nlohmann::json::array();
  for (int V = 0; V < layout.nVertices; V++) j["vertices"].push_back(v.data[layout.vertexOffset(V)]);
  return j.dump(2);
}

DofVector dof_vector_from_json(const std::string &text, const DofLayout &layout) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("DOF vector does not parse: ") + e.what());
  }
  DofVector v = zero_dof_vector(layout);
  try {
    if (j.at("k").get<int>() != layout.k)
      throw ValidationError("DOF vector degree does not match the layout");
    auto read_block = [&](const nlohmann::json &arr, long offset, int size, const char *kind) {
      if (static_cast<int>(arr.size()) != size)
        throw ValidationError(std::string("wrong ") + kind + " block size");
      for (int i = 0; i < size; i++) v.data[offset + i] = arr.at(i).get<double>();
    };
    for (int T = 0; T < layout.nElements; T++)
      read_block(j.at("elements").at(T), layout.elemOffset(T), layout.elemBlock, "element");
    for (int E = 0; E < layout.nEdges; E++)
      read_block(j.at("edges").at(E), layout.edgeOffset(E), layout.edgeBlock, "edge");
    for (int V = 0; V < layout.nVertices; V++)
      v.data[layout.vertexOffset(V)] = j.at("vertices").at(V).get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("malformed DOF vector entry: ") + e.what());
  }
  return v;
}

}  // namespace polynodal
