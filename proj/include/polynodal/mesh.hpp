// Polygonal mesh data model, built-in mesh families on the unit square,
// JSON ingestion, regularity diagnostics and the fan-triangulated submesh.
#pragma once

#include "polynodal/common.hpp"

#include <array>
#include <iosfwd>

namespace polynodal {

struct Edge {
  int v0 = -1, v1 = -1;              // canonical endpoints, v0 < v1
  bool boundary = false;
  std::array<int, 2> elements{-1, -1};
};

struct Element {
  std::vector<int> vertices;  // counterclockwise cycle
  std::vector<int> edges;     // edge indices, edges[i] joins vertices[i] and vertices[i+1]
  Vector2d center;            // star center x_T
  double diameter = 0.;
  double area = 0.;
};

struct PolygonalMesh {
  std::vector<Vector2d> vertices;
  std::vector<Edge> edges;
  std::vector<Element> elements;
  std::vector<bool> boundaryVertex;
  double meshSize = 0.;  // max element diameter

  int nVertices() const { return static_cast<int>(vertices.size()); }
  int nEdges() const { return static_cast<int>(edges.size()); }
  int nElements() const { return static_cast<int>(elements.size()); }
};

/// Conforming triangular submesh obtained by fanning each element from its
/// star center. Points are the mesh vertices followed by one center per element.
struct SimplicialSubmesh {
  struct Triangle {
    std::array<int, 3> v;  // first point is the element center
    int parent;
  };
  std::vector<Vector2d> points;
  std::vector<Triangle> triangles;
  std::vector<int> elementFirstTriangle;  // size nElements + 1

  int centerPoint(int element, int nMeshVertices) const { return nMeshVertices + element; }
};

struct RegularityReport {
  double estimatedRho = 0.;   // min over T of dist(x_T, dT) / h_T
  double minEdgeRatio = 0.;   // min over T, E in E_T of |E| / h_T
  int worstElement = -1;
};

enum class MeshFamily { Cartesian, DistortedQuad, HexagonalDominant, Triangular };

MeshFamily mesh_family_from_string(const std::string &name);
std::string to_string(MeshFamily family);

/// Builds one of the supported mesh families on the unit square. Deterministic
/// for fixed (family, n, seed); the seed only affects the distorted-quad family.
PolygonalMesh generate_mesh(MeshFamily family, int n, std::uint64_t seed);

/// Assembles a mesh from raw vertex/cycle data, deriving edges and boundary
/// flags and validating orientation and star centers. Centers default to
/// polygon centroids.
PolygonalMesh assemble_mesh(std::vector<Vector2d> vertices,
                            std::vector<std::vector<int>> cycles,
                            const std::vector<Vector2d> *centers = nullptr);

PolygonalMesh load_mesh(std::istream &in);
PolygonalMesh load_mesh_from_string(const std::string &text);
std::string to_json(const PolygonalMesh &mesh);

SimplicialSubmesh build_submesh(const PolygonalMesh &mesh);

RegularityReport regularity_report(const PolygonalMesh &mesh);

/// FNV-1a digest of the geometry, used to tie serialized DOF vectors to a mesh.
std::string mesh_checksum(const PolygonalMesh &mesh);

double polygon_area(const std::vector<Vector2d> &pts);
Vector2d polygon_centroid(const std::vector<Vector2d> &pts);

}  // namespace polynodal
