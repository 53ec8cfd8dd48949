#include "polynodal/mesh.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace polynodal {

namespace {

double cross2(const Vector2d &a, const Vector2d &b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vector2d &p, const Vector2d &a, const Vector2d &b) {
  Vector2d d = b - a;
  double len2 = d.squaredNorm();
  double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

}  // namespace

double polygon_area(const std::vector<Vector2d> &pts) {
  double a = 0.;
  int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; i++) a += cross2(pts[i], pts[(i + 1) % n]);
  return 0.5 * a;
}

Vector2d polygon_centroid(const std::vector<Vector2d> &pts) {
  double a = 0.;
  Vector2d c = Vector2d::Zero();
  int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; i++) {
    double w = cross2(pts[i], pts[(i + 1) % n]);
    a += w;
    c += w * (pts[i] + pts[(i + 1) % n]);
  }
  return c / (3. * a);
}

MeshFamily mesh_family_from_string(const std::string &name) {
  if (name == "cartesian") return MeshFamily::Cartesian;
  if (name == "distorted-quad") return MeshFamily::DistortedQuad;
  if (name == "hexagonal-dominant") return MeshFamily::HexagonalDominant;
  if (name == "triangular") return MeshFamily::Triangular;
  throw ParseError("unknown mesh family: " + name);
}

std::string to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::Cartesian: return "cartesian";
    case MeshFamily::DistortedQuad: return "distorted-quad";
    case MeshFamily::HexagonalDominant: return "hexagonal-dominant";
    case MeshFamily::Triangular: return "triangular";
  }
  return "?";
}

PolygonalMesh assemble_mesh(std::vector<Vector2d> vertices,
                            std::vector<std::vector<int>> cycles,
                            const std::vector<Vector2d> *centers) {
  PolygonalMesh mesh;
  mesh.vertices = std::move(vertices);
  const int nv = mesh.nVertices();
  if (centers && static_cast<int>(centers->size()) != static_cast<int>(cycles.size()))
    throw ValidationError("starCenters count does not match element count");

  std::map<std::pair<int, int>, int> edgeIndex;
  std::vector<bool> firstTraversalForward;
  mesh.elements.reserve(cycles.size());
  for (size_t iT = 0; iT < cycles.size(); iT++) {
    const auto &cycle = cycles[iT];
    if (cycle.size() < 3)
      throw ValidationError("element " + std::to_string(iT) + " has fewer than 3 vertices");
    Element el;
    el.vertices = cycle;
    std::vector<Vector2d> pts;
    pts.reserve(cycle.size());
    for (int v : cycle) {
      if (v < 0 || v >= nv)
        throw ValidationError("element " + std::to_string(iT) + " references invalid vertex");
      pts.push_back(mesh.vertices[v]);
    }
    for (size_t i = 0; i < cycle.size(); i++)
      for (size_t j = i + 1; j < cycle.size(); j++)
        if (cycle[i] == cycle[j])
          throw ValidationError("element " + std::to_string(iT) + " repeats a vertex");

    el.area = polygon_area(pts);
    if (el.area <= 0.)
      throw ValidationError("element " + std::to_string(iT) + " is not counterclockwise");
    for (size_t i = 0; i < pts.size(); i++)
      for (size_t j = i + 1; j < pts.size(); j++)
        el.diameter = std::max(el.diameter, (pts[i] - pts[j]).norm());
    el.center = centers ? (*centers)[iT] : polygon_centroid(pts);

    // The fan from the star center must be positively oriented; this is the
    // star-shapedness actually required by the submesh construction.
    for (size_t i = 0; i < pts.size(); i++) {
      const Vector2d &a = pts[i];
      const Vector2d &b = pts[(i + 1) % pts.size()];
      if (cross2(a - el.center, b - el.center) <= 1e-14 * el.diameter * el.diameter)
        throw ValidationError("element " + std::to_string(iT) +
                              ": star center does not see edge " + std::to_string(i));
    }

    for (size_t i = 0; i < cycle.size(); i++) {
      int a = cycle[i], b = cycle[(i + 1) % cycle.size()];
      auto key = std::minmax(a, b);
      auto it = edgeIndex.find(key);
      int e;
      if (it == edgeIndex.end()) {
        e = mesh.nEdges();
        edgeIndex.emplace(key, e);
        Edge edge;
        edge.v0 = key.first;
        edge.v1 = key.second;
        edge.elements[0] = static_cast<int>(iT);
        mesh.edges.push_back(edge);
        firstTraversalForward.push_back(a == key.first);
      } else {
        e = it->second;
        Edge &edge = mesh.edges[e];
        if (edge.elements[1] >= 0)
          throw ValidationError("edge shared by more than two elements");
        if ((a == key.first) == firstTraversalForward[e])
          throw ValidationError("interior edge traversed twice in the same direction");
        edge.elements[1] = static_cast<int>(iT);
      }
      el.edges.push_back(e);
    }
    mesh.elements.push_back(std::move(el));
  }

  mesh.boundaryVertex.assign(nv, false);
  for (auto &edge : mesh.edges) {
    edge.boundary = (edge.elements[1] < 0);
    if (edge.boundary) {
      mesh.boundaryVertex[edge.v0] = true;
      mesh.boundaryVertex[edge.v1] = true;
    }
  }
  mesh.meshSize = 0.;
  for (const auto &el : mesh.elements) mesh.meshSize = std::max(mesh.meshSize, el.diameter);
  return mesh;
}

namespace {

PolygonalMesh cartesian_like(int n, bool split, std::uint64_t seed, double amplitude) {
  std::vector<Vector2d> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; j++)
    for (int i = 0; i <= n; i++)
      vertices.emplace_back(double(i) / n, double(j) / n);

  if (amplitude > 0.) {
    std::mt19937_64 rng(seed);
    for (int j = 0; j <= n; j++)
      for (int i = 0; i <= n; i++) {
        double dx = amplitude * unit_real(rng);
        double dy = amplitude * unit_real(rng);
        if (i > 0 && i < n && j > 0 && j < n) vertices[j * (n + 1) + i] += Vector2d(dx, dy);
      }
  }

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cycles;
  for (int j = 0; j < n; j++)
    for (int i = 0; i < n; i++) {
      if (split) {
        cycles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
        cycles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      } else {
        cycles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
      }
    }
  return assemble_mesh(std::move(vertices), std::move(cycles));
}

// Clip a convex counterclockwise polygon against the half-plane (x - m).d <= 0.
std::vector<Vector2d> clip_halfplane(const std::vector<Vector2d> &poly, const Vector2d &m,
                                     const Vector2d &d) {
  std::vector<Vector2d> out;
  int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; i++) {
    const Vector2d &a = poly[i];
    const Vector2d &b = poly[(i + 1) % n];
    double fa = (a - m).dot(d), fb = (b - m).dot(d);
    if (fa <= 0.) out.push_back(a);
    if ((fa < 0.) != (fb < 0.) && fa != fb) {
      double t = fa / (fa - fb);
      if (t > 0. && t < 1.) out.push_back(a + t * (b - a));
    }
  }
  return out;
}

PolygonalMesh hexagonal_dominant(int n) {
  const double dx = 1.0 / n;
  int rows = std::max(1, static_cast<int>(std::lround(n * 2.0 / std::sqrt(3.0))));
  const double dy = 1.0 / rows;

  std::vector<Vector2d> seeds;
  for (int j = 0; j < rows; j++) {
    double off = (j % 2 == 0) ? 0.25 : 0.75;
    for (int i = 0; i < n; i++) seeds.emplace_back((i + off) * dx, (j + 0.5) * dy);
  }

  const double radius = 2.5 * std::max(dx, dy);
  const double snap = 1e-9;

  std::vector<Vector2d> points;
  std::unordered_map<long long, std::vector<int>> buckets;
  auto key_of = [snap](double x, double y) {
    long long kx = static_cast<long long>(std::floor(x / (4 * snap)));
    long long ky = static_cast<long long>(std::floor(y / (4 * snap)));
    return kx * 2000003LL + ky;
  };
  auto point_id = [&](const Vector2d &p) {
    long long kx = static_cast<long long>(std::floor(p.x() / (4 * snap)));
    long long ky = static_cast<long long>(std::floor(p.y() / (4 * snap)));
    for (long long a = kx - 1; a <= kx + 1; a++)
      for (long long b = ky - 1; b <= ky + 1; b++) {
        auto it = buckets.find(a * 2000003LL + b);
        if (it == buckets.end()) continue;
        for (int id : it->second)
          if ((points[id] - p).norm() < 2 * snap) return id;
      }
    points.push_back(p);
    int id = static_cast<int>(points.size()) - 1;
    buckets[key_of(p.x(), p.y())].push_back(id);
    return id;
  };

  std::vector<std::vector<int>> cycles;
  std::vector<Vector2d> square = {{0., 0.}, {1., 0.}, {1., 1.}, {0., 1.}};
  for (size_t s = 0; s < seeds.size(); s++) {
    std::vector<Vector2d> cell = square;
    for (size_t t = 0; t < seeds.size(); t++) {
      if (t == s || (seeds[t] - seeds[s]).norm() > radius) continue;
      Vector2d m = 0.5 * (seeds[s] + seeds[t]);
      Vector2d d = seeds[t] - seeds[s];
      cell = clip_halfplane(cell, m, d);
    }
    if (cell.size() < 3) throw NumericalError("empty Voronoi cell in hexagonal generator");
    // Pull coordinates that landed next to the square sides exactly onto them.
    for (auto &p : cell) {
      for (int c = 0; c < 2; c++) {
        if (std::abs(p[c]) < 1e-12) p[c] = 0.;
        if (std::abs(p[c] - 1.) < 1e-12) p[c] = 1.;
      }
    }
    std::vector<int> cycle;
    for (const auto &p : cell) {
      int id = point_id(p);
      if (cycle.empty() || (cycle.back() != id && cycle.front() != id)) cycle.push_back(id);
    }
    if (cycle.size() < 3) throw NumericalError("degenerate Voronoi cell in hexagonal generator");
    cycles.push_back(std::move(cycle));
  }
  return assemble_mesh(std::move(points), std::move(cycles));
}

}  // namespace

PolygonalMesh generate_mesh(MeshFamily family, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("subdivision count must be >= 1");
  switch (family) {
    case MeshFamily::Cartesian: return cartesian_like(n, false, seed, 0.);
    case MeshFamily::DistortedQuad: return cartesian_like(n, false, seed, 0.2 / n);
    case MeshFamily::Triangular: return cartesian_like(n, true, seed, 0.);
    case MeshFamily::HexagonalDominant: return hexagonal_dominant(n);
  }
  throw ValidationError("unknown family");
}

PolygonalMesh load_mesh(std::istream &in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_mesh_from_string(ss.str());
}

PolygonalMesh load_mesh_from_string(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("mesh file does not parse: ") + e.what());
  }
  if (!j.contains("vertices") || !j.contains("elements"))
    throw ParseError("mesh file must contain 'vertices' and 'elements'");

  std::vector<Vector2d> vertices;
  try {
    for (const auto &v : j.at("vertices"))
      vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    std::vector<std::vector<int>> cycles;
    for (const auto &c : j.at("elements")) cycles.push_back(c.get<std::vector<int>>());
    if (j.contains("starCenters")) {
      std::vector<Vector2d> centers;
      for (const auto &v : j.at("starCenters"))
        centers.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      return assemble_mesh(std::move(vertices), std::move(cycles), &centers);
    }
    return assemble_mesh(std::move(vertices), std::move(cycles));
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("malformed mesh entry: ") + e.what());
  }
}

std::string to_json(const PolygonalMesh &mesh) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto &v : mesh.vertices) j["vertices"].push_back({v.x(), v.y()});
  j["elements"] = nlohmann::json::array();
  for (const auto &el : mesh.elements) j["elements"].push_back(el.vertices);
  j["starCenters"] = nlohmann::json::array();
  for (const auto &el : mesh.elements) j["starCenters"].push_back({el.center.x(), el.center.y()});
  return j.dump(2);
}

SimplicialSubmesh build_submesh(const PolygonalMesh &mesh) {
  SimplicialSubmesh sub;
  sub.points.reserve(mesh.nVertices() + mesh.nElements());
  sub.points = mesh.vertices;
  for (const auto &el : mesh.elements) sub.points.push_back(el.center);

  sub.elementFirstTriangle.push_back(0);
  for (int iT = 0; iT < mesh.nElements(); iT++) {
    const Element &el = mesh.elements[iT];
    int c = mesh.nVertices() + iT;
    int nvT = static_cast<int>(el.vertices.size());
    for (int i = 0; i < nvT; i++) {
      int a = el.vertices[i], b = el.vertices[(i + 1) % nvT];
      double signedArea =
          0.5 * cross2(sub.points[a] - sub.points[c], sub.points[b] - sub.points[c]);
      if (signedArea <= 0.)
        throw ValidationError("degenerate fan triangle in element " + std::to_string(iT) +
                              ": star center is not valid");
      sub.triangles.push_back({{c, a, b}, iT});
    }
    sub.elementFirstTriangle.push_back(static_cast<int>(sub.triangles.size()));
  }
  return sub;
}

RegularityReport regularity_report(const PolygonalMesh &mesh) {
  RegularityReport rep;
  rep.estimatedRho = 1.;
  rep.minEdgeRatio = 1.;
  for (int iT = 0; iT < mesh.nElements(); iT++) {
    const Element &el = mesh.elements[iT];
    double inradius = el.diameter;
    int nvT = static_cast<int>(el.vertices.size());
    for (int i = 0; i < nvT; i++) {
      const Vector2d &a = mesh.vertices[el.vertices[i]];
      const Vector2d &b = mesh.vertices[el.vertices[(i + 1) % nvT]];
      inradius = std::min(inradius, segment_distance(el.center, a, b));
    }
    double rho = inradius / el.diameter;
    if (rho < rep.estimatedRho) {
      rep.estimatedRho = rho;
      rep.worstElement = iT;
    }
    for (int e : el.edges) {
      double len = (mesh.vertices[mesh.edges[e].v1] - mesh.vertices[mesh.edges[e].v0]).norm();
      rep.minEdgeRatio = std::min(rep.minEdgeRatio, len / el.diameter);
    }
  }
  return rep;
}

std::string mesh_checksum(const PolygonalMesh &mesh) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void *data, size_t len) {
    const unsigned char *p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < len; i++) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto &v : mesh.vertices) {
    double xy[2] = {v.x(), v.y()};
    mix(xy, sizeof xy);
  }
  for (const auto &el : mesh.elements) {
    for (int v : el.vertices) {
      std::int64_t w = v;
      mix(&w, sizeof w);
    }
    std::int64_t sep = -1;
    mix(&sep, sizeof sep);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace polynodal
