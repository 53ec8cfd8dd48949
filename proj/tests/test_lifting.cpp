#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polynodal/harness.hpp"
#include "polynodal/lifting.hpp"
#include "polynodal/norms.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

using namespace polynodal;

namespace {

struct Setup {
  PolygonalMesh mesh;
  SimplicialSubmesh submesh;
  Operators ops;
  LagrangeSpace space;
};

Setup make(MeshFamily family, int n, int k, std::uint64_t seed = 0) {
  Setup s;
  s.mesh = generate_mesh(family, n, seed);
  s.submesh = build_submesh(s.mesh);
  s.ops = build_operators(s.mesh, s.submesh, k);
  s.space = build_lagrange_space(s.mesh, s.submesh, k);
  return s;
}

Setup make_hexagon(int k) {
  Setup s;
  std::vector<Vector2d> pts;
  for (int i = 0; i < 6; i++)
    pts.emplace_back(0.5 + 0.4 * std::cos(M_PI * i / 3.), 0.5 + 0.4 * std::sin(M_PI * i / 3.));
  s.mesh = assemble_mesh(pts, {{0, 1, 2, 3, 4, 5}});
  s.submesh = build_submesh(s.mesh);
  s.ops = build_operators(s.mesh, s.submesh, k);
  s.space = build_lagrange_space(s.mesh, s.submesh, k);
  return s;
}

DofVector random_homogeneous(const Operators &ops, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DofVector v = zero_dof_vector(ops.layout);
  for (long i = 0; i < ops.layout.total(); i++)
    if (ops.layout.toSolver[i] < ops.layout.nInterior) v.data[i] = unit_real(rng);
  return v;
}

}  // namespace

TEST_CASE("Lagrange space structure") {
  SUBCASE("node counts at k=0 are the submesh points") {
    Setup s = make(MeshFamily::Cartesian, 2, 0);
    CHECK(s.space.nNodes() == static_cast<int>(s.submesh.points.size()));
  }
  SUBCASE("degree-2 node count on one square") {
    Setup s = make(MeshFamily::Cartesian, 1, 1);
    // 5 points (4 vertices + center), 8 submesh edges, 4 triangles:
    // 5 + 8 edge nodes + 0 interior = 13.
    CHECK(s.space.degree == 2);
    CHECK(s.space.nNodes() == 13);
  }
  SUBCASE("shape functions are nodal") {
    Setup s = make(MeshFamily::Cartesian, 1, 2);
    const int nper = s.space.nodesPerTriangle();
    // Evaluate at the lattice points of triangle 0 and expect the identity.
    const auto &tri = s.submesh.triangles[0];
    std::array<Vector2d, 3> corners = {s.submesh.points[tri.v[0]], s.submesh.points[tri.v[1]],
                                       s.submesh.points[tri.v[2]]};
    PointList pts(nper, 2);
    int row = 0;
    int p = s.space.degree;
    for (int i = p; i >= 0; i--)
      for (int j = p - i; j >= 0; j--, row++) {
        int l = p - i - j;
        Vector2d x = (double(i) * corners[0] + double(j) * corners[1] + double(l) * corners[2]) / p;
        pts.row(row) = x.transpose();
      }
    LiftedFunction f;
    f.space = &s.space;
    f.nodal = VectorXd::Zero(s.space.nNodes());
    for (int loc = 0; loc < nper; loc++) {
      f.nodal.setZero();
      f.nodal[s.space.triangleNodes[0][loc]] = 1.;
      VectorXd vals = evaluate_on_triangle(s.space, s.submesh, f, 0, pts);
      for (int m = 0; m < nper; m++)
        CHECK(vals[m] == doctest::Approx(m == loc ? 1. : 0.).epsilon(1e-11));
    }
  }
}

TEST_CASE("lifting reproduces global polynomials") {
  for (int k : {0, 1, 2}) {
    CAPTURE(k);
    for (bool hexSingle : {false, true}) {
      Setup s = hexSingle ? make_hexagon(k) : make(MeshFamily::Cartesian, 2, k);
      auto w = [k](const Vector2d &p) {
        return std::pow(0.7 * p.x() - 0.4 * p.y() + 0.2, k + 1) + p.x();
      };
      DofVector sigma = interpolate(s.ops, w);
      LiftedFunction lifted = lift(s.ops, s.space, sigma);
      for (int id = 0; id < s.space.nNodes(); id++)
        CHECK(lifted.nodal[id] == doctest::Approx(w(s.space.nodes[id])).epsilon(1e-11));

      // The correction stage is zero on polynomial data.
      LiftedFunction l1 = lift_l1(s.ops, s.space, sigma);
      LiftedFunction l2 = lift_l2(s.ops, s.space, sigma, l1);
      CHECK(l2.nodal.cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("zero vector lifts to zero") {
  Setup s = make(MeshFamily::HexagonalDominant, 2, 1);
  DofVector zero = zero_dof_vector(s.ops.layout);
  LiftedFunction lifted = lift(s.ops, s.space, zero);
  CHECK(lifted.nodal.cwiseAbs().maxCoeff() == 0.);
  LiftReport rep = verify_lifting(s.ops, s.space, zero, lifted);
  CHECK(rep.projectionResidual == 0.);
  CHECK(rep.consistencyResidual == 0.);
  CHECK(rep.boundednessRatio == 0.);
}

TEST_CASE("lifted functions vanish at boundary nodes for homogeneous vectors") {
  Setup s = make(MeshFamily::HexagonalDominant, 3, 2);
  DofVector v = random_homogeneous(s.ops, 21);
  LiftedFunction lifted = lift(s.ops, s.space, v);
  for (int id = 0; id < s.space.nNodes(); id++)
    if (s.space.boundaryNode[id]) CHECK(lifted.nodal[id] == 0.);
}

TEST_CASE("element moments of the lift match the projected potential") {
  // Single hexagon at k=1 with a random vector.
  Setup s = make_hexagon(1);
  std::mt19937_64 rng(33);
  DofVector v = zero_dof_vector(s.ops.layout);
  for (long i = 0; i < s.ops.layout.total(); i++) v.data[i] = unit_real(rng);
  LiftedFunction lifted = lift(s.ops, s.space, v);
  LiftReport rep = verify_lifting(s.ops, s.space, v, lifted);
  CHECK(rep.projectionResidual < 1e-11);
}

TEST_CASE("lifting identities hold for random vectors") {
  for (int k : {0, 1, 2}) {
    for (auto family : {MeshFamily::Cartesian, MeshFamily::HexagonalDominant}) {
      CAPTURE(k);
      CAPTURE(to_string(family));
      Setup s = make(family, 2, k);
      for (int t = 0; t < 40; t++) {
        DofVector v = random_homogeneous(s.ops, 100 + t);
        LiftedFunction lifted = lift(s.ops, s.space, v);
        LiftReport rep = verify_lifting(s.ops, s.space, v, lifted);
        CHECK(rep.projectionResidual < 1e-10);
        CHECK(rep.consistencyResidual < 1e-10);
        CHECK(std::isfinite(rep.boundednessRatio));
      }
    }
  }
}

TEST_CASE("lift is continuous across interior submesh edges") {
  Setup s = make(MeshFamily::HexagonalDominant, 2, 2);
  DofVector v = random_homogeneous(s.ops, 55);
  LiftedFunction lifted = lift(s.ops, s.space, v);

  // Find pairs of triangles sharing an edge and compare point evaluations.
  std::map<std::pair<int, int>, std::vector<int>> byEdge;
  for (size_t t = 0; t < s.submesh.triangles.size(); t++) {
    const auto &tri = s.submesh.triangles[t];
    for (int e = 0; e < 3; e++) {
      auto key = std::minmax(tri.v[e], tri.v[(e + 1) % 3]);
      byEdge[key].push_back(static_cast<int>(t));
    }
  }
  int tested = 0;
  for (const auto &[key, tris] : byEdge) {
    if (tris.size() != 2 || tested > 20) continue;
    tested++;
    const Vector2d &a = s.submesh.points[key.first];
    const Vector2d &b = s.submesh.points[key.second];
    PointList pts(3, 2);
    for (int m = 0; m < 3; m++) pts.row(m) = (a + (0.2 + 0.3 * m) * (b - a)).transpose();
    VectorXd left = evaluate_on_triangle(s.space, s.submesh, lifted, tris[0], pts);
    VectorXd right = evaluate_on_triangle(s.space, s.submesh, lifted, tris[1], pts);
    CHECK((left - right).cwiseAbs().maxCoeff() < 1e-11);
  }
  CHECK(tested > 0);
}

TEST_CASE("boundedness ratio is stable under refinement") {
  for (int k : {0, 1}) {
    CAPTURE(k);
    double maxAt2 = 0., maxAt8 = 0.;
    for (int n : {2, 8}) {
      Setup s = make(MeshFamily::Cartesian, n, k);
      double worst = 0.;
      for (int t = 0; t < 24; t++) {
        DofVector v = random_homogeneous(s.ops, 200 + t);
        LiftedFunction lifted = lift(s.ops, s.space, v);
        LiftReport rep = verify_lifting(s.ops, s.space, v, lifted);
        worst = std::max(worst, rep.boundednessRatio);
      }
      (n == 2 ? maxAt2 : maxAt8) = worst;
    }
    CHECK(maxAt8 < 2. * maxAt2);
    CHECK(maxAt2 < 2. * maxAt8);
  }
}

TEST_CASE("first-stage lift golden file at k=0") {
  Setup s = make(MeshFamily::Cartesian, 2, 0);
  std::ifstream in(std::string(GOLDEN_DIR) + "/lift_l1_k0_n2.json");
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  int iV = j.at("interiorVertex").get<int>();
  DofVector v = zero_dof_vector(s.ops.layout);
  v.data[s.ops.layout.vertexOffset(iV)] = 1.;
  LiftedFunction l1 = lift_l1(s.ops, s.space, v);
  auto expected = j.at("nodal").get<std::vector<double>>();
  REQUIRE(static_cast<int>(expected.size()) == l1.nodal.size());
  for (int i = 0; i < l1.nodal.size(); i++)
    CHECK(l1.nodal[i] == doctest::Approx(expected[i]).epsilon(1e-13));

  // Independent oracle: the skeleton value at the chosen vertex is 1, the
  // other mesh vertices are 0, and interior values come from the potential.
  CHECK(l1.nodal[iV] == 1.);
  for (int id = 0; id < s.mesh.nVertices(); id++)
    if (id != iV) CHECK(l1.nodal[id] == 0.);
}
