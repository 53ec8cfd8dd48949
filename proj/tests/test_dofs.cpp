#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polynodal/recon.hpp"

#include <cmath>

using namespace polynodal;

namespace {

struct Setup {
  PolygonalMesh mesh;
  SimplicialSubmesh submesh;
  Operators ops;
};

Setup make(MeshFamily family, int n, int k) {
  Setup s;
  s.mesh = generate_mesh(family, n, 0);
  s.submesh = build_submesh(s.mesh);
  s.ops = build_operators(s.mesh, s.submesh, k);
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
  return s;
}

}  // namespace

TEST_CASE("block sizes and local restriction sizes") {
  SUBCASE("square k=0") {
    Setup s = make(MeshFamily::Cartesian, 1, 0);
    CHECK(s.ops.layout.elemBlock == 0);
    CHECK(s.ops.layout.edgeBlock == 0);
    DofVector v = zero_dof_vector(s.ops.layout);
    CHECK(restrict_local(s.mesh, s.ops.layout, v, 0).size() == 4);
  }
  SUBCASE("square k=1") {
    Setup s = make(MeshFamily::Cartesian, 1, 1);
    CHECK(s.ops.layout.elemBlock == 1);
    CHECK(s.ops.layout.edgeBlock == 1);
    DofVector v = zero_dof_vector(s.ops.layout);
    CHECK(restrict_local(s.mesh, s.ops.layout, v, 0).size() == 9);
  }
  SUBCASE("square k=2") {
    Setup s = make(MeshFamily::Cartesian, 1, 2);
    CHECK(s.ops.layout.elemBlock == 3);
    CHECK(restrict_local(s.mesh, s.ops.layout, zero_dof_vector(s.ops.layout), 0).size() ==
          3 + 4 * 2 + 4);
  }
  SUBCASE("hexagon k=2") {
    Setup s = make_hexagon(2);
    CHECK(restrict_local(s.mesh, s.ops.layout, zero_dof_vector(s.ops.layout), 0).size() ==
          3 + 6 * 2 + 6);
  }
}

TEST_CASE("interpolation of simple fields") {
  SUBCASE("constants at k=1") {
    Setup s = make(MeshFamily::Cartesian, 2, 1);
    DofVector v = interpolate(s.ops, [](const Vector2d &) { return 1.; });
    for (int iV = 0; iV < s.mesh.nVertices(); iV++)
      CHECK(v.data[s.ops.layout.vertexOffset(iV)] == doctest::Approx(1.).epsilon(1e-13));
    // Scaled constant basis function is 1, so the single moment coefficient is 1.
    for (int iT = 0; iT < s.mesh.nElements(); iT++)
      CHECK(v.data[s.ops.layout.elemOffset(iT)] == doctest::Approx(1.).epsilon(1e-13));
    for (int iE = 0; iE < s.mesh.nEdges(); iE++)
      CHECK(v.data[s.ops.layout.edgeOffset(iE)] == doctest::Approx(1.).epsilon(1e-13));
  }
  SUBCASE("coordinate field at k=0 has vertex values only") {
    Setup s = make(MeshFamily::Cartesian, 2, 0);
    DofVector v = interpolate(s.ops, [](const Vector2d &p) { return p.x(); });
    CHECK(v.data.size() == s.mesh.nVertices());
    for (int iV = 0; iV < s.mesh.nVertices(); iV++)
      CHECK(v.data[s.ops.layout.vertexOffset(iV)] ==
            doctest::Approx(s.mesh.vertices[iV].x()).epsilon(1e-14));
  }
  SUBCASE("moments match an independent quadrature at doubled exactness") {
    Setup s = make(MeshFamily::Cartesian, 2, 2);
    auto v = [](const Vector2d &p) { return std::sin(M_PI * p.x()) * std::sin(M_PI * p.y()); };
    DofVector dofs = interpolate(s.ops, v);
    for (int iT = 0; iT < s.mesh.nElements(); iT++) {
      ElementQuadrature fine = element_quadrature(s.mesh, s.submesh, iT, 4 * (2 + 2) + 8);
      VectorXd oracle = l2_project(s.ops.elements[iT].basisKm1, fine, v);
      VectorXd got = dofs.data.segment(s.ops.layout.elemOffset(iT), s.ops.layout.elemBlock);
      CHECK((got - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("interpolator is linear") {
  Setup s = make(MeshFamily::HexagonalDominant, 2, 1);
  auto f = [](const Vector2d &p) { return std::cos(p.x() + 2. * p.y()); };
  auto g = [](const Vector2d &p) { return p.x() * p.x() - p.y(); };
  DofVector vf = interpolate(s.ops, f);
  DofVector vg = interpolate(s.ops, g);
  DofVector vsum = interpolate(s.ops, [&](const Vector2d &p) { return 2. * f(p) - 3. * g(p); });
  CHECK((vsum.data - (2. * vf.data - 3. * vg.data)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local and global interpolation agree on polynomials") {
  for (int k : {0, 1, 2}) {
    CAPTURE(k);
    Setup s = make(MeshFamily::DistortedQuad, 2, k);
    auto w = [k](const Vector2d &p) { return std::pow(p.x() + 0.5 * p.y(), k + 1) - p.y(); };
    DofVector global = interpolate(s.ops, w);
    for (int iT = 0; iT < s.mesh.nElements(); iT++) {
      const ElementOps &el = s.ops.elements[iT];
      VectorXd coeffs = l2_project(el.basisK1, el.quad, w);  // exact for degree k+1
      VectorXd viaInterp = el.interp * coeffs;
      VectorXd viaGlobal = restrict_local(s.mesh, s.ops.layout, global, iT);
      CHECK((viaInterp - viaGlobal).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Dirichlet data") {
  SUBCASE("zero data gives membership in the homogeneous space") {
    Setup s = make(MeshFamily::Cartesian, 2, 1);
    DofVector v = interpolate(s.ops, [](const Vector2d &p) { return p.x() * p.y() + 1.; });
    DofVector zeroed = apply_dirichlet(s.ops, v, [](const Vector2d &) { return 0.; });
    for (int iE = 0; iE < s.mesh.nEdges(); iE++)
      if (s.mesh.edges[iE].boundary) CHECK(zeroed.data[s.ops.layout.edgeOffset(iE)] == 0.);
    for (int iV = 0; iV < s.mesh.nVertices(); iV++)
      if (s.mesh.boundaryVertex[iV]) CHECK(zeroed.data[s.ops.layout.vertexOffset(iV)] == 0.);
    // Interior entries untouched.
    for (int iT = 0; iT < s.mesh.nElements(); iT++)
      CHECK(zeroed.data[s.ops.layout.elemOffset(iT)] == v.data[s.ops.layout.elemOffset(iT)]);
  }
  SUBCASE("corner values of g = x at k=0") {
    Setup s = make(MeshFamily::Cartesian, 1, 0);
    DofVector v = zero_dof_vector(s.ops.layout);
    DofVector withG = apply_dirichlet(s.ops, v, [](const Vector2d &p) { return p.x(); });
    VectorXd local = restrict_local(s.mesh, s.ops.layout, withG, 0);
    CHECK(local[0] == doctest::Approx(0.).epsilon(1e-14));
    CHECK(local[1] == doctest::Approx(1.).epsilon(1e-14));
    CHECK(local[2] == doctest::Approx(1.).epsilon(1e-14));
    CHECK(local[3] == doctest::Approx(0.).epsilon(1e-14));
  }
  SUBCASE("boundary moments of g = x+y match the interpolate blocks") {
    Setup s = make(MeshFamily::Cartesian, 2, 1);
    DofVector sigma = interpolate(s.ops, [](const Vector2d &p) { return p.x() + p.y(); });
    DofVector lifted = apply_dirichlet(s.ops, zero_dof_vector(s.ops.layout),
                                       [](const Vector2d &p) { return p.x() + p.y(); });
    for (int iE = 0; iE < s.mesh.nEdges(); iE++)
      if (s.mesh.edges[iE].boundary)
        CHECK(lifted.data[s.ops.layout.edgeOffset(iE)] ==
              doctest::Approx(sigma.data[s.ops.layout.edgeOffset(iE)]).epsilon(1e-13));
  }
}

TEST_CASE("solver numbering is a bijection with boundary at the tail") {
  Setup s = make(MeshFamily::HexagonalDominant, 3, 2);
  const DofLayout &layout = s.ops.layout;
  long total = layout.total();
  CHECK(layout.nInterior + layout.nBoundary == total);
  std::vector<bool> seen(total, false);
  for (long i = 0; i < total; i++) {
    long si = layout.toSolver[i];
    REQUIRE(si >= 0);
    REQUIRE(si < total);
    CHECK(!seen[si]);
    seen[si] = true;
    CHECK(layout.fromSolver[si] == i);
  }
  for (int iE = 0; iE < s.mesh.nEdges(); iE++)
    for (int j = 0; j < layout.edgeBlock; j++) {
      bool tail = layout.toSolver[layout.edgeOffset(iE) + j] >= layout.nInterior;
      CHECK(tail == s.mesh.edges[iE].boundary);
    }
}

TEST_CASE("DOF vector JSON round trip") {
  Setup s = make(MeshFamily::Cartesian, 2, 1);
  DofVector v = interpolate(s.ops, [](const Vector2d &p) { return p.x() * p.x() + p.y(); });
  std::string text = to_json(v, s.ops.layout, mesh_checksum(s.mesh));
  DofVector back = dof_vector_from_json(text, s.ops.layout);
  CHECK((back.data - v.data).cwiseAbs().maxCoeff() == 0.);
  CHECK_THROWS_AS(dof_vector_from_json("[", s.ops.layout), ParseError);
}
