// Regenerates the frozen regression files under tests/golden/. Run from the
// repository root: ./build/tools/golden_gen tests/golden
#include "polynodal/harness.hpp"
#include "polynodal/lifting.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

using namespace polynodal;

int main(int argc, char **argv) {
  std::string dir = argc > 1 ? argv[1] : "tests/golden";

  {
    PolygonalMesh mesh = generate_mesh(MeshFamily::HexagonalDominant, 8, 0);
    nlohmann::json j;
    j["elements"] = mesh.nElements();
    j["edges"] = mesh.nEdges();
    j["vertices"] = mesh.nVertices();
    std::ofstream(dir + "/hexagonal_n8.json") << j.dump(2) << "\n";
    std::cout << "hexagonal n=8: " << j.dump() << "\n";
  }

  {
    PolygonalMesh mesh = generate_mesh(MeshFamily::DistortedQuad, 8, 1);
    RegularityReport rep = regularity_report(mesh);
    nlohmann::json j;
    j["estimatedRho"] = rep.estimatedRho;
    j["minEdgeRatio"] = rep.minEdgeRatio;
    std::ofstream(dir + "/distorted_n8_seed1_rho.json") << j.dump(2) << "\n";
    std::cout << "distorted n=8 seed=1: " << j.dump() << "\n";
  }

  {
    // Nodal values of the first-stage lifting of a unit interior-vertex DOF.
    PolygonalMesh mesh = generate_mesh(MeshFamily::Cartesian, 2, 0);
    SimplicialSubmesh sub = build_submesh(mesh);
    Operators ops = build_operators(mesh, sub, 0);
    LagrangeSpace space = build_lagrange_space(mesh, sub, 0);
    DofVector v = zero_dof_vector(ops.layout);
    int interiorVertex = -1;
    for (int iV = 0; iV < mesh.nVertices(); iV++)
      if (!mesh.boundaryVertex[iV]) interiorVertex = iV;
    v.data[ops.layout.vertexOffset(interiorVertex)] = 1.;
    LiftedFunction l1 = lift_l1(ops, space, v);
    nlohmann::json j;
    j["interiorVertex"] = interiorVertex;
    j["nodal"] = std::vector<double>(l1.nodal.data(), l1.nodal.data() + l1.nodal.size());
    std::ofstream(dir + "/lift_l1_k0_n2.json") << j.dump(2) << "\n";
    std::cout << "lift golden: " << l1.nodal.size() << " nodes\n";
  }

  {
    // Pinned small study used for byte-stable CSV comparison.
    StudyConfig cfg;
    cfg.caseName = "sinsin";
    cfg.family = MeshFamily::Cartesian;
    cfg.k = 1;
    cfg.levels = {2, 4, 8};
    ConvergenceReport report = run_study(find_case(cfg.caseName), cfg);
    std::ofstream(dir + "/study_sinsin_cartesian_k1.csv") << emit_csv(report);
    std::cout << "study golden written\n";
  }

  {
    // Regression values for the sampled probes.
    PolygonalMesh mesh = generate_mesh(MeshFamily::Cartesian, 1, 0);
    SimplicialSubmesh sub = build_submesh(mesh);
    Operators ops = build_operators(mesh, sub, 1);
    BoundednessProbe probe = projection_boundedness_probe(ops, 0, 1000, 7);
    nlohmann::json j;
    j["maxRatio"] = probe.maxRatio;

    PolygonalMesh mesh2 = generate_mesh(MeshFamily::Cartesian, 2, 0);
    SimplicialSubmesh sub2 = build_submesh(mesh2);
    Operators ops2 = build_operators(mesh2, sub2, 0);
    EquivalenceProbe eq = norm_equivalence_probe(ops2, 200, 5, true);
    j["equivalenceEigenMin"] = eq.eigenMin;
    j["equivalenceEigenMax"] = eq.eigenMax;
    std::ofstream(dir + "/probe_regressions.json") << j.dump(2) << "\n";
    std::cout << "probe regressions: " << j.dump() << "\n";
  }

  return 0;
}
