// Command-line front end: mesh generation and checking, solves, convergence
// studies, lifting verification and stability probes.
#include "polynodal/harness.hpp"
#include "polynodal/lifting.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

using namespace polynodal;

namespace {

PolygonalMesh read_mesh(const std::string &path) {
  std::ifstream in(path);
  if (!in.good()) throw ParseError("cannot open mesh file " + path);
  return load_mesh(in);
}

void write_text(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Nodal polytopal scheme for the 2D Poisson problem"};
  app.require_subcommand(1);

  // mesh gen / mesh check
  auto *mesh = app.add_subcommand("mesh", "mesh utilities");
  mesh->require_subcommand(1);
  auto *gen = mesh->add_subcommand("gen", "generate a built-in mesh family");
  std::string genFamily = "cartesian", genOut;
  int genN = 4;
  std::uint64_t genSeed = 0;
  gen->add_option("--family", genFamily, "cartesian|distorted-quad|hexagonal-dominant|triangular");
  gen->add_option("--n", genN, "subdivision count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", genSeed, "generator seed");
  gen->add_option("--out", genOut, "output file (default stdout)");

  auto *check = mesh->add_subcommand("check", "validate a mesh file");
  std::string checkPath;
  check->add_option("file", checkPath, "mesh file")->required();

  // solve
  auto *solveCmd = app.add_subcommand("solve", "assemble and solve one problem");
  std::string solveMesh, fName = "sinsin.f", gName = "zero", loadName = "projected", solveOut;
  int solveK = 1, solveThreads = 1;
  solveCmd->add_option("--mesh", solveMesh, "mesh file")->required();
  solveCmd->add_option("--k", solveK, "polynomial degree")->check(CLI::Range(0, 8));
  solveCmd->add_option("--f", fName, "forcing field name");
  solveCmd->add_option("--g", gName, "Dirichlet field name");
  solveCmd->add_option("--load", loadName, "projected|potential");
  solveCmd->add_option("--threads", solveThreads, "worker threads");
  solveCmd->add_option("--out", solveOut, "solution file (default stdout)");

  // study
  auto *study = app.add_subcommand("study", "run a convergence study");
  std::string studyConfig, studyFormat = "csv", studyOut;
  study->add_option("--config", studyConfig, "JSON config file")->required();
  study->add_option("--format", studyFormat, "csv|json");
  study->add_option("--out", studyOut, "report file (default stdout)");

  // lifting verify
  auto *lifting = app.add_subcommand("lifting", "conforming lifting utilities");
  lifting->require_subcommand(1);
  auto *verify = lifting->add_subcommand("verify", "check the lifting properties");
  std::string liftMesh;
  int liftK = 1, liftSamples = 50;
  std::uint64_t liftSeed = 0;
  verify->add_option("--mesh", liftMesh, "mesh file")->required();
  verify->add_option("--k", liftK, "polynomial degree")->check(CLI::Range(0, 8));
  verify->add_option("--samples", liftSamples, "random DOF vectors")->check(CLI::PositiveNumber);
  verify->add_option("--seed", liftSeed, "sampling seed");

  // probe
  auto *probe = app.add_subcommand("probe", "norm equivalence and coercivity probes");
  std::string probeMesh;
  int probeK = 1, probeSamples = 100;
  std::uint64_t probeSeed = 0;
  bool probeDense = false, probeCsv = false;
  probe->add_option("--mesh", probeMesh, "mesh file")->required();
  probe->add_option("--k", probeK, "polynomial degree")->check(CLI::Range(0, 8));
  probe->add_option("--samples", probeSamples, "random vectors")->check(CLI::PositiveNumber);
  probe->add_option("--seed", probeSeed, "sampling seed");
  probe->add_flag("--dense-eigen", probeDense, "also compute exact eigen brackets");
  probe->add_flag("--csv", probeCsv, "emit a CSV row instead of JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      PolygonalMesh m = generate_mesh(mesh_family_from_string(genFamily), genN, genSeed);
      write_text(genOut, to_json(m) + "\n");
      return 0;
    }
    if (check->parsed()) {
      PolygonalMesh m = read_mesh(checkPath);
      SimplicialSubmesh sub = build_submesh(m);
      RegularityReport rep = regularity_report(m);
      nlohmann::json j;
      j["elements"] = m.nElements();
      j["edges"] = m.nEdges();
      j["vertices"] = m.nVertices();
      j["meshSize"] = m.meshSize;
      j["submeshTriangles"] = sub.triangles.size();
      j["estimatedRho"] = rep.estimatedRho;
      j["minEdgeRatio"] = rep.minEdgeRatio;
      j["worstElement"] = rep.worstElement;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (solveCmd->parsed()) {
      PolygonalMesh m = read_mesh(solveMesh);
      SimplicialSubmesh sub = build_submesh(m);
      Operators ops = build_operators(m, sub, solveK, solveThreads);
      LinearSystem sys = assemble(ops, load_variant_from_string(loadName), named_field(fName),
                                  named_field(gName));
      DofVector u = solve(sys);
      write_text(solveOut, to_json(u, ops.layout, mesh_checksum(m)) + "\n");
      return 0;
    }
    if (study->parsed()) {
      std::ifstream in(studyConfig);
      if (!in.good()) throw ParseError("cannot open config " + studyConfig);
      std::stringstream ss;
      ss << in.rdbuf();
      StudyConfig cfg = study_config_from_json(ss.str());
      ConvergenceReport report = run_study(find_case(cfg.caseName), cfg);
      write_text(studyOut, studyFormat == "json" ? emit_json(report) : emit_csv(report));
      return 0;
    }
    if (verify->parsed()) {
      PolygonalMesh m = read_mesh(liftMesh);
      SimplicialSubmesh sub = build_submesh(m);
      Operators ops = build_operators(m, sub, liftK);
      LagrangeSpace space = build_lagrange_space(m, sub, liftK);
      std::mt19937_64 rng(liftSeed);
      double maxProj = 0., maxCons = 0., maxBound = 0.;
      for (int t = 0; t < liftSamples; t++) {
        DofVector v = zero_dof_vector(ops.layout);
        for (long i = 0; i < ops.layout.total(); i++)
          if (ops.layout.toSolver[i] < ops.layout.nInterior) v.data[i] = unit_real(rng);
        LiftedFunction lifted = lift(ops, space, v);
        LiftReport rep = verify_lifting(ops, space, v, lifted);
        maxProj = std::max(maxProj, rep.projectionResidual);
        maxCons = std::max(maxCons, rep.consistencyResidual);
        maxBound = std::max(maxBound, rep.boundednessRatio);
      }
      nlohmann::json j;
      j["samples"] = liftSamples;
      j["maxProjectionResidual"] = maxProj;
      j["maxConsistencyResidual"] = maxCons;
      j["maxBoundednessRatio"] = maxBound;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (probe->parsed()) {
      PolygonalMesh m = read_mesh(probeMesh);
      SimplicialSubmesh sub = build_submesh(m);
      Operators ops = build_operators(m, sub, probeK);
      EquivalenceProbe eq = norm_equivalence_probe(ops, probeSamples, probeSeed, probeDense);
      CoercivityBrackets coer = coercivity_brackets(ops);
      if (probeCsv) {
        std::cout << "mesh,h,k,equiv_min,equiv_max,coercivity_min,coercivity_max\n"
                  << probeMesh << ',' << m.meshSize << ',' << probeK << ',' << eq.sampleMin
                  << ',' << eq.sampleMax << ',' << coer.min << ',' << coer.max << "\n";
      } else {
        nlohmann::json j;
        j["h"] = m.meshSize;
        j["k"] = probeK;
        j["sampleRatioMin"] = eq.sampleMin;
        j["sampleRatioMax"] = eq.sampleMax;
        if (eq.eigenComputed) {
          j["eigenMin"] = eq.eigenMin;
          j["eigenMax"] = eq.eigenMax;
        }
        j["coercivityMin"] = coer.min;
        j["coercivityMax"] = coer.max;
        std::cout << j.dump(2) << "\n";
      }
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
