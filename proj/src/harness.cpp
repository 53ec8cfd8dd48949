#include "polynodal/harness.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace polynodal {

namespace {

ManufacturedCase make_sinsin() {
  ManufacturedCase mc;
  mc.name = "sinsin";
  mc.u = [](const Vector2d &x) { return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); };
  mc.gradU = [](const Vector2d &x) {
    return Vector2d(M_PI * std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()),
                    M_PI * std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()));
  };
  mc.lapU = [](const Vector2d &x) {
    return -2. * M_PI * M_PI * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
  };
  mc.f = [](const Vector2d &x) {
    return 2. * M_PI * M_PI * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
  };
  mc.polynomialDegree = -1;
  return mc;
}

ManufacturedCase make_bubble4() {
  ManufacturedCase mc;
  mc.name = "bubble4";
  mc.u = [](const Vector2d &p) {
    return p.x() * (1. - p.x()) * p.y() * (1. - p.y());
  };
  mc.gradU = [](const Vector2d &p) {
    return Vector2d((1. - 2. * p.x()) * p.y() * (1. - p.y()),
                    p.x() * (1. - p.x()) * (1. - 2. * p.y()));
  };
  mc.lapU = [](const Vector2d &p) {
    return -2. * p.y() * (1. - p.y()) - 2. * p.x() * (1. - p.x());
  };
  mc.f = [](const Vector2d &p) {
    return 2. * p.y() * (1. - p.y()) + 2. * p.x() * (1. - p.x());
  };
  mc.polynomialDegree = 4;
  return mc;
}

ManufacturedCase make_linear() {
  ManufacturedCase mc;
  mc.name = "linear";
  mc.u = [](const Vector2d &p) { return p.x() + p.y(); };
  mc.gradU = [](const Vector2d &) { return Vector2d(1., 1.); };
  mc.lapU = [](const Vector2d &) { return 0.; };
  mc.f = [](const Vector2d &) { return 0.; };
  mc.polynomialDegree = 1;
  return mc;
}

ManufacturedCase make_quadratic() {
  ManufacturedCase mc;
  mc.name = "quadratic";
  mc.u = [](const Vector2d &p) { return p.x() * p.x() * p.y() - p.y(); };
  mc.gradU = [](const Vector2d &p) {
    return Vector2d(2. * p.x() * p.y(), p.x() * p.x() - 1.);
  };
  mc.lapU = [](const Vector2d &p) { return 2. * p.y(); };
  mc.f = [](const Vector2d &p) { return -2. * p.y(); };
  mc.polynomialDegree = 3;
  return mc;
}

ManufacturedCase make_zero() {
  ManufacturedCase mc;
  mc.name = "zero";
  mc.u = [](const Vector2d &) { return 0.; };
  mc.gradU = [](const Vector2d &) { return Vector2d::Zero(); };
  mc.lapU = [](const Vector2d &) { return 0.; };
  mc.f = [](const Vector2d &) { return 0.; };
  mc.polynomialDegree = 0;
  return mc;
}

}  // namespace

const std::map<std::string, ManufacturedCase> &case_registry() {
  static const std::map<std::string, ManufacturedCase> registry = [] {
    std::map<std::string, ManufacturedCase> m;
    for (const auto &mc : {make_zero(), make_linear(), make_quadratic(), make_bubble4(),
                           make_sinsin()})
      m.emplace(mc.name, mc);
    return m;
  }();
  return registry;
}

const ManufacturedCase &find_case(const std::string &name) {
  auto it = case_registry().find(name);
  if (it == case_registry().end()) throw ParseError("unknown manufactured case: " + name);
  return it->second;
}

ManufacturedCase monomial_case(int ax, int ay) {
  ManufacturedCase mc;
  mc.name = "x^" + std::to_string(ax) + "y^" + std::to_string(ay);
  auto pw = [](double v, int e) { return e < 0 ? 0. : std::pow(v, e); };
  mc.u = [=](const Vector2d &p) { return pw(p.x(), ax) * pw(p.y(), ay); };
  mc.gradU = [=](const Vector2d &p) {
    return Vector2d(ax * pw(p.x(), ax - 1) * pw(p.y(), ay),
                    ay * pw(p.x(), ax) * pw(p.y(), ay - 1));
  };
  mc.lapU = [=](const Vector2d &p) {
    return ax * (ax - 1) * pw(p.x(), ax - 2) * pw(p.y(), ay) +
           ay * (ay - 1) * pw(p.x(), ax) * pw(p.y(), ay - 2);
  };
  mc.f = [lap = mc.lapU](const Vector2d &p) { return -lap(p); };
  mc.polynomialDegree = ax + ay;
  return mc;
}

double manufactured_defect(const ManufacturedCase &mc) {
  double worst = 0.;
  for (int i = 0; i < 10; i++)
    for (int j = 0; j < 10; j++) {
      Vector2d p((i + 0.5) / 10., (j + 0.5) / 10.);
      worst = std::max(worst, std::abs(mc.f(p) + mc.lapU(p)));
    }
  return worst;
}

double ConvergenceReport::eoc(size_t i, double StudyRow::*field) const {
  if (i == 0 || i >= rows.size()) return std::nan("");
  double e0 = rows[i - 1].*field, e1 = rows[i].*field;
  double h0 = rows[i - 1].h, h1 = rows[i].h;
  if (e0 <= 0. || e1 <= 0. || h0 <= h1) return std::nan("");
  return std::log(e0 / e1) / std::log(h0 / h1);
}

StudyConfig study_config_from_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("config does not parse: ") + e.what());
  }
  StudyConfig cfg;
  if (j.contains("case")) cfg.caseName = j.at("case").get<std::string>();
  if (j.contains("family")) cfg.family = mesh_family_from_string(j.at("family").get<std::string>());
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("levels")) cfg.levels = j.at("levels").get<std::vector<int>>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("loadVariant"))
    cfg.loadVariant = load_variant_from_string(j.at("loadVariant").get<std::string>());
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("orderedAccumulation"))
    cfg.orderedAccumulation = j.at("orderedAccumulation").get<bool>();
  return cfg;
}

ConvergenceReport run_study(const ManufacturedCase &mc, const StudyConfig &config) {
  ConvergenceReport report;
  for (int n : config.levels) {
    PolygonalMesh mesh = generate_mesh(config.family, n, config.seed);
    SimplicialSubmesh submesh = build_submesh(mesh);
    Operators ops = build_operators(mesh, submesh, config.k, config.threads);

    LinearSystem system = assemble(ops, config.loadVariant, mc.f, mc.u);
    DofVector uh = solve(system);
    DofVector sigmaU = interpolate(ops, mc.u);
    DofVector diff{config.k, uh.data - sigmaU.data};

    Eigen::SparseMatrix<double> gram = interior_gram(ops, GramKind::Energy);
    ConsistencyFunctional eh =
        consistency_functional(ops, ConsistencyKind::Eh, mc.u, mc.f, mc.lapU, config.loadVariant);
    ConsistencyFunctional feh = consistency_functional(ops, ConsistencyKind::FrakEh, mc.u, mc.f,
                                                       mc.lapU, config.loadVariant);
    CoercivityBrackets coer = coercivity_brackets(ops);

    StudyRow row;
    row.family = config.family;
    row.n = n;
    row.h = mesh.meshSize;
    row.k = config.k;
    row.energyError = energy_norm(ops, diff);
    row.dualEh = dual_norm(eh, gram);
    row.dualFrakEh = dual_norm(feh, gram);
    row.coercivityMin = coer.min;
    row.coercivityMax = coer.max;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string eoc_or_empty(const ConvergenceReport &report, size_t i, double StudyRow::*field) {
  double e = report.eoc(i, field);
  return std::isnan(e) ? std::string() : fmt17(e);
}

}  // namespace

std::string emit_csv(const ConvergenceReport &report) {
  std::ostringstream out;
  out << "family,n,h,k,energy_error,eoc_energy,dual_Eh,eoc_Eh,dual_frakEh,eoc_frakEh\n";
  for (size_t i = 0; i < report.rows.size(); i++) {
    const StudyRow &r = report.rows[i];
    out << to_string(r.family) << ',' << r.n << ',' << fmt17(r.h) << ',' << r.k << ','
        << fmt17(r.energyError) << ',' << eoc_or_empty(report, i, &StudyRow::energyError) << ','
        << fmt17(r.dualEh) << ',' << eoc_or_empty(report, i, &StudyRow::dualEh) << ','
        << fmt17(r.dualFrakEh) << ',' << eoc_or_empty(report, i, &StudyRow::dualFrakEh) << '\n';
  }
  return out.str();
}

std::string emit_json(const ConvergenceReport &report) {
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < report.rows.size(); i++) {
    const StudyRow &r = report.rows[i];
    nlohmann::json row;
    row["family"] = to_string(r.family);
    row["n"] = r.n;
    row["h"] = fmt17(r.h);
    row["k"] = r.k;
    row["energy_error"] = fmt17(r.energyError);
    row["eoc_energy"] = eoc_or_empty(report, i, &StudyRow::energyError);
    row["dual_Eh"] = fmt17(r.dualEh);
    row["eoc_Eh"] = eoc_or_empty(report, i, &StudyRow::dualEh);
    row["dual_frakEh"] = fmt17(r.dualFrakEh);
    row["eoc_frakEh"] = eoc_or_empty(report, i, &StudyRow::dualFrakEh);
    row["coercivity_min"] = fmt17(r.coercivityMin);
    row["coercivity_max"] = fmt17(r.coercivityMax);
    rows.push_back(row);
  }
  nlohmann::json j;
  j["rows"] = rows;
  return j.dump(2);
}

ScalarField named_field(const std::string &name) {
  if (name == "zero") return [](const Vector2d &) { return 0.; };
  if (name == "one") return [](const Vector2d &) { return 1.; };
  if (name == "x") return [](const Vector2d &p) { return p.x(); };
  if (name == "y") return [](const Vector2d &p) { return p.y(); };
  if (name == "x+y") return [](const Vector2d &p) { return p.x() + p.y(); };
  if (name == "xy") return [](const Vector2d &p) { return p.x() * p.y(); };
  auto dot = name.find('.');
  if (dot != std::string::npos) {
    const ManufacturedCase &mc = find_case(name.substr(0, dot));
    std::string part = name.substr(dot + 1);
    if (part == "u") return mc.u;
    if (part == "f") return mc.f;
  }
  throw ParseError("unknown field name: " + name +
                   " (use zero|one|x|y|x+y|xy or CASE.u|CASE.f)");
}

}  // namespace polynodal
