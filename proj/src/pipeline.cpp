#include "hypnet/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hypnet/anet.hpp"
#include "hypnet/anet_fit.hpp"
#include "hypnet/hyperboloid.hpp"
#include "hypnet/mesh_io.hpp"
#include "hypnet/patch.hpp"

namespace hypnet {
namespace {

using nlohmann::json;

json violation_json(ErrorCode code, long index, double value, const std::string& message) {
  return json{{"code", std::string(to_string(code))},
              {"index", index},
              {"value", value},
              {"message", message}};
}

json signature_json(const Signature& s) { return json::array({s.plus, s.minus, s.zero}); }

class Session {
 public:
  explicit Session(const RunConfig& cfg) {
    report_["schema"] = 1;
    report_["input"] = cfg.input;
    report_["violations"] = json::array();
  }

  void add(ErrorCode code, long index, double value, const std::string& message) {
    report_["violations"].push_back(violation_json(code, index, value, message));
    if (exit_ == 0) exit_ = exit_code_for(code);
  }
  void add(const Error& e) { add(e.code(), e.index(), e.value(), e.what()); }
  bool failed() const { return exit_ != 0; }

  json& report() { return report_; }
  int exit_code() const { return exit_; }

 private:
  json report_;
  int exit_ = 0;
};

json topology_json(const QuadGraph& g) {
  int boundary = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) boundary += g.is_boundary_vertex(v) ? 1 : 0;
  return json{{"vertices", g.vertex_count()},
              {"edges", g.edge_count()},
              {"faces", g.face_count()},
              {"boundary_vertices", boundary},
              {"euler_characteristic", g.euler_characteristic()},
              {"components", g.component_count()}};
}

json planarity_json(const ANetDiagnostics& d) {
  double worst = 0.0;
  double worst_rel = 0.0;
  for (std::size_t v = 0; v < d.planarity_residual.size(); ++v) {
    worst = std::max(worst, d.planarity_residual[v]);
    if (d.star_diameter[v] > 0) worst_rel = std::max(worst_rel, d.planarity_residual[v] / d.star_diameter[v]);
  }
  return json{{"max_residual", worst}, {"max_relative_residual", worst_rel}, {"residuals", d.planarity_residual}};
}

json twist_json(const ANet& a, const EquiTwistReport& eq) {
  json faces = json::array();
  for (FaceId f = 0; f < a.graph().face_count(); ++f) faces.push_back({twist(a, f, 0), twist(a, f, 1)});
  json strips = json::array();
  for (const StripTwist& s : eq.strips) {
    strips.push_back({{"faces", s.strip.faces}, {"signs", s.signs}, {"uniform", s.uniform}});
  }
  return json{{"faces", faces}, {"strips", strips}, {"equi_twisted", eq.equi_twisted}};
}

void record_odd_degrees(Session& s, const QuadGraph& g, const DegreeReport& deg) {
  for (VertexId v : deg.offending) {
    s.add(ErrorCode::kOddVertexDegree, v, g.degree(v),
          "interior vertex " + std::to_string(v) + " has odd degree " + std::to_string(g.degree(v)));
  }
}

void record_equi_twist(Session& s, const EquiTwistReport& eq) {
  for (std::size_t i = 0; i < eq.strips.size(); ++i) {
    if (!eq.strips[i].uniform) {
      s.add(ErrorCode::kNotEquiTwisted, static_cast<long>(i), 0.0,
            "strip " + std::to_string(i) + " mixes twist signs");
    }
  }
}

void run_check(Session& s, const RunConfig& cfg, const Mesh& mesh) {
  const QuadGraph g = QuadGraph::build(static_cast<std::int32_t>(mesh.positions.size()), mesh.faces);
  s.report()["topology"] = topology_json(g);
  const ANetDiagnostics diag = diagnose(g, mesh.positions, cfg.tol);
  s.report()["planarity"] = planarity_json(diag);
  for (const Violation& v : diag.violations) s.add(v.code, v.index, v.value, v.message);
  const DegreeReport deg = g.interior_degrees_even();
  s.report()["degrees_even"] = deg.ok;
  record_odd_degrees(s, g, deg);
  if (!diag.ok()) return;
  const ANet a = validate_anet(g, mesh.positions, cfg.tol);
  const EquiTwistReport eq = equi_twisted(a);
  s.report()["twist"] = twist_json(a, eq);
  record_equi_twist(s, eq);
}

void run_fit(Session& s, const RunConfig& cfg, const Mesh& mesh) {
  const QuadGraph g = QuadGraph::build(static_cast<std::int32_t>(mesh.positions.size()), mesh.faces);
  s.report()["topology"] = topology_json(g);
  const FitProblem problem(g, mesh.positions, cfg.pins);
  FitOptions opt;
  opt.max_iter = cfg.max_iter;
  const FitResult res = fit(problem, opt);
  s.report()["fit"] = json{{"iterations", res.iterations},
                           {"initial_energy", res.initial_energy},
                           {"energy", res.energy},
                           {"grad_norm", res.grad_norm},
                           {"max_residual", res.residual.absolute},
                           {"max_relative_residual", res.residual.relative},
                           {"worst_vertex", res.residual.worst},
                           {"pinned", cfg.pins},
                           {"converged", res.converged}};
  write_mesh(cfg.output, Mesh{res.positions, mesh.faces});
  s.report()["output"] = json{{"path", cfg.output},
                              {"vertices", res.positions.size()},
                              {"faces", mesh.faces.size()}};
  if (!res.converged) {
    s.add(ErrorCode::kDidNotConverge, res.iterations, res.grad_norm,
          "fit stopped after " + std::to_string(res.iterations) + " iterations without converging");
  }
}

void run_extend(Session& s, const RunConfig& cfg, const Mesh& mesh) {
  const QuadGraph g = QuadGraph::build(static_cast<std::int32_t>(mesh.positions.size()), mesh.faces);
  s.report()["topology"] = topology_json(g);
  const DegreeReport deg = g.interior_degrees_even();
  s.report()["degrees_even"] = deg.ok;
  if (!deg.ok) {
    record_odd_degrees(s, g, deg);
    return;
  }
  const ANet a = validate_anet(g, mesh.positions, cfg.tol);
  s.report()["planarity"] = planarity_json(a.diagnostics());
  const EquiTwistReport eq = equi_twisted(a);
  s.report()["twist"] = twist_json(a, eq);
  if (!eq.equi_twisted) {
    record_equi_twist(s, eq);
    return;
  }
  if (cfg.seed_face < 0 || cfg.seed_face >= g.face_count()) {
    throw Error(ErrorCode::kInvalidInput, "seed face out of range", cfg.seed_face);
  }
  const FaceFrame frame = face_frame(a, cfg.seed_face, 0);
  json prop{{"seed_face", cfg.seed_face},
            {"lambda", cfg.lambda},
            {"adapted_lambda_sign", adapted_lambda_sign(a, frame)},
            {"g1", frame.g1_ends},
            {"g2", frame.g2_ends}};
  s.report()["propagation"] = prop;
  const FaceHyperboloid seed = hyperboloid_from_parameter(frame, FamilyParameter{cfg.lambda}, cfg.tol);
  const PropagationResult net = propagate_all(a, seed, cfg.tol);
  json closure = json::array();
  for (const ClosureEntry& c : net.closure) closure.push_back({{"edge", c.edge}, {"residual", c.residual}});
  json faces = json::array();
  for (const FaceHyperboloid& hb : net.faces) {
    faces.push_back({{"face", hb.face()},
                     {"q1_square_sign", plucker_product(hb.q[0], hb.q[0]) > 0 ? 1 : -1},
                     {"P1", signature_json(hb.P1.signature())},
                     {"P2", signature_json(hb.P2.signature())}});
  }
  prop["max_closure"] = net.max_closure;
  prop["closure"] = closure;
  prop["faces"] = faces;
  s.report()["propagation"] = prop;

  const std::vector<HyperboloidPatch> patches = restrict_net(a, net, cfg.tol);
  std::vector<PatchGrid> grids;
  double boundary = 0.0;
  for (const HyperboloidPatch& p : patches) {
    grids.push_back(sample(p, cfg.samples_n, cfg.samples_m, cfg.tol.w_guard));
    boundary = std::max(boundary, boundary_residual(grids.back(), a));
  }
  s.report()["patches"] = json{{"count", patches.size()},
                               {"samples", {cfg.samples_n, cfg.samples_m}},
                               {"max_boundary_residual", boundary}};
  const C1Report c1 = check_c1(patches, a, cfg.c1_samples);
  json edges = json::array();
  for (const EdgeC1& e : c1.edges) edges.push_back({{"edge", e.edge}, {"max_angle", e.max_angle}, {"cusp", e.cusp}});
  s.report()["c1"] = json{{"samples_per_edge", cfg.c1_samples},
                          {"max_angle", c1.max_angle},
                          {"cusp_count", c1.cusp_count},
                          {"edges", edges}};
  const Mesh out = grids_to_mesh(grids, cfg.weld, &g);
  write_mesh(cfg.output, out);
  s.report()["output"] = json{{"path", cfg.output},
                              {"weld", cfg.weld},
                              {"vertices", out.positions.size()},
                              {"faces", out.faces.size()}};
}

void dump(std::ostringstream& out, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << inner << json(it.key()).dump() << ": ";
        dump(out, it.value(), indent + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      bool scalars = true;
      for (const json& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        out << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          dump(out, j[i], indent + 1);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << inner;
        dump(out, j[i], indent + 1);
      }
      out << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out << "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
      }
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kNonQuadFace:
    case ErrorCode::kIOError:
    case ErrorCode::kInvalidInput:
      return 1;
    case ErrorCode::kOddVertexDegree: return 3;
    case ErrorCode::kNotEquiTwisted: return 4;
    case ErrorCode::kNoAdaptedPatch: return 5;
    case ErrorCode::kClosureViolation: return 6;
    default: return 2;
  }
}

RunOutcome run(const RunConfig& cfg) {
  Session s(cfg);
  static const char* const names[] = {"check", "fit", "extend"};
  s.report()["command"] = names[static_cast<int>(cfg.command)];
  try {
    if (cfg.command != Command::kCheck && cfg.output.empty()) {
      throw Error(ErrorCode::kInvalidInput, "an output path is required");
    }
    if (cfg.command == Command::kExtend) {
      if (!std::isfinite(cfg.lambda) || cfg.lambda == 0.0) {
        throw Error(ErrorCode::kInvalidInput, "lambda must be finite and nonzero", -1, cfg.lambda);
      }
      if (cfg.samples_n < 2 || cfg.samples_m < 2 || cfg.c1_samples < 2) {
        throw Error(ErrorCode::kInvalidInput, "sample counts must be at least 2");
      }
    }
    const Mesh mesh = read_mesh(cfg.input);
    switch (cfg.command) {
      case Command::kCheck: run_check(s, cfg, mesh); break;
      case Command::kFit: run_fit(s, cfg, mesh); break;
      case Command::kExtend: run_extend(s, cfg, mesh); break;
    }
  } catch (const Error& e) {
    s.add(e);
  }
  s.report()["exit_code"] = s.exit_code();
  s.report()["status"] = s.failed() ? "error" : "ok";
  RunOutcome out{s.exit_code(), s.report()};
  if (!cfg.report.empty()) {
    std::ofstream f(cfg.report);
    f << dump_report(out.report);
    if (!f) {
      out.exit_code = 1;
      std::fprintf(stderr, "cannot write report '%s'\n", cfg.report.c_str());
    }
  }
  return out;
}

Tolerances tolerances_from_env(Tolerances base) {
  auto apply = [](const char* name, double& field) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return;
    char* end = nullptr;
    const double x = std::strtod(v, &end);
    if (end == v || *end != '\0' || !std::isfinite(x) || x <= 0.0) {
      throw Error(ErrorCode::kInvalidInput, std::string(name) + " must be a positive number");
    }
    field = x;
  };
  apply("HYPNET_TOL_PLANAR", base.planar);
  apply("HYPNET_TOL_CLOSURE", base.closure);
  apply("HYPNET_TOL_SIG", base.sig);
  apply("HYPNET_TOL_W", base.w_guard);
  return base;
}

std::string dump_report(const nlohmann::json& report) {
  std::ostringstream out;
  dump(out, report, 0);
  out << "\n";
  return out.str();
}

}  // namespace hypnet
