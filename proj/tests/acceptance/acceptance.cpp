// Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "hypnet/anet.hpp"
#include "hypnet/anet_fit.hpp"
#include "hypnet/error.hpp"
#include "hypnet/hyperboloid.hpp"
#include "hypnet/mesh_io.hpp"
#include "hypnet/patch.hpp"
#include "hypnet/pipeline.hpp"
#include "hypnet/projective.hpp"
#include "quadric.hpp"
#include "rational.hpp"

using namespace hypnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path work_dir() {
  auto dir = std::filesystem::temp_directory_path() / "hypnet_acceptance";
  std::filesystem::create_directories(dir);
  return dir;
}

// 1. Intersection predicate vs exact oracle on rational line pairs.
Outcome plucker_predicates() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 4);
  auto rq = [&] { return oracle::Q(num(rng), den(rng)); };
  auto rpoint = [&] { return oracle::point(rq(), rq(), rq()); };
  int agree = 0;
  int total = 0;
  double min_margin = 1e300;
  for (int k = 0; k < 1000; ++k) {
    oracle::QPoint x, y, u, v;
    if (k % 2 == 0) {
      // Share a point so the pair intersects.
      x = rpoint();
      y = rpoint();
      u = x;
      v = rpoint();
      // Move u along the first line to avoid a shared defining point.
      const oracle::Q s(num(rng), den(rng));
      for (int i = 0; i < 4; ++i) u[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + s * (y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]);
    } else {
      x = rpoint();
      y = rpoint();
      u = rpoint();
      v = rpoint();
    }
    const oracle::QLine a = oracle::join(x, y);
    const oracle::QLine b = oracle::join(u, v);
    bool degenerate = true;
    for (int i = 0; i < 6; ++i) degenerate = degenerate && a[static_cast<std::size_t>(i)] == 0;
    bool degenerate_b = true;
    for (int i = 0; i < 6; ++i) degenerate_b = degenerate_b && b[static_cast<std::size_t>(i)] == 0;
    const Vec6 ad = oracle::to_double(a);
    const Vec6 bd = oracle::to_double(b);
    if (degenerate || degenerate_b || std::abs(1.0 - std::abs(ad.normalized().dot(bd.normalized()))) < 1e-9) {
      --k;
      continue;
    }
    const bool exact_meet = oracle::product(a, b) == 0;
    bool float_meet = true;
    try {
      intersect_lines(PluckerLine{ad.normalized()}, PluckerLine{bd.normalized()});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSkewLines) throw;
      float_meet = false;
    }
    const double margin = std::abs(plucker_product(ad.normalized(), bd.normalized()));
    if (!exact_meet) min_margin = std::min(min_margin, margin);
    ++total;
    if (exact_meet == float_meet) ++agree;
  }
  const double secs = seconds_since(t0);
  return {agree == total && min_margin > 1e-6 && secs < 5.0,
          fmt("%.0f/%.0f agree, min skew margin %.3g, %.2f s", agree, total, min_margin, secs)};
}

// 2. det(M_P) sign from the eigen-inertia of the 3x3 Gram matrix.
Outcome gram_determinant_sign() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  int agree = 0;
  int sig_agree = 0;
  for (int k = 0; k < 500; ++k) {
    std::array<PluckerLine, 3> h;
    for (auto& l : h) l = line_from_points(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)));
    if (std::abs(plucker_product(h[0], h[1])) < 1e-3 || std::abs(plucker_product(h[0], h[2])) < 1e-3 ||
        std::abs(plucker_product(h[1], h[2])) < 1e-3) {
      --k;
      continue;
    }
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = plucker_product(h[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(j)]);
    const Signature s = inertia(m);
    const int det_sign = (s.minus % 2 == 0) ? 1 : -1;
    const double triple = 2.0 * m(0, 1) * m(0, 2) * m(1, 2);
    const int orient = regulus_orientation(h[0], h[1], h[2]);
    if (s.zero == 0 && det_sign == (triple > 0 ? 1 : -1) && det_sign == orient) ++agree;
    const Signature span_sig = Subspace::span({h[0].coords, h[1].coords, h[2].coords}).signature();
    if ((span_sig == Signature{2, 1, 0} && orient == -1) || (span_sig == Signature{1, 2, 0} && orient == 1)) ++sig_agree;
  }
  return {agree == 500 && sig_agree == 500, fmt("%.0f/500 inertia sign, %.0f/500 signature rule", agree, sig_agree)};
}

Vec3 random_point(std::mt19937_64& rng, double r = 1.0) {
  std::uniform_real_distribution<double> u(-r, r);
  return {u(rng), u(rng), u(rng)};
}

// 3. Twist through any interior cross-line.
Outcome twist_well_defined() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> in(0.02, 0.98);
  int quads = 0;
  int consistent = 0;
  while (quads < 100) {
    const Vec3 a = random_point(rng), b = random_point(rng), c = random_point(rng), d = random_point(rng);
    const std::array<Vec3, 4> pts{a, b, c, d};
    const PlaneFit fit = fit_plane(pts);
    if (fit.residual < 0.05 * fit.diameter) continue;
    ++quads;
    Mat4 m;
    m.row(0) = HomPoint::affine(a).coords;
    m.row(1) = HomPoint::affine(b).coords;
    m.row(2) = HomPoint::affine(d).coords;
    m.row(3) = HomPoint::affine(c).coords;
    const int tw = m.determinant() > 0 ? 1 : -1;
    bool ok = true;
    // A cross-line of the pair (ab, dc) joins interior points of ad and bc.
    const PluckerLine ab = line_from_points(a, b), dc = line_from_points(d, c);
    const PluckerLine bc = line_from_points(b, c), ad = line_from_points(a, d);
    for (int k = 0; k < 100 && ok; ++k) {
      const double s = in(rng), t = in(rng);
      const PluckerLine m1 = line_from_points(a + s * (d - a), b + t * (c - b));
      const PluckerLine m2 = line_from_points(a + s * (b - a), d + t * (c - d));
      ok = regulus_orientation(ab, dc, m1) == tw && regulus_orientation(bc, ad, m2) == -tw;
    }
    if (ok) ++consistent;
  }
  return {consistent == 100, fmt("%.0f/100 quads constant over 100 cross-lines each", consistent)};
}

// 4. tau preserves polarity on polar(center).
Outcome tau_polarity() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    const PluckerLine center = line_from_points(random_point(rng), random_point(rng));
    const PluckerLine target = line_from_points(random_point(rng), random_point(rng));
    if (std::abs(plucker_product(center, target)) < 1e-2) continue;
    const Subspace pc = polar(Subspace::span({center.coords}));
    Vec6 q = pc.basis() * Eigen::VectorXd::NullaryExpr(pc.rank(), [&] { return n(rng); });
    const Subspace pq = polar(Subspace::span({center.coords, q}));
    Vec6 q2 = pq.basis() * Eigen::VectorXd::NullaryExpr(pq.rank(), [&] { return n(rng); });
    q.normalize();
    q2.normalize();
    const Vec6 tq = project_tau(q, center, target).normalized();
    const Vec6 tq2 = project_tau(q2, center, target).normalized();
    worst = std::max(worst, std::abs(plucker_product(tq, tq2)));
    ++done;
  }
  return {worst < 1e-10, fmt("max |<tau q, tau q'>| = %.3g over 1000 samples", worst)};
}

// 5. Cycle closure around even vertices, label swap around degree 3.
Outcome even_degree_consistency() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(-10, 10);
  auto random_lambda = [&] {
    double l = 0;
    while (std::abs(l) < 1e-3) l = lam(rng);
    return l;
  };
  double worst_even = 0.0;
  bool even_labels = true;
  for (int degree : {4, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      const ANet a = fixtures::make_anet(fixtures::random_umbrella(degree, rng));
      const FaceHyperboloid hb = hyperboloid_from_parameter(face_frame(a, 0), {random_lambda()});
      const CycleResult r = propagate_cycle(a, 0, hb);
      worst_even = std::max(worst_even, r.pair_residual);
      if (r.labels_swapped) even_labels = false;
    }
  }
  int swaps = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ANet a = fixtures::make_anet(fixtures::random_umbrella(3, rng));
    const FaceHyperboloid hb = hyperboloid_from_parameter(face_frame(a, 0), {random_lambda()});
    const CycleResult r = propagate_cycle(a, 0, hb);
    if (r.labels_swapped && r.set_residual < 1e-8 && r.pair_residual > 1e-3) ++swaps;
  }
  return {worst_even < 1e-8 && even_labels && swaps == 100,
          fmt("even-degree max deviation %.3g, degree-3 swaps detected %.0f/100", worst_even, swaps)};
}

RunConfig extend_config(const std::filesystem::path& dir, const std::string& tag, double lambda) {
  RunConfig cfg;
  cfg.command = Command::kExtend;
  cfg.input = (dir / (tag + ".obj")).string();
  cfg.output = (dir / (tag + "_out.obj")).string();
  cfg.report = (dir / (tag + "_report.json")).string();
  cfg.seed_face = 0;
  cfg.lambda = lambda;
  cfg.samples_n = 9;
  cfg.samples_m = 9;
  cfg.c1_samples = 9;
  return cfg;
}

// 6. End-to-end extension on the z = xy grid.
Outcome extension_end_to_end() {
  const auto t0 = Clock::now();
  const auto dir = work_dir();
  const Mesh mesh = fixtures::zxy_grid(5);
  write_mesh((dir / "zxy5.obj").string(), mesh);
  const ANet a = fixtures::make_anet(mesh);
  const double lambda = quadric::global_lambda(face_frame(a, 0));
  const RunOutcome out = run(extend_config(dir, "zxy5", lambda));
  const double secs = seconds_since(t0);
  if (out.exit_code != 0) return {false, "extend exited with " + std::to_string(out.exit_code)};
  const double c1 = out.report["c1"]["max_angle"].get<double>();
  const double boundary = out.report["patches"]["max_boundary_residual"].get<double>();
  return {c1 < 1e-8 && boundary < 1e-10 && secs < 10.0,
          fmt("max C1 deviation %.3g rad, boundary residual %.3g, %.2f s", c1, boundary, secs)};
}

// 7. Bilinear patches break C1, the hyperbolic net does not.
Outcome bilinear_contrast() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  Mesh mesh = fixtures::zxy_grid(4);
  for (Vec3& p : mesh.positions) p += Vec3(u(rng), u(rng), u(rng));
  const QuadGraph g = QuadGraph::build(static_cast<int>(mesh.positions.size()), mesh.faces);
  const std::vector<VertexId> pins{0, 3, 12, 15};
  const FitResult fr = fit(FitProblem(g, mesh.positions, pins));
  if (!fr.converged) return {false, "refit did not converge"};
  const ANet a = validate_anet(g, fr.positions);
  if (!equi_twisted(a).equi_twisted) return {false, "refitted net is not equi-twisted"};
  const FaceFrame frame = face_frame(a, 0);
  const double lambda = adapted_lambda_sign(a, frame) * 1.0;
  const PropagationResult net = propagate_all(a, 0, {lambda});
  const auto patches = restrict_net(a, net);
  const double hyper = check_c1(patches, a, 9).max_angle;
  const double bilinear = bilinear_c1(a, 9).max_angle;
  return {bilinear > 1e-2 && hyper < 1e-8,
          fmt("bilinear max deviation %.3g rad, hyperbolic %.3g rad", bilinear, hyper)};
}

// 8. Gradient check and fit accuracy.
Outcome fit_stage() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const Mesh base = fixtures::zxy_grid(4);
  const QuadGraph g = QuadGraph::build(static_cast<int>(base.positions.size()), base.faces);
  double worst_rel = 0.0;
  for (int k = 0; k < 50; ++k) {
    std::vector<Vec3> x = base.positions;
    for (Vec3& p : x) p += 0.5 * Vec3(u(rng), u(rng), u(rng));
    const FitProblem p(g, x);
    std::vector<Vec3> d(x.size());
    for (Vec3& v : d) v = Vec3(u(rng), u(rng), u(rng));
    const auto grad = gradient(p, x);
    double analytic = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) analytic += grad[i].dot(d[i]);
    const double eps = 1e-5;
    std::vector<Vec3> xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xp[i] += eps * d[i];
      xm[i] -= eps * d[i];
    }
    const double fd = (energy(p, xp) - energy(p, xm)) / (2 * eps);
    worst_rel = std::max(worst_rel, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-300));
  }
  Mesh noisy = fixtures::zxy_grid(5);
  const QuadGraph g5 = QuadGraph::build(static_cast<int>(noisy.positions.size()), noisy.faces);
  std::vector<VertexId> pins;
  std::uniform_real_distribution<double> n3(-1e-3, 1e-3);
  for (VertexId v = 0; v < g5.vertex_count(); ++v) {
    if (g5.is_boundary_vertex(v)) {
      pins.push_back(v);
    } else {
      noisy.positions[static_cast<std::size_t>(v)] += Vec3(n3(rng), n3(rng), n3(rng));
    }
  }
  const FitResult fr = fit(FitProblem(g5, noisy.positions, pins));
  return {worst_rel < 1e-6 && fr.residual.absolute < 1e-8 && fr.iterations <= 5000,
          fmt("gradient rel. error %.3g, fit residual %.3g after %.0f iterations", worst_rel, fr.residual.absolute,
              fr.iterations)};
}

// 9. Byte-identical reports and meshes across runs.
Outcome determinism() {
  const auto dir = work_dir();
  const Mesh mesh = fixtures::zxy_grid(5);
  write_mesh((dir / "det.obj").string(), mesh);
  const ANet a = fixtures::make_anet(mesh);
  const RunConfig cfg = extend_config(dir, "det", quadric::global_lambda(face_frame(a, 0)));
  std::array<std::string, 2> report, out;
  for (int k = 0; k < 2; ++k) {
    const RunOutcome r = run(cfg);
    if (r.exit_code != 0) return {false, "extend exited with " + std::to_string(r.exit_code)};
    report[static_cast<std::size_t>(k)] = slurp(cfg.report);
    out[static_cast<std::size_t>(k)] = slurp(cfg.output);
  }
  RunConfig check = cfg;
  check.command = Command::kCheck;
  check.report = (dir / "det_check.json").string();
  run(check);
  const std::string c1 = slurp(check.report);
  run(check);
  const std::string c2 = slurp(check.report);
  const bool same = report[0] == report[1] && out[0] == out[1] && c1 == c2 && !report[0].empty() && !out[0].empty();
  return {same, fmt("report %.0f bytes, mesh %.0f bytes, identical across runs", static_cast<double>(report[0].size()),
                    static_cast<double>(out[0].size()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Plucker predicate suite", plucker_predicates},
      {"2 Gram determinant sign", gram_determinant_sign},
      {"3 Twist well-definedness", twist_well_defined},
      {"4 Polarity preservation of tau", tau_polarity},
      {"5 Even-degree consistency", even_degree_consistency},
      {"6 Extension end-to-end", extension_end_to_end},
      {"7 Bilinear contrast", bilinear_contrast},
      {"8 Fit stage", fit_stage},
      {"9 Determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
