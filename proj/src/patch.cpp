#include "hypnet/patch.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/QR>

#include "hypnet/error.hpp"

namespace hypnet {
namespace {

std::array<int, 2> family_roles(int family) {
  return family == 1 ? std::array<int, 2>{kH1, kH1Shift} : std::array<int, 2>{kH2, kH2Shift};
}

std::array<VertexId, 2> endpoints(const QuadGraph& g, HalfEdgeId h) {
  return {g.halfedge(h).origin, g.dest(h)};
}

VertexId common_vertex(const QuadGraph& g, HalfEdgeId a, HalfEdgeId b) {
  for (VertexId u : endpoints(g, a)) {
    for (VertexId v : endpoints(g, b)) {
      if (u == v) return u;
    }
  }
  throw Error(ErrorCode::kInvalidInput, "half-edges do not meet", a);
}

bool incident(const QuadGraph& g, HalfEdgeId h, VertexId v) {
  const auto e = endpoints(g, h);
  return e[0] == v || e[1] == v;
}

// The mid-ruling of the arc has to cross both rail segments in their interiors.
bool mid_ruling_inside(const ANet& a, const ConicArc& arc, const std::array<HalfEdgeId, 2>& rails) {
  const PluckerLine mid = arc.line(0.5);
  for (HalfEdgeId r : rails) {
    HomPoint x;
    try {
      x = intersect_lines(mid, a.halfedge_line(r), 1e-6);
    } catch (const Error&) {
      return false;
    }
    const auto e = endpoints(a.graph(), r);
    if (!segment_parameter(x, a.position(e[0]), a.position(e[1])).interior) return false;
  }
  return true;
}

std::optional<ConicArc> adapted_arc(const ANet& a, const Vec6& h0, const Vec6& h1, const Vec6& q,
                                    const std::array<HalfEdgeId, 2>& rails, std::span<const int> branches) {
  for (int b : branches) {
    ConicArc arc = conic_arc(h0, h1, q, b);
    if (mid_ruling_inside(a, arc, rails)) return arc;
  }
  return std::nullopt;
}

void set_corners(const QuadGraph& g, HyperboloidPatch& p) {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      p.corner[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          common_vertex(g, p.ends[0][static_cast<std::size_t>(i)], p.ends[1][static_cast<std::size_t>(j)]);
    }
  }
}

double point_segment_distance(const Vec3& x, const Vec3& p0, const Vec3& p1) {
  const Vec3 d = p1 - p0;
  const double len2 = d.squaredNorm();
  const double u = len2 > 0 ? std::clamp((x - p0).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (x - (p0 + u * d)).norm();
}

double plane_angle(const Vec3& n0, const Vec3& n1) {
  return std::atan2(n0.cross(n1).norm(), std::abs(n0.dot(n1)));
}

const std::array<int, 2> kBothBranches{1, -1};

}  // namespace

Vec6 ConicArc::operator()(double t) const {
  const double s = 1.0 - t;
  return s * s * h0 + c * t * t * h1 + static_cast<double>(branch) * t * s * q;
}

Eigen::Matrix<double, 6, 3> ConicArc::plane_basis() const {
  Eigen::Matrix<double, 6, 3> b;
  b.col(0) = h0;
  b.col(1) = h1;
  b.col(2) = q;
  return b;
}

ConicArc conic_arc(const Vec6& h, const Vec6& h_prime, const Vec6& q, int branch, double tol) {
  const double hh = plucker_product(h, h_prime);
  if (std::abs(hh) < tol * h.norm() * h_prime.norm()) {
    throw Error(ErrorCode::kDegenerateConic, "end rulings of the arc intersect", -1, hh);
  }
  const double qq = plucker_product(q, q);
  if (std::abs(qq) < tol * q.squaredNorm()) {
    throw Error(ErrorCode::kDegenerateConic, "arc midpoint is isotropic", -1, qq);
  }
  return ConicArc{h, h_prime, q, -qq / (2.0 * hh), branch >= 0 ? 1 : -1};
}

SegmentHit segment_parameter(const HomPoint& x, const Vec3& p0, const Vec3& p1) {
  Eigen::Matrix<double, 4, 2> m;
  m.col(0) = HomPoint::affine(p0).coords;
  m.col(1) = HomPoint::affine(p1).coords;
  const Vec4 xn = x.coords.normalized();
  const Eigen::Vector2d ab = m.colPivHouseholderQr().solve(xn);
  SegmentHit hit;
  hit.residual = (m * ab - xn).norm();
  const double sum = ab[0] + ab[1];
  hit.u = sum != 0.0 ? ab[1] / sum : std::numeric_limits<double>::infinity();
  hit.interior = ab[0] * ab[1] > 0.0;
  return hit;
}

HyperboloidPatch restrict_to_patch(const ANet& a, const FaceHyperboloid& hb) {
  HyperboloidPatch p;
  p.face = hb.face();
  p.frame = hb.frame;
  for (int family = 1; family <= 2; ++family) {
    const auto roles = family_roles(family);
    const auto rails = family_roles(3 - family);
    const std::array<HalfEdgeId, 2> rail_he{hb.frame.halfedges[static_cast<std::size_t>(rails[0])],
                                            hb.frame.halfedges[static_cast<std::size_t>(rails[1])]};
    const auto arc = adapted_arc(a, hb.frame.h[static_cast<std::size_t>(roles[0])].coords,
                                 hb.frame.h[static_cast<std::size_t>(roles[1])].coords,
                                 hb.q[static_cast<std::size_t>(family - 1)], rail_he, kBothBranches);
    if (!arc) {
      throw Error(ErrorCode::kNoAdaptedPatch,
                  "no regulus arc of family " + std::to_string(family) + " fits face " +
                      std::to_string(p.face),
                  p.face);
    }
    p.ruling[static_cast<std::size_t>(family - 1)] = *arc;
    p.ends[static_cast<std::size_t>(family - 1)] = {hb.frame.halfedges[static_cast<std::size_t>(roles[0])],
                                                    hb.frame.halfedges[static_cast<std::size_t>(roles[1])]};
  }
  set_corners(a.graph(), p);
  return p;
}

std::vector<HyperboloidPatch> restrict_net(const ANet& a, const PropagationResult& net, const Tolerances& tol) {
  const QuadGraph& g = a.graph();
  std::vector<HyperboloidPatch> patches(static_cast<std::size_t>(g.face_count()));
  for (FaceId f = 0; f < g.face_count(); ++f) {
    patches[static_cast<std::size_t>(f)].face = f;
    patches[static_cast<std::size_t>(f)].frame = net.faces[static_cast<std::size_t>(f)].frame;
  }
  auto no_patch = [](FaceId f, int family) {
    return Error(ErrorCode::kNoAdaptedPatch,
                 "no regulus arc of family " + std::to_string(family) + " fits face " + std::to_string(f), f);
  };

  for (const Strip& strip : g.strips()) {
    const FaceId f0 = strip.faces.front();
    const FaceFrame& fr0 = net.faces[static_cast<std::size_t>(f0)].frame;
    const int family = 3 - family_of(fr0, strip.rails[0][0]);
    const auto roles = family_roles(family);

    // Parameter 0 sits on the cross edge through the smaller end of the first rail.
    const auto l0 = endpoints(g, strip.rails[0][0]);
    const VertexId vmin = std::min(l0[0], l0[1]);
    HalfEdgeId e0 = fr0.halfedges[static_cast<std::size_t>(roles[0])];
    HalfEdgeId e1 = fr0.halfedges[static_cast<std::size_t>(roles[1])];
    if (!incident(g, e0, vmin)) std::swap(e0, e1);

    auto arc = adapted_arc(a, a.halfedge_line(e0).coords, a.halfedge_line(e1).coords,
                           net.faces[static_cast<std::size_t>(f0)].q[static_cast<std::size_t>(family - 1)],
                           strip.rails[0], kBothBranches);
    if (!arc) throw no_patch(f0, family);
    patches[static_cast<std::size_t>(f0)].ruling[static_cast<std::size_t>(family - 1)] = *arc;
    patches[static_cast<std::size_t>(f0)].ends[static_cast<std::size_t>(family - 1)] = {e0, e1};

    for (std::size_t i = 1; i < strip.faces.size(); ++i) {
      const FaceId f = strip.faces[i];
      const FaceHyperboloid& hb = net.faces[static_cast<std::size_t>(f)];
      const PluckerLine& center = a.halfedge_line(strip.rails[i - 1][1]);
      const PluckerLine& target = a.halfedge_line(strip.rails[i][1]);
      const Vec6 t0 = project_tau(arc->h0, center, target, tol.incidence);
      const Vec6 t1 = project_tau(arc->h1, center, target, tol.incidence);
      const Vec6 tq = project_tau(arc->q, center, target, tol.incidence);

      HalfEdgeId c0 = hb.frame.halfedges[static_cast<std::size_t>(roles[0])];
      HalfEdgeId c1 = hb.frame.halfedges[static_cast<std::size_t>(roles[1])];
      if (projective_residual(t0, a.halfedge_line(c0).coords) > projective_residual(t0, a.halfedge_line(c1).coords)) {
        std::swap(c0, c1);
      }
      // Same lines as the images, with the images' scale and sign.
      const Vec6& u0 = a.halfedge_line(c0).coords;
      const Vec6& u1 = a.halfedge_line(c1).coords;
      const Vec6& uq = hb.q[static_cast<std::size_t>(family - 1)];
      const double worst = std::max({projective_residual(t0, u0), projective_residual(t1, u1),
                                     projective_residual(tq, uq)});
      if (worst > std::sqrt(tol.closure)) {
        throw Error(ErrorCode::kClosureViolation,
                    "transported rulings do not match face " + std::to_string(f), f, worst);
      }
      const std::array<int, 1> keep{arc->branch};
      arc = adapted_arc(a, t0.dot(u0) * u0, t1.dot(u1) * u1, tq.dot(uq) * uq, strip.rails[i], keep);
      if (!arc) throw no_patch(f, family);
      patches[static_cast<std::size_t>(f)].ruling[static_cast<std::size_t>(family - 1)] = *arc;
      patches[static_cast<std::size_t>(f)].ends[static_cast<std::size_t>(family - 1)] = {c0, c1};
    }
  }
  for (HyperboloidPatch& p : patches) set_corners(g, p);
  return patches;
}

PatchGrid sample(const HyperboloidPatch& p, int n, int m, double w_guard) {
  if (n < 2 || m < 2) throw Error(ErrorCode::kInvalidInput, "need at least 2 samples per direction");
  PatchGrid grid;
  grid.face = p.face;
  grid.n = n;
  grid.m = m;
  grid.corner_vertices = {p.corner[0][0], p.corner[1][0], p.corner[1][1], p.corner[0][1]};
  grid.points.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  std::vector<PluckerLine> r1(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r1[static_cast<std::size_t>(i)] = p.ruling[0].line(static_cast<double>(i) / (n - 1));
  for (int j = 0; j < m; ++j) {
    const PluckerLine r2 = p.ruling[1].line(static_cast<double>(j) / (m - 1));
    for (int i = 0; i < n; ++i) {
      const Vec4 x = intersect_lines(r1[static_cast<std::size_t>(i)], r2, 1e-6).coords.normalized();
      if (std::abs(x.w()) < w_guard) {
        throw Error(ErrorCode::kNumericallyInfinitePoint,
                    "patch of face " + std::to_string(p.face) + " reaches infinity", j * n + i, x.w());
      }
      grid.points[static_cast<std::size_t>(j * n + i)] = x.head<3>() / x.w();
    }
  }
  return grid;
}

double boundary_residual(const PatchGrid& grid, const ANet& a) {
  const auto& c = grid.corner_vertices;
  double worst = 0.0;
  auto side = [&](VertexId from, VertexId to, auto point_at, int count) {
    const Vec3& p0 = a.position(from);
    const Vec3& p1 = a.position(to);
    worst = std::max(worst, (point_at(0) - p0).norm());
    worst = std::max(worst, (point_at(count - 1) - p1).norm());
    for (int k = 0; k < count; ++k) worst = std::max(worst, point_segment_distance(point_at(k), p0, p1));
  };
  side(c[0], c[1], [&](int i) { return grid.at(i, 0); }, grid.n);
  side(c[3], c[2], [&](int i) { return grid.at(i, grid.m - 1); }, grid.n);
  side(c[0], c[3], [&](int j) { return grid.at(0, j); }, grid.m);
  side(c[1], c[2], [&](int j) { return grid.at(grid.n - 1, j); }, grid.m);
  return worst;
}

C1Report check_c1(const std::vector<HyperboloidPatch>& patches, const ANet& a, int samples_per_edge) {
  const QuadGraph& g = a.graph();
  if (samples_per_edge < 2) throw Error(ErrorCode::kInvalidInput, "need at least 2 samples per edge");
  C1Report report;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (g.is_boundary_edge(e)) continue;
    const Edge& ed = g.edge(e);
    const Vec3& p0 = a.position(ed.v0);
    const Vec3& p1 = a.position(ed.v1);
    const Vec3 de = p1 - p0;
    const std::array<HalfEdgeId, 2> sides{ed.halfedge, g.halfedge(ed.halfedge).twin};
    EdgeC1 out;
    out.edge = e;
    for (int k = 0; k < samples_per_edge; ++k) {
      const double u = static_cast<double>(k) / (samples_per_edge - 1);
      const Vec3 p = p0 + u * de;
      std::array<Vec3, 2> normal;
      std::array<Vec3, 2> inward;
      for (int s = 0; s < 2; ++s) {
        const HalfEdgeId he = sides[static_cast<std::size_t>(s)];
        const HyperboloidPatch& patch = patches[static_cast<std::size_t>(g.halfedge(he).face)];
        const int cross = 3 - family_of(patch.frame, he);
        const PluckerLine ruling =
            line_in_span_through(patch.ruling[static_cast<std::size_t>(cross - 1)].plane_basis(), HomPoint::affine(p));
        normal[static_cast<std::size_t>(s)] = de.cross(ruling.direction());
        const HomPoint far = intersect_lines(ruling, a.halfedge_line(QuadGraph::opposite_in_face(he)), 1e-6);
        inward[static_cast<std::size_t>(s)] = far.affine_point() - p;
      }
      out.max_angle = std::max(out.max_angle, plane_angle(normal[0], normal[1]));
      const Vec3 across = normal[0].cross(de);
      if ((inward[0].dot(across) > 0) == (inward[1].dot(across) > 0)) out.cusp = true;
    }
    report.max_angle = std::max(report.max_angle, out.max_angle);
    if (out.cusp) ++report.cusp_count;
    report.edges.push_back(out);
  }
  return report;
}

C1Report bilinear_c1(const ANet& a, int samples_per_edge) {
  const QuadGraph& g = a.graph();
  if (samples_per_edge < 2) throw Error(ErrorCode::kInvalidInput, "need at least 2 samples per edge");
  C1Report report;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (g.is_boundary_edge(e)) continue;
    const Edge& ed = g.edge(e);
    const Vec3& p0 = a.position(ed.v0);
    const Vec3& p1 = a.position(ed.v1);
    const Vec3 de = p1 - p0;
    // Far neighbors of v0 and v1 in each adjacent face.
    std::array<std::array<Vec3, 2>, 2> far;
    const std::array<HalfEdgeId, 2> sides{ed.halfedge, g.halfedge(ed.halfedge).twin};
    for (int s = 0; s < 2; ++s) {
      const HalfEdgeId he = sides[static_cast<std::size_t>(s)];
      const HalfEdgeId opp = QuadGraph::opposite_in_face(he);
      // he runs origin -> dest; the opposite half-edge runs dest' -> origin'.
      const VertexId near_origin = g.dest(opp);
      const VertexId near_dest = g.halfedge(opp).origin;
      const bool forward = g.halfedge(he).origin == ed.v0;
      far[static_cast<std::size_t>(s)] = {a.position(forward ? near_origin : near_dest),
                                          a.position(forward ? near_dest : near_origin)};
    }
    EdgeC1 out;
    out.edge = e;
    for (int k = 0; k < samples_per_edge; ++k) {
      const double u = static_cast<double>(k) / (samples_per_edge - 1);
      std::array<Vec3, 2> xv;
      std::array<Vec3, 2> normal;
      for (int s = 0; s < 2; ++s) {
        const auto& q = far[static_cast<std::size_t>(s)];
        xv[static_cast<std::size_t>(s)] = (1.0 - u) * (q[0] - p0) + u * (q[1] - p1);
        normal[static_cast<std::size_t>(s)] = de.cross(xv[static_cast<std::size_t>(s)]);
      }
      out.max_angle = std::max(out.max_angle, plane_angle(normal[0], normal[1]));
      const Vec3 across = normal[0].cross(de);
      if ((xv[0].dot(across) > 0) == (xv[1].dot(across) > 0)) out.cusp = true;
    }
    report.max_angle = std::max(report.max_angle, out.max_angle);
    if (out.cusp) ++report.cusp_count;
    report.edges.push_back(out);
  }
  return report;
}

}  // namespace hypnet
