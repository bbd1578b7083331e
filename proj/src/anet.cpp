#include "hypnet/anet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace hypnet {
namespace {

double diameter_of(std::span<const Vec3> points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, (points[i] - points[j]).norm());
  }
  return d;
}

std::array<Vec3, 4> face_points(const QuadGraph& g, std::span<const Vec3> positions, FaceId f) {
  const Quad& q = g.face(f);
  return {positions[static_cast<std::size_t>(q[0])], positions[static_cast<std::size_t>(q[1])],
          positions[static_cast<std::size_t>(q[2])], positions[static_cast<std::size_t>(q[3])]};
}

bool face_is_planar(const std::array<Vec3, 4>& pts, double planar) {
  const PlaneFit fit = fit_plane(pts);
  return fit.residual <= planar * fit.diameter;
}

}  // namespace

PlaneFit fit_plane(std::span<const Vec3> points) {
  PlaneFit out;
  out.plane = Vec4(0, 0, 1, 0);
  if (points.empty()) return out;
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = (points[i] - centroid).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Vec3 n = svd.matrixV().col(2);
  out.plane << n, -n.dot(centroid);
  for (const Vec3& p : points) out.residual = std::max(out.residual, std::abs(n.dot(p - centroid)));
  out.diameter = diameter_of(points);
  return out;
}

ANetDiagnostics diagnose(const QuadGraph& g, std::span<const Vec3> positions, const Tolerances& tol) {
  ANetDiagnostics d;
  const auto nv = static_cast<std::size_t>(g.vertex_count());
  d.planarity_residual.assign(nv, 0.0);
  d.star_diameter.assign(nv, 0.0);
  d.contact_planes.assign(nv, Vec4::Zero());

  std::vector<Violation> planarity;
  std::vector<Violation> faces;
  std::vector<Violation> pairs;

  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::vector<Vec3> star{positions[static_cast<std::size_t>(v)]};
    for (VertexId u : g.vertex_star(v)) star.push_back(positions[static_cast<std::size_t>(u)]);
    const PlaneFit fit = fit_plane(star);
    d.planarity_residual[static_cast<std::size_t>(v)] = fit.residual;
    d.star_diameter[static_cast<std::size_t>(v)] = fit.diameter;
    d.contact_planes[static_cast<std::size_t>(v)] = fit.plane;
    if (fit.residual > tol.planar * fit.diameter) {
      planarity.push_back({ErrorCode::kNonPlanarStar, v, -1, fit.residual,
                           "star of vertex " + std::to_string(v) + " is not planar"});
    }
  }

  std::vector<bool> degenerate(static_cast<std::size_t>(g.face_count()), false);
  for (FaceId f = 0; f < g.face_count(); ++f) {
    const auto pts = face_points(g, positions, f);
    const PlaneFit fit = fit_plane(pts);
    if (fit.residual <= tol.planar * fit.diameter) {
      degenerate[static_cast<std::size_t>(f)] = true;
      faces.push_back({ErrorCode::kDegenerateFace, f, -1, fit.residual,
                       "face " + std::to_string(f) + " is planar"});
    }
  }

  // Edge lines at a vertex must not all coincide: the star has to span a plane.
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const Vec3& pv = positions[static_cast<std::size_t>(v)];
    const auto fan = g.outgoing_fan(v);
    const Vec3 d0 = (positions[static_cast<std::size_t>(g.dest(fan[0]))] - pv).normalized();
    bool spans = false;
    for (VertexId u : g.vertex_star(v)) {
      if (d0.cross((positions[static_cast<std::size_t>(u)] - pv).normalized()).norm() > tol.incidence) {
        spans = true;
        break;
      }
    }
    if (!spans) {
      const HalfEdgeId p = g.prev(fan[0]);
      pairs.push_back({ErrorCode::kNonGenericPair, g.halfedge(fan[0]).edge, g.halfedge(p).edge, 0.0,
                       "all edge lines at vertex " + std::to_string(v) + " coincide"});
    }
  }
  // Opposite edges of a face must be skew.
  for (FaceId f = 0; f < g.face_count(); ++f) {
    if (degenerate[static_cast<std::size_t>(f)]) continue;
    const auto pts = face_points(g, positions, f);
    for (int k = 0; k < 2; ++k) {
      const PluckerLine a = line_from_points(pts[k], pts[k + 1]);
      const PluckerLine b = line_from_points(pts[k + 2], pts[(k + 3) & 3]);
      const double prod = plucker_product(a, b);
      if (std::abs(prod) < tol.incidence) {
        pairs.push_back({ErrorCode::kNonGenericPair, g.halfedge(QuadGraph::face_halfedge(f, k)).edge,
                         g.halfedge(QuadGraph::face_halfedge(f, k + 2)).edge, prod,
                         "opposite edges of face " + std::to_string(f) + " are not skew"});
      }
    }
  }

  d.violations = std::move(planarity);
  d.violations.insert(d.violations.end(), faces.begin(), faces.end());
  d.violations.insert(d.violations.end(), pairs.begin(), pairs.end());
  return d;
}

ANet validate_anet(QuadGraph g, std::vector<Vec3> positions, const Tolerances& tol) {
  if (static_cast<std::int32_t>(positions.size()) != g.vertex_count()) {
    throw Error(ErrorCode::kInvalidInput, "position count does not match vertex count");
  }
  for (std::size_t v = 0; v < positions.size(); ++v) {
    if (!positions[v].allFinite()) {
      throw Error(ErrorCode::kInvalidInput, "vertex " + std::to_string(v) + " is not finite",
                  static_cast<long>(v));
    }
  }
  ANet a;
  a.diagnostics_ = diagnose(g, positions, tol);
  if (!a.diagnostics_.violations.empty()) {
    const Violation& first = a.diagnostics_.violations.front();
    throw Error(first.code, first.message, first.index, first.value);
  }
  a.edge_lines_.reserve(static_cast<std::size_t>(g.edge_count()));
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    a.edge_lines_.push_back(line_from_points(positions[static_cast<std::size_t>(ed.v0)],
                                             positions[static_cast<std::size_t>(ed.v1)]));
  }
  a.graph_ = std::move(g);
  a.positions_ = std::move(positions);
  a.tol_ = tol;
  return a;
}

ContactElement vertex_contact_element(const ANet& a, VertexId v) {
  const QuadGraph& g = a.graph();
  const HalfEdgeId out = g.outgoing(v);
  const HalfEdgeId in = g.prev(out);
  const PluckerLine l0 = line_from_points(a.position(v), a.position(g.dest(out)));
  const PluckerLine l1 = line_from_points(a.position(v), a.position(g.halfedge(in).origin));
  ContactElement ce = contact_element(l0, l1);
  ce.plane = a.contact_plane(v);
  return ce;
}

int FaceFrame::role_of(HalfEdgeId he) const {
  for (int r = 0; r < 4; ++r) {
    if (halfedges[static_cast<std::size_t>(r)] == he) return r;
  }
  return -1;
}

FaceFrame face_frame(const ANet& a, FaceId f, int family2_edge) {
  const QuadGraph& g = a.graph();
  if (f < 0 || f >= g.face_count()) throw Error(ErrorCode::kInvalidInput, "face id out of range", f);
  const Quad& w = g.face(f);
  const int k = family2_edge & 3;
  FaceFrame fr;
  fr.face = f;
  fr.family2_edge = k;
  fr.corners = {w[k], w[(k + 1) & 3], w[(k + 2) & 3], w[(k + 3) & 3]};
  fr.halfedges = {QuadGraph::face_halfedge(f, k + 3), QuadGraph::face_halfedge(f, k + 1),
                  QuadGraph::face_halfedge(f, k), QuadGraph::face_halfedge(f, k + 2)};
  for (int r = 0; r < 4; ++r) fr.h[static_cast<std::size_t>(r)] = a.halfedge_line(fr.halfedges[static_cast<std::size_t>(r)]);

  const VertexId lo = *std::min_element(w.begin(), w.end());
  int i0 = 0;
  while (w[static_cast<std::size_t>(i0)] != lo) ++i0;
  auto oriented = [](VertexId p, VertexId q) {
    return p < q ? std::array<VertexId, 2>{p, q} : std::array<VertexId, 2>{q, p};
  };
  fr.g1_ends = oriented(w[static_cast<std::size_t>(i0)], w[static_cast<std::size_t>((i0 + 2) & 3)]);
  fr.g2_ends = oriented(w[static_cast<std::size_t>((i0 + 1) & 3)], w[static_cast<std::size_t>((i0 + 3) & 3)]);
  fr.g1 = line_from_points(a.position(fr.g1_ends[0]), a.position(fr.g1_ends[1]));
  fr.g2 = line_from_points(a.position(fr.g2_ends[0]), a.position(fr.g2_ends[1]));

  Tolerances tol = a.tolerances();
  fr.span_h = Subspace::span({fr.h[0].coords, fr.h[1].coords, fr.h[2].coords, fr.h[3].coords}, tol);
  if (fr.span_h.rank() != 4) {
    throw Error(ErrorCode::kDegenerateFace,
                "edge lines of face " + std::to_string(f) + " do not span a 3-space", f);
  }
  fr.H = polar(fr.span_h, tol);
  return fr;
}

double twist_determinant(const ANet& a, FaceId f, int local_edge) {
  const Quad& w = a.graph().face(f);
  const int k = local_edge & 3;
  const VertexId va = w[static_cast<std::size_t>(k)];
  const VertexId vb = w[static_cast<std::size_t>((k + 1) & 3)];
  const VertexId vc = w[static_cast<std::size_t>((k + 2) & 3)];
  const VertexId vd = w[static_cast<std::size_t>((k + 3) & 3)];
  Mat4 m;
  m.row(0) = a.point(va).coords.transpose();
  m.row(1) = a.point(vb).coords.transpose();
  m.row(2) = a.point(vd).coords.transpose();
  m.row(3) = a.point(vc).coords.transpose();
  return m.determinant();
}

int twist(const ANet& a, FaceId f, int local_edge) {
  const auto pts = face_points(a.graph(), a.positions(), f);
  if (face_is_planar(pts, a.tolerances().planar)) {
    throw Error(ErrorCode::kDegenerateFace, "face " + std::to_string(f) + " is planar", f);
  }
  return twist_determinant(a, f, local_edge) > 0 ? 1 : -1;
}

EquiTwistReport equi_twisted(const ANet& a) {
  EquiTwistReport report;
  report.degrees = a.graph().interior_degrees_even();
  for (Strip& s : a.graph().strips()) {
    StripTwist st;
    for (std::size_t i = 0; i < s.faces.size(); ++i) {
      st.signs.push_back(twist(a, s.faces[i], QuadGraph::local_index(s.rails[i][0])));
      if (st.signs.back() != st.signs.front()) st.uniform = false;
    }
    st.strip = std::move(s);
    if (!st.uniform) report.equi_twisted = false;
    report.strips.push_back(std::move(st));
  }
  return report;
}

}  // namespace hypnet
