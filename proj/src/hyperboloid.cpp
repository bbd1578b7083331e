#include "hypnet/hyperboloid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <Eigen/QR>

#include "hypnet/error.hpp"

namespace hypnet {

FaceHyperboloid hyperboloid_from_points(const FaceFrame& frame, const Vec6& q1, const Vec6& q2,
                                        const Tolerances& tol) {
  const Vec6 u = q1.normalized();
  const Vec6 v = q2.normalized();
  const double s1 = plucker_product(u, u);
  const double s2 = plucker_product(v, v);
  if (!(s1 * s2 < 0.0) || std::abs(s1) < tol.incidence || std::abs(s2) < tol.incidence) {
    throw Error(ErrorCode::kDegenerateParameter,
                "hyperboloid of face " + std::to_string(frame.face) + " degenerates to two planes",
                frame.face, s1 * s2);
  }
  double worst = std::abs(plucker_product(u, v));
  for (const PluckerLine& h : frame.h) {
    worst = std::max({worst, std::abs(plucker_product(u, h.coords)), std::abs(plucker_product(v, h.coords))});
  }
  if (worst > tol.incidence) {
    throw Error(ErrorCode::kDegenerateParameter,
                "polar pair of face " + std::to_string(frame.face) + " is not on H", frame.face, worst);
  }
  FaceHyperboloid hb;
  hb.frame = frame;
  hb.q = {u, v};
  hb.P1 = Subspace::span({frame.h[kH1].coords, frame.h[kH1Shift].coords, u}, tol);
  hb.P2 = Subspace::span({frame.h[kH2].coords, frame.h[kH2Shift].coords, v}, tol);
  const Signature plus_heavy{2, 1, 0};
  const Signature minus_heavy{1, 2, 0};
  const bool ok = hb.P1.rank() == 3 && hb.P2.rank() == 3 &&
                  ((hb.P1.signature() == plus_heavy && hb.P2.signature() == minus_heavy) ||
                   (hb.P1.signature() == minus_heavy && hb.P2.signature() == plus_heavy));
  if (!ok) {
    throw Error(ErrorCode::kDegenerateParameter,
                "regulus planes of face " + std::to_string(frame.face) + " are not hyperbolic", frame.face);
  }
  return hb;
}

FaceHyperboloid hyperboloid_from_parameter(const FaceFrame& frame, FamilyParameter t, const Tolerances& tol) {
  if (!std::isfinite(t.lambda) || t.lambda == 0.0) {
    throw Error(ErrorCode::kDegenerateParameter, "lambda must be finite and nonzero", frame.face, t.lambda);
  }
  const Vec6& a = frame.g1.coords;
  const Vec6& b = frame.g2.coords;
  return hyperboloid_from_points(frame, a + t.lambda * b, a - t.lambda * b, tol);
}

Vec6 polar_partner(const FaceFrame& frame, const Vec6& q1) {
  const Vec6& a = frame.g1.coords;
  const Vec6& b = frame.g2.coords;
  const Vec6 u = q1.normalized();
  return (plucker_product(u, b) * a - plucker_product(u, a) * b).normalized();
}

double family_parameter_for(const FaceFrame& frame, const Vec6& q) {
  Eigen::Matrix<double, 6, 2> m;
  m.col(0) = frame.g1.coords;
  m.col(1) = frame.g2.coords;
  const Eigen::Vector2d c = m.colPivHouseholderQr().solve(q.normalized());
  if (std::abs(c[0]) < 1e-12 * std::abs(c[1])) {
    throw Error(ErrorCode::kDegenerateParameter, "point is the diagonal g2 (lambda = infinity)", frame.face);
  }
  return c[1] / c[0];
}

int adapted_lambda_sign(const ANet& a, const FaceFrame& frame) {
  const int t1 = twist(a, frame.face, QuadGraph::local_index(frame.halfedges[kH1]));
  const double ab = plucker_product(frame.g1, frame.g2);
  return -t1 * (ab > 0 ? 1 : -1);
}

Vec6 project_tau(const Vec6& q, const PluckerLine& center, const PluckerLine& target, double tol) {
  const Vec6 c = center.coords.normalized();
  const Vec6 t = target.coords.normalized();
  const double denom = plucker_product(c, t);
  if (std::abs(denom) < tol) {
    throw Error(ErrorCode::kProjectionDegenerate, "center line lies in the polar of the target", -1, denom);
  }
  return q - (plucker_product(q, t) / denom) * c;
}

int family_of(const FaceFrame& frame, HalfEdgeId he) {
  const int r = frame.role_of(he);
  if (r < 0) throw Error(ErrorCode::kInvalidInput, "half-edge is not in the frame's face", he);
  return r < 2 ? 1 : 2;
}

FaceFrame neighbor_frame(const ANet& a, const FaceFrame& frame, HalfEdgeId across) {
  const QuadGraph& g = a.graph();
  const HalfEdgeId t = g.halfedge(across).twin;
  if (t == kInvalid) throw Error(ErrorCode::kInvalidInput, "half-edge is on the boundary", across);
  const int fam = family_of(frame, across);
  const int local = QuadGraph::local_index(t);
  return face_frame(a, g.halfedge(t).face, fam == 2 ? local : local + 1);
}

FaceHyperboloid propagate_face(const ANet& a, const FaceHyperboloid& hb, HalfEdgeId across,
                               const FaceFrame& nb, const Tolerances& tol) {
  const QuadGraph& g = a.graph();
  const HalfEdgeId t = g.halfedge(across).twin;
  if (t == kInvalid) throw Error(ErrorCode::kInvalidInput, "half-edge is on the boundary", across);
  if (g.halfedge(t).face != nb.face) {
    throw Error(ErrorCode::kInvalidInput, "neighbor frame is not across the given half-edge", across);
  }
  const PluckerLine& shared = a.halfedge_line(across);
  const PluckerLine& far = a.halfedge_line(QuadGraph::opposite_in_face(t));
  const int fam_a = family_of(hb.frame, across);
  const int fam_b = family_of(nb, t);
  std::array<Vec6, 2> q;
  const Vec6 with_shared = project_tau(hb.q[static_cast<std::size_t>(fam_a - 1)], shared, far, tol.incidence);
  const Vec6 other = project_tau(hb.q[static_cast<std::size_t>(2 - fam_a)], shared, far, tol.incidence);
  q[static_cast<std::size_t>(fam_b - 1)] = with_shared;
  q[static_cast<std::size_t>(2 - fam_b)] = other;
  return hyperboloid_from_points(nb, q[0], q[1], tol);
}

FaceHyperboloid propagate_face(const ANet& a, const FaceHyperboloid& hb, HalfEdgeId across, const Tolerances& tol) {
  return propagate_face(a, hb, across, neighbor_frame(a, hb.frame, across), tol);
}

double projective_residual(const Vec6& u, const Vec6& v) {
  const Vec6 a = u.normalized();
  const Vec6 b = v.normalized();
  return std::min((a - b).norm(), (a + b).norm());
}

CycleResult propagate_cycle(const ANet& a, VertexId v, const FaceHyperboloid& hb, const Tolerances& tol) {
  const QuadGraph& g = a.graph();
  if (g.is_boundary_vertex(v)) throw Error(ErrorCode::kInvalidInput, "vertex is on the boundary", v);
  auto fan = g.outgoing_fan(v);
  auto it = std::find_if(fan.begin(), fan.end(), [&](HalfEdgeId h) { return g.halfedge(h).face == hb.face(); });
  if (it == fan.end()) throw Error(ErrorCode::kInvalidInput, "face does not contain the vertex", hb.face());
  std::rotate(fan.begin(), it, fan.end());

  CycleResult res;
  FaceHyperboloid cur = hb;
  for (std::size_t i = 0; i < fan.size(); ++i) {
    res.faces.push_back(g.halfedge(fan[i]).face);
    // Consecutive faces around v share the edge entering v in the current face.
    const HalfEdgeId across = g.prev(fan[i]);
    if (i + 1 < fan.size()) {
      cur = propagate_face(a, cur, across, tol);
    } else {
      cur = propagate_face(a, cur, across, hb.frame, tol);
    }
  }
  const double direct = std::max(projective_residual(cur.q[0], hb.q[0]), projective_residual(cur.q[1], hb.q[1]));
  const double swapped = std::max(projective_residual(cur.q[0], hb.q[1]), projective_residual(cur.q[1], hb.q[0]));
  res.pair_residual = direct;
  res.set_residual = std::min(direct, swapped);
  res.labels_swapped = swapped < direct;
  res.returned = std::move(cur);
  return res;
}

PropagationResult propagate_all(const ANet& a, const FaceHyperboloid& seed, const Tolerances& tol) {
  const QuadGraph& g = a.graph();
  const DegreeReport deg = g.interior_degrees_even();
  if (!deg.ok) {
    throw Error(ErrorCode::kOddVertexDegree,
                "interior vertex " + std::to_string(deg.offending.front()) + " has odd degree",
                deg.offending.front(), g.degree(deg.offending.front()));
  }
  if (g.component_count() != 1 || g.euler_characteristic() != 1) {
    throw Error(ErrorCode::kNotSimplyConnected, "mesh is not a topological disc", -1, g.euler_characteristic());
  }
  PropagationResult res;
  res.seed = seed.face();
  res.tree = g.dual_spanning_tree(seed.face());
  std::vector<bool> done(static_cast<std::size_t>(g.face_count()), false);
  std::vector<bool> tree_edge(static_cast<std::size_t>(g.edge_count()), false);
  res.faces.resize(static_cast<std::size_t>(g.face_count()));
  res.faces[static_cast<std::size_t>(seed.face())] = seed;
  done[static_cast<std::size_t>(seed.face())] = true;
  for (const TreeEntry& e : res.tree) {
    res.faces[static_cast<std::size_t>(e.face)] =
        propagate_face(a, res.faces[static_cast<std::size_t>(e.parent)], e.parent_halfedge, tol);
    done[static_cast<std::size_t>(e.face)] = true;
    tree_edge[static_cast<std::size_t>(g.halfedge(e.parent_halfedge).edge)] = true;
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (tree_edge[static_cast<std::size_t>(e)] || g.is_boundary_edge(e)) continue;
    const HalfEdgeId h = g.edge(e).halfedge;
    const FaceHyperboloid& A = res.faces[static_cast<std::size_t>(g.halfedge(h).face)];
    const FaceHyperboloid& B = res.faces[static_cast<std::size_t>(g.halfedge(g.halfedge(h).twin).face)];
    const FaceHyperboloid moved = propagate_face(a, A, h, B.frame, tol);
    const double r = std::max(projective_residual(moved.q[0], B.q[0]), projective_residual(moved.q[1], B.q[1]));
    res.closure.push_back({e, r});
    res.max_closure = std::max(res.max_closure, r);
    if (!(r <= tol.closure)) {
      throw Error(ErrorCode::kClosureViolation,
                  "propagated hyperboloids disagree across edge " + std::to_string(e), e, r);
    }
  }
  return res;
}

PropagationResult propagate_all(const ANet& a, FaceId seed_face, FamilyParameter t, const Tolerances& tol) {
  const FaceFrame frame = face_frame(a, seed_face, 0);
  PropagationResult res = propagate_all(a, hyperboloid_from_parameter(frame, t, tol), tol);
  res.lambda = t.lambda;
  return res;
}

int tangency_rank(const FaceHyperboloid& A, const FaceHyperboloid& B, const PluckerLine& shared, int family,
                  double rel_tol) {
  auto extend = [&](const Subspace& p) {
    std::vector<Vec6> gens;
    for (Eigen::Index i = 0; i < p.rank(); ++i) gens.emplace_back(p.basis().col(i));
    gens.push_back(shared.coords);
    return Subspace::span(gens);
  };
  const std::array<Subspace, 2> parts{extend(A.plane(family)), extend(B.plane(family))};
  return joint_rank(parts, rel_tol);
}

}  // namespace hypnet
