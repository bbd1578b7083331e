#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "hypnet/error.hpp"
#include "hypnet/hyperboloid.hpp"
#include "hypnet/patch.hpp"
#include "quadric.hpp"

using namespace hypnet;

namespace {

FaceHyperboloid global_hyperboloid(const ANet& a, FaceId f) {
  const FaceFrame fr = face_frame(a, f);
  return hyperboloid_from_parameter(fr, {quadric::global_lambda(fr)});
}

double line_residual(const std::vector<Vec3>& pts) {
  const Vec3 d = (pts.back() - pts.front()).normalized();
  double r = 0;
  for (const Vec3& p : pts) r = std::max(r, (p - pts.front()).cross(d).norm());
  return r;
}

}  // namespace

TEST_CASE("conic arc") {
  const ANet a = fixtures::make_anet(fixtures::zxy_grid(2));
  const FaceHyperboloid hb = hyperboloid_from_parameter(face_frame(a, 0), {0.7});
  const Vec6 h0 = hb.frame.h[kH1].coords, h1 = hb.frame.h[kH1Shift].coords;
  for (int branch : {1, -1}) {
    const ConicArc arc = conic_arc(h0, h1, hb.q[0], branch);
    CHECK((arc(0.0) - h0).norm() < 1e-15);
    CHECK(projective_residual(arc(1.0), h1) < 1e-15);
    // <arc,arc> = 2 c (1-t)^2 t^2 <h0,h1> + t^2 (1-t)^2 <q,q> + 2 b t (1-t) [(1-t)^2 <h0,q> + c t^2 <h1,q>].
    for (double t : {0.1, 0.33, 0.5, 0.8, 1.7, -0.4}) {
      const Vec6 v = arc(t);
      const double expect = 2 * arc.c * (1 - t) * (1 - t) * t * t * plucker_product(h0, h1) +
                            t * t * (1 - t) * (1 - t) * plucker_product(hb.q[0], hb.q[0]) +
                            2 * branch * t * (1 - t) *
                                ((1 - t) * (1 - t) * plucker_product(h0, hb.q[0]) +
                                 arc.c * t * t * plucker_product(h1, hb.q[0]));
      CHECK(std::abs(expect) < 1e-12);
      CHECK(std::abs(plucker_product(v, v)) < 1e-12 * v.squaredNorm());
      CHECK(hb.P1.contains(v, 1e-12));
    }
  }
  const Vec6 mid_plus = conic_arc(h0, h1, hb.q[0], 1)(0.5), mid_minus = conic_arc(h0, h1, hb.q[0], -1)(0.5);
  CHECK(projective_residual(mid_plus, mid_minus) > 1e-3);
  for (const Vec6& m : {mid_plus, mid_minus}) {
    for (int j = 0; j < 3; ++j) CHECK(std::abs(plucker_product(m, hb.P2.basis().col(j))) < 1e-12);
  }
  // Intersecting lines span no conic arc.
  try {
    conic_arc(hb.frame.h[kH1].coords, hb.frame.h[kH2].coords, hb.q[0], 1);
    FAIL("expected DegenerateConic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateConic);
  }
}

TEST_CASE("segment parameter") {
  const Vec3 p0(1, 0, 0), p1(3, 2, 0);
  SegmentHit h = segment_parameter(HomPoint::affine(Vec3(2, 1, 0)), p0, p1);
  CHECK(h.u == doctest::Approx(0.5));
  CHECK(h.interior);
  CHECK(h.residual < 1e-14);
  h = segment_parameter(HomPoint::affine(Vec3(5, 4, 0)), p0, p1);
  CHECK(h.u == doctest::Approx(2.0));
  CHECK(!h.interior);
  h = segment_parameter(HomPoint::affine(Vec3(0, -1, 0)), p0, p1);
  CHECK(!h.interior);
  // Scaled homogeneous input gives the same parameter.
  h = segment_parameter(HomPoint{Vec4(-3, -1, 0, -2)}, p0, p1);
  CHECK(h.u == doctest::Approx(0.25));
  CHECK(h.interior);
  h = segment_parameter(HomPoint::affine(Vec3(2, 1, 1)), p0, p1);
  CHECK(h.residual > 0.1);
}

TEST_CASE("patch of the unit quad on z = xy") {
  const ANet a = fixtures::make_anet(fixtures::zxy_grid(2));
  const FaceHyperboloid hb = global_hyperboloid(a, 0);
  const HyperboloidPatch p = restrict_to_patch(a, hb);
  CHECK(p.corner[0][0] == hb.frame.corners[0]);
  CHECK(p.corner[1][0] == hb.frame.corners[1]);
  CHECK(p.corner[1][1] == hb.frame.corners[2]);
  CHECK(p.corner[0][1] == hb.frame.corners[3]);

  const PatchGrid grid = sample(p, 7, 6);
  CHECK(grid.points.size() == 42);
  for (const Vec3& x : grid.points) {
    CHECK(x.z() == doctest::Approx(x.x() * x.y()));
    CHECK(x.x() >= -1e-12);
    CHECK(x.x() <= 1 + 1e-12);
    CHECK(x.y() >= -1e-12);
    CHECK(x.y() <= 1 + 1e-12);
  }
  // Parameter lines are rulings x = const or y = const.
  for (int j = 0; j < grid.m; ++j) {
    std::vector<Vec3> row;
    for (int i = 0; i < grid.n; ++i) row.push_back(grid.at(i, j));
    CHECK(line_residual(row) < 1e-10);
    const bool axis = std::abs(row.front().x() - row.back().x()) < 1e-10 ||
                      std::abs(row.front().y() - row.back().y()) < 1e-10;
    CHECK(axis);
  }
  for (int i = 0; i < grid.n; ++i) {
    std::vector<Vec3> col;
    for (int j = 0; j < grid.m; ++j) col.push_back(grid.at(i, j));
    CHECK(line_residual(col) < 1e-10);
  }
  CHECK(boundary_residual(grid, a) < 1e-12);
}

TEST_CASE("mid-ruling orientation equals the twist") {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 10; ++k) {
    const ANet a = fixtures::make_anet(fixtures::random_umbrella(4, rng));
    const FaceFrame fr = face_frame(a, 0);
    const FaceHyperboloid hb = hyperboloid_from_parameter(fr, {adapted_lambda_sign(a, fr) * 1.3});
    const HyperboloidPatch p = restrict_to_patch(a, hb);
    const PluckerLine mid1 = p.ruling[0].line(0.5);
    CHECK(regulus_orientation(fr.h[kH1], mid1, fr.h[kH1Shift]) ==
          twist(a, fr.face, QuadGraph::local_index(fr.halfedges[kH1])));
    const PluckerLine mid2 = p.ruling[1].line(0.5);
    CHECK(regulus_orientation(fr.h[kH2], mid2, fr.h[kH2Shift]) ==
          twist(a, fr.face, QuadGraph::local_index(fr.halfedges[kH2])));
  }
}

TEST_CASE("swapped labels have no patch") {
  const ANet a = fixtures::make_anet(fixtures::zxy_grid(2));
  const FaceHyperboloid hb = global_hyperboloid(a, 0);
  const FaceHyperboloid sw = hyperboloid_from_points(hb.frame, hb.q[1], hb.q[0]);
  try {
    restrict_to_patch(a, sw);
    FAIL("expected NoAdaptedPatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoAdaptedPatch);
    CHECK(e.index() == 0);
  }
  // Same for the opposite parameter sign on a random net.
  std::mt19937_64 rng(52);
  const ANet r = fixtures::make_anet(fixtures::random_umbrella(4, rng));
  const FaceFrame fr = face_frame(r, 0);
  CHECK_THROWS_AS(restrict_to_patch(r, hyperboloid_from_parameter(fr, {-adapted_lambda_sign(r, fr) * 0.8})), Error);
}

TEST_CASE("sampling") {
  const ANet a = fixtures::make_anet(fixtures::zxy_grid(3));
  const PropagationResult net = propagate_all(a, 0, {quadric::global_lambda(face_frame(a, 0))});
  const auto patches = restrict_net(a, net);
  REQUIRE(patches.size() == 4);
  for (const HyperboloidPatch& p : patches) {
    const PatchGrid g = sample(p, 2, 2);
    REQUIRE(g.points.size() == 4);
    CHECK((g.at(0, 0) - a.position(g.corner_vertices[0])).norm() < 1e-12);
    CHECK((g.at(1, 0) - a.position(g.corner_vertices[1])).norm() < 1e-12);
    CHECK((g.at(1, 1) - a.position(g.corner_vertices[2])).norm() < 1e-12);
    CHECK((g.at(0, 1) - a.position(g.corner_vertices[3])).norm() < 1e-12);
    std::set<VertexId> corners(g.corner_vertices.begin(), g.corner_vertices.end());
    const Quad& q = a.graph().face(p.face);
    CHECK(corners == std::set<VertexId>(q.begin(), q.end()));
  }
  CHECK_THROWS_AS(sample(patches[0], 1, 4), Error);
}

TEST_CASE("restricted net agrees along shared edges") {
  const ANet a = fixtures::make_anet(fixtures::zxy_grid(4));
  const PropagationResult net = propagate_all(a, 0, {quadric::global_lambda(face_frame(a, 0))});
  const auto patches = restrict_net(a, net);
  std::vector<PatchGrid> grids;
  for (const auto& p : patches) grids.push_back(sample(p, 5, 5));
  // Collect boundary samples keyed by edge and position from the lower vertex.
  std::map<std::pair<EdgeId, int>, std::vector<Vec3>> by_edge;
  const QuadGraph& g = a.graph();
  for (const PatchGrid& gr : grids) {
    auto record = [&](VertexId v0, VertexId v1, std::vector<Vec3> pts) {
      if (v0 > v1) {
        std::reverse(pts.begin(), pts.end());
        std::swap(v0, v1);
      }
      for (HalfEdgeId h : g.outgoing_fan(v0)) {
        if (g.dest(h) != v1) continue;
        for (int k = 0; k < 5; ++k) by_edge[{g.halfedge(h).edge, k}].push_back(pts[static_cast<std::size_t>(k)]);
      }
      for (HalfEdgeId h : g.outgoing_fan(v1)) {
        if (g.dest(h) != v0) continue;
        for (int k = 0; k < 5; ++k) by_edge[{g.halfedge(h).edge, k}].push_back(pts[static_cast<std::size_t>(k)]);
      }
    };
    std::vector<Vec3> bottom, top, left, right;
    for (int i = 0; i < 5; ++i) {
      bottom.push_back(gr.at(i, 0));
      top.push_back(gr.at(i, 4));
      left.push_back(gr.at(0, i));
      right.push_back(gr.at(4, i));
    }
    record(gr.corner_vertices[0], gr.corner_vertices[1], bottom);
    record(gr.corner_vertices[3], gr.corner_vertices[2], top);
    record(gr.corner_vertices[0], gr.corner_vertices[3], left);
    record(gr.corner_vertices[1], gr.corner_vertices[2], right);
  }
  int shared = 0;
  for (const auto& [key, pts] : by_edge) {
    if (pts.size() < 2) continue;
    ++shared;
    CHECK((pts[0] - pts[1]).norm() < 1e-12);
  }
  CHECK(shared == 12 * 5);
}

TEST_CASE("C1 check on the global quadric") {
  const ANet a = fixtures::make_anet(fixtures::zxy_grid(4));
  const PropagationResult net = propagate_all(a, 0, {quadric::global_lambda(face_frame(a, 0))});
  const C1Report r = check_c1(restrict_net(a, net), a, 9);
  CHECK(r.edges.size() == 12);
  CHECK(r.max_angle < 1e-10);
  CHECK(r.cusp_count == 0);
  // Bilinear interpolation of z = xy on integer cells is z = xy itself.
  const C1Report b = bilinear_c1(a, 9);
  CHECK(b.max_angle < 1e-10);
  CHECK(b.cusp_count == 0);
}

TEST_CASE("C1 check on random nets") {
  std::mt19937_64 rng(53);
  double bilinear_max = 0;
  int extended = 0, rejected = 0;
  while (extended < 10 || rejected < 3) {
    const ANet a = fixtures::make_anet(fixtures::random_umbrella(4, rng));
    const FaceFrame fr = face_frame(a, 0);
    const PropagationResult net = propagate_all(a, 0, {adapted_lambda_sign(a, fr) * 0.9});
    if (!equi_twisted(a).equi_twisted) {
      // Some strip changes twist, so some face has no finite patch.
      if (rejected < 3) {
        CHECK_THROWS_AS(restrict_net(a, net), Error);
        ++rejected;
      }
      continue;
    }
    if (extended == 10) continue;
    ++extended;
    const C1Report r = check_c1(restrict_net(a, net), a, 9);
    CHECK(r.edges.size() == 4);
    CHECK(r.max_angle < 1e-8);
    CHECK(r.cusp_count == 0);
    bilinear_max = std::max(bilinear_max, bilinear_c1(a, 9).max_angle);
  }
  CHECK(bilinear_max > 1e-2);
}
