#pragma once

#include <array>
#include <vector>

#include "hypnet/anet.hpp"
#include "hypnet/hyperboloid.hpp"
#include "hypnet/projective.hpp"

namespace hypnet {

// Rational quadratic parametrization of a regulus conic between two rulings:
//   arc(t) = (1-t)^2 h0 + c t^2 h1 + branch t(1-t) q,  c = -<q,q> / (2<h0,h1>).
// Every arc(t) is isotropic; the representatives are used as given.
struct ConicArc {
  Vec6 h0;
  Vec6 h1;
  Vec6 q;
  double c = 0.0;
  int branch = 1;

  Vec6 operator()(double t) const;
  PluckerLine line(double t) const { return PluckerLine{(*this)(t).normalized()}; }
  // Basis of the regulus plane span(h0, h1, q).
  Eigen::Matrix<double, 6, 3> plane_basis() const;
};

// Throws kDegenerateConic if <h,h'> is small relative to |h||h'|.
ConicArc conic_arc(const Vec6& h, const Vec6& h_prime, const Vec6& q, int branch, double tol = 1e-10);

// Affine parameter of point x on the segment p0 -> p1, from x ~ alpha p0 + beta p1
// in homogeneous coordinates: u = beta / (alpha + beta). interior is true
// when alpha and beta are nonzero with the same sign.
struct SegmentHit {
  double u = 0.0;
  bool interior = false;
  double residual = 0.0;
};
SegmentHit segment_parameter(const HomPoint& x, const Vec3& p0, const Vec3& p1);

struct HyperboloidPatch {
  FaceId face = kInvalid;
  FaceFrame frame;
  // ruling[0] is family (1) in the parameter t, ruling[1] family (2) in s.
  std::array<ConicArc, 2> ruling;
  // ends[F][k]: half-edge of the face carried by ruling[F] at parameter k.
  std::array<std::array<HalfEdgeId, 2>, 2> ends{};
  // corner[i][j]: vertex at t = i, s = j.
  std::array<std::array<VertexId, 2>, 2> corner{};
};

// Restriction of one face hyperboloid with unit representatives; ruling[0]
// runs from h^(1) to h^(1)_2 and ruling[1] from h^(2) to h^(2)_1, so that
// (t,s) = (0,0), (1,0), (0,1), (1,1) map to x, x2, x1, x12.
// Throws kNoAdaptedPatch when neither conic branch yields a mid-ruling that
// crosses both opposite edge segments in their interiors.
HyperboloidPatch restrict_to_patch(const ANet& a, const FaceHyperboloid& hb);

// Restriction of a propagated net. Ruling representatives are carried along
// every strip by the projections across the shared edges, so adjacent
// patches use the same parameter along their common edge.
std::vector<HyperboloidPatch> restrict_net(const ANet& a, const PropagationResult& net,
                                           const Tolerances& tol = {});

struct PatchGrid {
  FaceId face = kInvalid;
  int n = 0;  // samples in t
  int m = 0;  // samples in s
  std::vector<Vec3> points;  // points[j * n + i] at (t_i, s_j)
  // Vertex ids at the (t,s) corners (0,0), (1,0), (1,1), (0,1).
  std::array<VertexId, 4> corner_vertices{};

  const Vec3& at(int i, int j) const { return points[static_cast<std::size_t>(j * n + i)]; }
};

// point(i,j) = intersection of ruling[0](t_i) and ruling[1](s_j), uniform
// parameters. Throws kInvalidInput for n or m below 2 and
// kNumericallyInfinitePoint (index = j * n + i) when |w| of the unit
// homogeneous point is below w_guard.
PatchGrid sample(const HyperboloidPatch& p, int n, int m, double w_guard = 1e-9);

// Largest distance of a grid's boundary samples from the corresponding quad
// edge segments, including the corner-to-vertex errors.
double boundary_residual(const PatchGrid& grid, const ANet& a);

struct EdgeC1 {
  EdgeId edge = kInvalid;
  double max_angle = 0.0;  // radians
  bool cusp = false;
};

struct C1Report {
  std::vector<EdgeC1> edges;  // interior edges
  double max_angle = 0.0;
  int cusp_count = 0;
};

// Tangent planes of both sides at samples_per_edge uniform points (endpoints
// included) of every interior edge. A sample is a cusp when both patches
// leave the edge toward the same side within the common tangent plane.
// patches is indexed by face id.
C1Report check_c1(const std::vector<HyperboloidPatch>& patches, const ANet& a, int samples_per_edge);

// Same measurement for the corner-interpolating bilinear patch of each face.
C1Report bilinear_c1(const ANet& a, int samples_per_edge);

}  // namespace hypnet
