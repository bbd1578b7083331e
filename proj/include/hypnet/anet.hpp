#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hypnet/error.hpp"
#include "hypnet/projective.hpp"
#include "hypnet/quad_graph.hpp"
#include "hypnet/tolerances.hpp"

namespace hypnet {

struct Violation {
  ErrorCode code;
  long index = -1;   // vertex, face or edge id
  long index2 = -1;  // second edge of a pair, when applicable
  double value = 0.0;
  std::string message;
};

// Best-fit plane of a point set: plane = (n, -n.c) with unit n, residual is
// the largest point-to-plane distance.
struct PlaneFit {
  Vec4 plane;
  double residual = 0.0;
  double diameter = 0.0;
};

PlaneFit fit_plane(std::span<const Vec3> points);

struct ANetDiagnostics {
  std::vector<double> planarity_residual;  // per vertex, absolute distance
  std::vector<double> star_diameter;       // per vertex
  std::vector<Vec4> contact_planes;        // per vertex
  std::vector<Violation> violations;       // planarity, face, pair order

  bool ok() const { return violations.empty(); }
};

// Collects every violation instead of stopping at the first.
ANetDiagnostics diagnose(const QuadGraph& g, std::span<const Vec3> positions,
                         const Tolerances& tol = {});

// An affine A-net: positions are finite points of the chart w = 1.
class ANet {
 public:
  const QuadGraph& graph() const { return graph_; }
  const std::vector<Vec3>& positions() const { return positions_; }
  HomPoint point(VertexId v) const { return HomPoint::affine(positions_[static_cast<std::size_t>(v)]); }
  const Vec3& position(VertexId v) const { return positions_[static_cast<std::size_t>(v)]; }
  const Vec4& contact_plane(VertexId v) const { return diagnostics_.contact_planes[static_cast<std::size_t>(v)]; }
  double planarity_residual(VertexId v) const {
    return diagnostics_.planarity_residual[static_cast<std::size_t>(v)];
  }
  // Discrete asymptotic line of an edge, oriented from edge(e).v0 to edge(e).v1.
  const PluckerLine& edge_line(EdgeId e) const { return edge_lines_[static_cast<std::size_t>(e)]; }
  const PluckerLine& halfedge_line(HalfEdgeId h) const { return edge_line(graph_.halfedge(h).edge); }
  const ANetDiagnostics& diagnostics() const { return diagnostics_; }
  const Tolerances& tolerances() const { return tol_; }

 private:
  friend ANet validate_anet(QuadGraph g, std::vector<Vec3> positions, const Tolerances& tol);

  QuadGraph graph_;
  std::vector<Vec3> positions_;
  std::vector<PluckerLine> edge_lines_;
  ANetDiagnostics diagnostics_;
  Tolerances tol_;
};

// Throws the first violation in the order: kNonPlanarStar, kDegenerateFace,
// kNonGenericPair. Rejects non-finite coordinates with kInvalidInput.
ANet validate_anet(QuadGraph g, std::vector<Vec3> positions, const Tolerances& tol = {});

// Contact element at v: the star's plane with the pencil through v, spanned
// by two edge lines of one face at v.
ContactElement vertex_contact_element(const ANet& a, VertexId v);

// Edge lines of a face in role order. With the face cycle (w0..w3) rotated so
// that the family-(2) edge starts at corner k:
//   x = w_k, x2 = w_{k+1}, x12 = w_{k+2}, x1 = w_{k+3},
//   h^(2) = x x2, h^(2)_1 = x1 x12, h^(1) = x x1, h^(1)_2 = x2 x12.
struct FaceFrame {
  FaceId face = kInvalid;
  int family2_edge = 0;             // local index of the half-edge carrying h^(2)
  std::array<VertexId, 4> corners;  // x, x2, x12, x1
  // Role order (h^(1), h^(1)_2, h^(2), h^(2)_1).
  std::array<PluckerLine, 4> h;
  std::array<HalfEdgeId, 4> halfedges;
  // Diagonals, unit norm, oriented from lower to higher vertex id; g1 passes
  // through the face's smallest vertex id.
  PluckerLine g1;
  PluckerLine g2;
  std::array<VertexId, 2> g1_ends;
  std::array<VertexId, 2> g2_ends;
  Subspace span_h;
  Subspace H;

  // Role slot (0..3) of a half-edge of this face.
  int role_of(HalfEdgeId he) const;
};

enum Role { kH1 = 0, kH1Shift = 1, kH2 = 2, kH2Shift = 3 };

// family2_edge in {0,1,2,3}; only its parity decides which pair is family (2),
// its value decides the corner x.
FaceFrame face_frame(const ANet& a, FaceId f, int family2_edge = 0);

// det of the homogeneous vertex coordinates in the order a, b, d, c for the
// opposite pair ((a,b),(d,c)) containing local edge k. Raw determinant.
double twist_determinant(const ANet& a, FaceId f, int local_edge);
// Sign of twist_determinant; kDegenerateFace when the face is (numerically) planar.
int twist(const ANet& a, FaceId f, int local_edge);

struct StripTwist {
  Strip strip;
  std::vector<int> signs;  // per face, twist of its rail pair
  bool uniform = true;
};

struct EquiTwistReport {
  bool equi_twisted = true;
  std::vector<StripTwist> strips;
  DegreeReport degrees;
};

// Throws kClosedStripDetected through QuadGraph::strips.
EquiTwistReport equi_twisted(const ANet& a);

}  // namespace hypnet
