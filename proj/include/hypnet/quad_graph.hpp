#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace hypnet {

using VertexId = std::int32_t;
using FaceId = std::int32_t;
using HalfEdgeId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr std::int32_t kInvalid = -1;

using Quad = std::array<VertexId, 4>;

// One side of a face. Half-edge 4f + k runs from corner k to corner k+1 of face f.
struct HalfEdge {
  VertexId origin = kInvalid;
  HalfEdgeId twin = kInvalid;  // kInvalid on the boundary
  HalfEdgeId next = kInvalid;
  FaceId face = kInvalid;
  EdgeId edge = kInvalid;
};

struct Edge {
  VertexId v0 = kInvalid;  // origin of halfedge
  VertexId v1 = kInvalid;
  HalfEdgeId halfedge = kInvalid;  // first half-edge in id order
};

// A maximal sequence of faces where consecutive faces share opposite edges.
// rails[i] = {l_i, r_i}: half-edges of faces[i], l_i shared with faces[i-1]
// (or a boundary edge for i = 0) and r_i the opposite half-edge.
struct Strip {
  std::vector<FaceId> faces;
  std::vector<std::array<HalfEdgeId, 2>> rails;
};

struct DegreeReport {
  bool ok = true;
  std::vector<VertexId> offending;
};

struct TreeEntry {
  FaceId face = kInvalid;
  FaceId parent = kInvalid;
  HalfEdgeId parent_halfedge = kInvalid;  // half-edge of the parent on the shared edge
};

// Half-edge structure of a strongly regular quad cell decomposition.
// Immutable after build().
class QuadGraph {
 public:
  // Faces may come with inconsistent orientation; they are re-oriented
  // (reversed in place) to agree with the first face of their component.
  // Throws kInvalidInput, kNotAQuad, kNonManifold, kNotStronglyRegular, kNonOrientable.
  static QuadGraph build(std::int32_t vertex_count, std::span<const Quad> faces);

  std::int32_t vertex_count() const { return vertex_count_; }
  std::int32_t face_count() const { return static_cast<std::int32_t>(faces_.size()); }
  std::int32_t edge_count() const { return static_cast<std::int32_t>(edges_.size()); }
  std::int32_t halfedge_count() const { return static_cast<std::int32_t>(halfedges_.size()); }

  // Vertex cycle of the face after orientation fix-up.
  const Quad& face(FaceId f) const { return faces_[static_cast<std::size_t>(f)]; }
  const std::vector<Quad>& faces() const { return faces_; }
  bool face_flipped(FaceId f) const { return flipped_[static_cast<std::size_t>(f)]; }

  const HalfEdge& halfedge(HalfEdgeId h) const { return halfedges_[static_cast<std::size_t>(h)]; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

  static HalfEdgeId face_halfedge(FaceId f, int k) { return 4 * f + (k & 3); }
  static int local_index(HalfEdgeId h) { return h & 3; }
  static HalfEdgeId opposite_in_face(HalfEdgeId h) { return (h & ~3) | ((h + 2) & 3); }
  HalfEdgeId prev(HalfEdgeId h) const { return (h & ~3) | ((h + 3) & 3); }
  VertexId dest(HalfEdgeId h) const { return halfedge(halfedge(h).next).origin; }
  bool is_boundary_halfedge(HalfEdgeId h) const { return halfedge(h).twin == kInvalid; }
  bool is_boundary_edge(EdgeId e) const { return is_boundary_halfedge(edge(e).halfedge); }

  bool is_boundary_vertex(VertexId v) const;
  int degree(VertexId v) const;
  // Some outgoing half-edge of v; for boundary vertices the one whose face
  // starts the fan.
  HalfEdgeId outgoing(VertexId v) const { return outgoing_[static_cast<std::size_t>(v)]; }

  // Neighbors in rotation order: cyclic for interior vertices, path order
  // (boundary neighbor first) for boundary vertices.
  std::vector<VertexId> vertex_star(VertexId v) const;
  // Outgoing half-edges in the same order as vertex_star (for boundary
  // vertices the final neighbor is reached through a boundary edge of the
  // last face and has no outgoing half-edge of its own; it is omitted here).
  std::vector<HalfEdgeId> outgoing_fan(VertexId v) const;
  // Faces around v in rotation order.
  std::vector<FaceId> faces_around(VertexId v) const;

  DegreeReport interior_degrees_even() const;

  // Throws kClosedStripDetected for closed or self-intersecting strips.
  std::vector<Strip> strips() const;

  // Breadth-first order; neighbors visited by ascending face id.
  // Throws kDisconnectedMesh.
  std::vector<TreeEntry> dual_spanning_tree(FaceId seed) const;

  int euler_characteristic() const { return vertex_count_ - edge_count() + face_count(); }
  // Number of connected components of the face adjacency graph.
  int component_count() const;

 private:
  std::int32_t vertex_count_ = 0;
  std::vector<Quad> faces_;
  std::vector<bool> flipped_;
  std::vector<HalfEdge> halfedges_;
  std::vector<Edge> edges_;
  std::vector<HalfEdgeId> outgoing_;
};

}  // namespace hypnet
