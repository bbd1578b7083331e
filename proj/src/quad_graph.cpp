#include "hypnet/quad_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "hypnet/error.hpp"

namespace hypnet {
namespace {

using EdgeKey = std::pair<VertexId, VertexId>;

EdgeKey undirected(VertexId a, VertexId b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct EdgeUse {
  FaceId face;
  int local;
  bool forward;  // traversed from the smaller to the larger vertex id
};

}  // namespace

QuadGraph QuadGraph::build(std::int32_t vertex_count, std::span<const Quad> faces) {
  if (vertex_count < 0) throw Error(ErrorCode::kInvalidInput, "negative vertex count");
  if (faces.empty()) throw Error(ErrorCode::kInvalidInput, "mesh has no faces");
  QuadGraph g;
  g.vertex_count_ = vertex_count;
  g.faces_.assign(faces.begin(), faces.end());
  const auto nf = static_cast<FaceId>(g.faces_.size());

  std::vector<int> valence(static_cast<std::size_t>(vertex_count), 0);
  for (FaceId f = 0; f < nf; ++f) {
    const Quad& q = g.faces_[static_cast<std::size_t>(f)];
    for (int k = 0; k < 4; ++k) {
      if (q[k] < 0 || q[k] >= vertex_count) {
        throw Error(ErrorCode::kInvalidInput, "vertex index out of range in face " +
                                                  std::to_string(f), f);
      }
      for (int j = 0; j < k; ++j) {
        if (q[j] == q[k]) {
          throw Error(ErrorCode::kNotAQuad, "face " + std::to_string(f) +
                                                " repeats a vertex", f);
        }
      }
      ++valence[static_cast<std::size_t>(q[k])];
    }
  }
  for (VertexId v = 0; v < vertex_count; ++v) {
    if (valence[static_cast<std::size_t>(v)] == 0) {
      throw Error(ErrorCode::kInvalidInput,
                  "vertex " + std::to_string(v) + " is not used by any face", v);
    }
  }

  // Undirected edge usage; more than two faces on an edge is non-manifold.
  std::map<EdgeKey, std::vector<EdgeUse>> uses;
  for (FaceId f = 0; f < nf; ++f) {
    const Quad& q = g.faces_[static_cast<std::size_t>(f)];
    for (int k = 0; k < 4; ++k) {
      const VertexId a = q[k];
      const VertexId b = q[(k + 1) & 3];
      auto& u = uses[undirected(a, b)];
      u.push_back({f, k, a < b});
      if (u.size() > 2) {
        throw Error(ErrorCode::kNonManifold,
                    "edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") is shared by more than two faces", f);
      }
    }
  }

  // Strong regularity: faces meet in nothing, one vertex, or one common edge.
  {
    std::vector<std::vector<FaceId>> incident(static_cast<std::size_t>(vertex_count));
    for (FaceId f = 0; f < nf; ++f) {
      for (VertexId v : g.faces_[static_cast<std::size_t>(f)]) {
        incident[static_cast<std::size_t>(v)].push_back(f);
      }
    }
    std::map<std::pair<FaceId, FaceId>, std::vector<VertexId>> common;
    for (VertexId v = 0; v < vertex_count; ++v) {
      const auto& inc = incident[static_cast<std::size_t>(v)];
      for (std::size_t i = 0; i < inc.size(); ++i) {
        for (std::size_t j = i + 1; j < inc.size(); ++j) {
          common[{std::min(inc[i], inc[j]), std::max(inc[i], inc[j])}].push_back(v);
        }
      }
    }
    for (const auto& [pair, verts] : common) {
      if (verts.size() == 1) continue;
      if (verts.size() == 2) {
        auto it = uses.find(undirected(verts[0], verts[1]));
        if (it != uses.end() && it->second.size() == 2) {
          const auto& u = it->second;
          const bool both = (u[0].face == pair.first && u[1].face == pair.second) ||
                            (u[1].face == pair.first && u[0].face == pair.second);
          if (both) continue;
        }
      }
      throw Error(ErrorCode::kNotStronglyRegular,
                  "faces " + std::to_string(pair.first) + " and " +
                      std::to_string(pair.second) + " share " + std::to_string(verts.size()) +
                      " vertices but not exactly one edge",
                  pair.first);
    }
  }

  // Orientation propagation over the face adjacency graph.
  std::vector<int> orient(static_cast<std::size_t>(nf), 0);
  std::vector<std::vector<std::pair<FaceId, bool>>> adjacency(static_cast<std::size_t>(nf));
  for (const auto& [key, u] : uses) {
    if (u.size() != 2) continue;
    const bool same = u[0].forward == u[1].forward;
    adjacency[static_cast<std::size_t>(u[0].face)].push_back({u[1].face, same});
    adjacency[static_cast<std::size_t>(u[1].face)].push_back({u[0].face, same});
  }
  for (FaceId start = 0; start < nf; ++start) {
    if (orient[static_cast<std::size_t>(start)] != 0) continue;
    orient[static_cast<std::size_t>(start)] = 1;
    std::deque<FaceId> queue{start};
    while (!queue.empty()) {
      const FaceId f = queue.front();
      queue.pop_front();
      for (auto [h, same] : adjacency[static_cast<std::size_t>(f)]) {
        const int want = same ? -orient[static_cast<std::size_t>(f)]
                              : orient[static_cast<std::size_t>(f)];
        int& o = orient[static_cast<std::size_t>(h)];
        if (o == 0) {
          o = want;
          queue.push_back(h);
        } else if (o != want) {
          throw Error(ErrorCode::kNonOrientable,
                      "no consistent orientation exists (conflict at face " +
                          std::to_string(h) + ")",
                      h);
        }
      }
    }
  }
  g.flipped_.assign(static_cast<std::size_t>(nf), false);
  for (FaceId f = 0; f < nf; ++f) {
    if (orient[static_cast<std::size_t>(f)] < 0) {
      Quad& q = g.faces_[static_cast<std::size_t>(f)];
      q = {q[0], q[3], q[2], q[1]};
      g.flipped_[static_cast<std::size_t>(f)] = true;
    }
  }

  // Half-edges, twins and edges.
  g.halfedges_.resize(static_cast<std::size_t>(4 * nf));
  std::map<EdgeKey, HalfEdgeId> directed;
  for (FaceId f = 0; f < nf; ++f) {
    const Quad& q = g.faces_[static_cast<std::size_t>(f)];
    for (int k = 0; k < 4; ++k) {
      const HalfEdgeId h = face_halfedge(f, k);
      HalfEdge& he = g.halfedges_[static_cast<std::size_t>(h)];
      he.origin = q[k];
      he.next = face_halfedge(f, k + 1);
      he.face = f;
      if (!directed.emplace(EdgeKey{q[k], q[(k + 1) & 3]}, h).second) {
        throw Error(ErrorCode::kNonManifold, "directed edge used twice", f);
      }
    }
  }
  for (HalfEdgeId h = 0; h < 4 * nf; ++h) {
    HalfEdge& he = g.halfedges_[static_cast<std::size_t>(h)];
    const VertexId a = he.origin;
    const VertexId b = g.halfedges_[static_cast<std::size_t>(he.next)].origin;
    auto it = directed.find({b, a});
    if (it != directed.end()) he.twin = it->second;
    if (he.twin == kInvalid || he.twin > h) {
      he.edge = static_cast<EdgeId>(g.edges_.size());
      g.edges_.push_back({a, b, h});
    } else {
      he.edge = g.halfedges_[static_cast<std::size_t>(he.twin)].edge;
    }
  }

  // Vertex manifoldness: a single fan per vertex.
  g.outgoing_.assign(static_cast<std::size_t>(vertex_count), kInvalid);
  std::vector<int> boundary_out(static_cast<std::size_t>(vertex_count), 0);
  for (HalfEdgeId h = 0; h < 4 * nf; ++h) {
    const HalfEdge& he = g.halfedges_[static_cast<std::size_t>(h)];
    auto& out = g.outgoing_[static_cast<std::size_t>(he.origin)];
    if (he.twin == kInvalid) {
      ++boundary_out[static_cast<std::size_t>(he.origin)];
      out = h;
    } else if (out == kInvalid) {
      out = h;
    }
  }
  for (VertexId v = 0; v < vertex_count; ++v) {
    if (boundary_out[static_cast<std::size_t>(v)] > 1) {
      throw Error(ErrorCode::kNonManifold,
                  "vertex " + std::to_string(v) + " has more than one boundary fan", v);
    }
    const auto fan = g.faces_around(v);
    if (static_cast<int>(fan.size()) != valence[static_cast<std::size_t>(v)]) {
      throw Error(ErrorCode::kNonManifold,
                  "faces around vertex " + std::to_string(v) + " do not form one fan", v);
    }
  }
  return g;
}

bool QuadGraph::is_boundary_vertex(VertexId v) const {
  return is_boundary_halfedge(outgoing(v));
}

std::vector<HalfEdgeId> QuadGraph::outgoing_fan(VertexId v) const {
  std::vector<HalfEdgeId> fan;
  const HalfEdgeId start = outgoing(v);
  HalfEdgeId h = start;
  do {
    fan.push_back(h);
    const HalfEdgeId p = prev(h);
    h = halfedge(p).twin;
    if (fan.size() > halfedges_.size()) break;
  } while (h != kInvalid && h != start);
  return fan;
}

std::vector<VertexId> QuadGraph::vertex_star(VertexId v) const {
  std::vector<VertexId> star;
  const auto fan = outgoing_fan(v);
  for (HalfEdgeId h : fan) star.push_back(dest(h));
  if (is_boundary_vertex(v)) star.push_back(halfedge(prev(fan.back())).origin);
  return star;
}

std::vector<FaceId> QuadGraph::faces_around(VertexId v) const {
  std::vector<FaceId> faces;
  for (HalfEdgeId h : outgoing_fan(v)) faces.push_back(halfedge(h).face);
  return faces;
}

int QuadGraph::degree(VertexId v) const { return static_cast<int>(vertex_star(v).size()); }

DegreeReport QuadGraph::interior_degrees_even() const {
  DegreeReport report;
  for (VertexId v = 0; v < vertex_count_; ++v) {
    if (!is_boundary_vertex(v) && degree(v) % 2 != 0) {
      report.ok = false;
      report.offending.push_back(v);
    }
  }
  return report;
}

std::vector<Strip> QuadGraph::strips() const {
  const auto nf = face_count();
  std::vector<std::array<bool, 2>> visited(static_cast<std::size_t>(nf), {false, false});
  std::vector<Strip> result;
  for (FaceId f = 0; f < nf; ++f) {
    for (int pair = 0; pair < 2; ++pair) {
      if (visited[static_cast<std::size_t>(f)][static_cast<std::size_t>(pair)]) continue;
      // Walk backward to the strip's first face.
      HalfEdgeId l = face_halfedge(f, pair);
      std::vector<bool> seen(static_cast<std::size_t>(nf), false);
      seen[static_cast<std::size_t>(f)] = true;
      while (halfedge(l).twin != kInvalid) {
        const HalfEdgeId t = halfedge(l).twin;
        const FaceId g = halfedge(t).face;
        if (seen[static_cast<std::size_t>(g)]) {
          throw Error(ErrorCode::kClosedStripDetected,
                      "strip through face " + std::to_string(f) +
                          " closes or crosses itself", f);
        }
        seen[static_cast<std::size_t>(g)] = true;
        l = opposite_in_face(t);
      }
      Strip strip;
      std::fill(seen.begin(), seen.end(), false);
      while (true) {
        const FaceId g = halfedge(l).face;
        if (seen[static_cast<std::size_t>(g)]) {
          throw Error(ErrorCode::kClosedStripDetected,
                      "strip through face " + std::to_string(f) +
                          " closes or crosses itself", g);
        }
        seen[static_cast<std::size_t>(g)] = true;
        const HalfEdgeId r = opposite_in_face(l);
        strip.faces.push_back(g);
        strip.rails.push_back({l, r});
        visited[static_cast<std::size_t>(g)][static_cast<std::size_t>(local_index(l) & 1)] = true;
        const HalfEdgeId t = halfedge(r).twin;
        if (t == kInvalid) break;
        l = t;
      }
      result.push_back(std::move(strip));
    }
  }
  return result;
}

std::vector<TreeEntry> QuadGraph::dual_spanning_tree(FaceId seed) const {
  const auto nf = face_count();
  if (seed < 0 || seed >= nf) {
    throw Error(ErrorCode::kInvalidInput, "seed face out of range", seed);
  }
  std::vector<bool> reached(static_cast<std::size_t>(nf), false);
  reached[static_cast<std::size_t>(seed)] = true;
  std::vector<TreeEntry> order;
  std::deque<FaceId> queue{seed};
  while (!queue.empty()) {
    const FaceId f = queue.front();
    queue.pop_front();
    std::vector<std::pair<FaceId, HalfEdgeId>> next;
    for (int k = 0; k < 4; ++k) {
      const HalfEdgeId h = face_halfedge(f, k);
      const HalfEdgeId t = halfedge(h).twin;
      if (t != kInvalid) next.push_back({halfedge(t).face, h});
    }
    std::sort(next.begin(), next.end());
    for (auto [g, h] : next) {
      if (reached[static_cast<std::size_t>(g)]) continue;
      reached[static_cast<std::size_t>(g)] = true;
      order.push_back({g, f, h});
      queue.push_back(g);
    }
  }
  if (static_cast<std::int32_t>(order.size()) + 1 != nf) {
    throw Error(ErrorCode::kDisconnectedMesh, "face adjacency graph is not connected");
  }
  return order;
}

int QuadGraph::component_count() const {
  const auto nf = face_count();
  std::vector<FaceId> parent(static_cast<std::size_t>(nf));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](FaceId x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = nf;
  for (const HalfEdge& he : halfedges_) {
    if (he.twin == kInvalid) continue;
    const FaceId a = find(he.face);
    const FaceId b = find(halfedge(he.twin).face);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components;
}

}  // namespace hypnet
