#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hypnet/patch.hpp"
#include "hypnet/projective.hpp"
#include "hypnet/quad_graph.hpp"

namespace hypnet {

struct Mesh {
  std::vector<Vec3> positions;
  std::vector<Quad> faces;  // 0-based
};

// Text mesh: `v x y z [w]` and `f i j k l` records with 1-based (or negative,
// relative) indices; `i/j/k` face tokens use the position index. Other records
// are ignored. Throws kParseError / kNonQuadFace carrying the line number.
Mesh parse_mesh(std::istream& in);
Mesh read_mesh(const std::string& path);

void format_mesh(std::ostream& out, const Mesh& mesh);
// Throws kIOError.
void write_mesh(const std::string& path, const Mesh& mesh);

// One quad mesh from sampled patches. With weld, grid corners become the
// shared mesh vertices and edge samples are shared by the two patches on an
// edge (matched by the edge's end vertices and the position along it).
// When a graph is given, quads follow the orientation of its face cycles.
Mesh grids_to_mesh(std::span<const PatchGrid> grids, bool weld, const QuadGraph* graph = nullptr);
void write_mesh(const std::string& path, std::span<const PatchGrid> grids, bool weld,
                const QuadGraph* graph = nullptr);

}  // namespace hypnet
