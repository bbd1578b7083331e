#include "hypnet/mesh_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <tuple>

#include "hypnet/error.hpp"

namespace hypnet {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end;
}

Error parse_error(long line, const std::string& what) {
  return Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what, line);
}

}  // namespace

Mesh parse_mesh(std::istream& in) {
  Mesh mesh;
  struct RawFace {
    std::array<long, 4> idx;
    long line;
  };
  std::vector<RawFace> raw;
  std::string text;
  long line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    const auto tok = split(text);
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4 || tok.size() > 5) throw parse_error(line_no, "vertex needs 3 or 4 coordinates");
      double c[4] = {0, 0, 0, 1};
      for (std::size_t k = 1; k < tok.size(); ++k) {
        if (!parse_number(tok[k], c[k - 1])) throw parse_error(line_no, "bad number '" + std::string(tok[k]) + "'");
      }
      if (c[3] == 0.0) throw parse_error(line_no, "vertex at infinity");
      mesh.positions.emplace_back(c[0] / c[3], c[1] / c[3], c[2] / c[3]);
    } else if (tok[0] == "f") {
      if (tok.size() != 5) {
        throw Error(ErrorCode::kNonQuadFace,
                    "line " + std::to_string(line_no) + ": face with " + std::to_string(tok.size() - 1) +
                        " vertices",
                    line_no);
      }
      RawFace f{{}, line_no};
      for (std::size_t k = 1; k < 5; ++k) {
        const std::string_view t = tok[k].substr(0, tok[k].find('/'));
        long idx = 0;
        if (!parse_number(t, idx) || idx == 0) throw parse_error(line_no, "bad index '" + std::string(tok[k]) + "'");
        // Negative indices count back from the vertices read so far.
        f.idx[k - 1] = idx > 0 ? idx - 1 : static_cast<long>(mesh.positions.size()) + idx;
      }
      raw.push_back(f);
    }
  }
  for (const RawFace& f : raw) {
    Quad q;
    for (int k = 0; k < 4; ++k) {
      if (f.idx[static_cast<std::size_t>(k)] < 0 ||
          f.idx[static_cast<std::size_t>(k)] >= static_cast<long>(mesh.positions.size())) {
        throw parse_error(f.line, "vertex index out of range");
      }
      q[static_cast<std::size_t>(k)] = static_cast<VertexId>(f.idx[static_cast<std::size_t>(k)]);
    }
    mesh.faces.push_back(q);
  }
  return mesh;
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open '" + path + "'");
  return parse_mesh(in);
}

void format_mesh(std::ostream& out, const Mesh& mesh) {
  char buf[96];
  for (const Vec3& p : mesh.positions) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  for (const Quad& q : mesh.faces) {
    out << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
  }
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIOError, "cannot write '" + path + "'");
  format_mesh(out, mesh);
  out.flush();
  if (!out) throw Error(ErrorCode::kIOError, "write to '" + path + "' failed");
}

Mesh grids_to_mesh(std::span<const PatchGrid> grids, bool weld, const QuadGraph* graph) {
  Mesh mesh;
  // Keys: (0, v, 0, 0) corner; (1, a, b, k) k-th sample from a on edge a<b.
  std::map<std::tuple<int, VertexId, VertexId, int>, VertexId> shared;
  for (const PatchGrid& grid : grids) {
    const auto& c = grid.corner_vertices;
    std::vector<VertexId> ids(grid.points.size());
    for (int j = 0; j < grid.m; ++j) {
      for (int i = 0; i < grid.n; ++i) {
        const Vec3& p = grid.at(i, j);
        std::optional<std::tuple<int, VertexId, VertexId, int>> key;
        if (weld) {
          const bool ti = i == 0 || i == grid.n - 1;
          const bool sj = j == 0 || j == grid.m - 1;
          if (ti && sj) {
            const VertexId v = i == 0 ? (j == 0 ? c[0] : c[3]) : (j == 0 ? c[1] : c[2]);
            key = std::make_tuple(0, v, 0, 0);
          } else if (sj || ti) {
            VertexId from, to;
            int pos, count;
            if (sj) {
              from = j == 0 ? c[0] : c[3];
              to = j == 0 ? c[1] : c[2];
              pos = i;
              count = grid.n;
            } else {
              from = i == 0 ? c[0] : c[1];
              to = i == 0 ? c[3] : c[2];
              pos = j;
              count = grid.m;
            }
            if (from > to) {
              std::swap(from, to);
              pos = count - 1 - pos;
            }
            key = std::make_tuple(1, from, to, pos);
          }
        }
        VertexId id;
        if (key) {
          auto [it, inserted] = shared.emplace(*key, static_cast<VertexId>(mesh.positions.size()));
          if (inserted) mesh.positions.push_back(p);
          id = it->second;
        } else {
          id = static_cast<VertexId>(mesh.positions.size());
          mesh.positions.push_back(p);
        }
        ids[static_cast<std::size_t>(j * grid.n + i)] = id;
      }
    }
    bool reverse = false;
    if (graph != nullptr) {
      const Quad& f = graph->face(grid.face);
      int k0 = 0;
      while (f[static_cast<std::size_t>(k0)] != c[0]) ++k0;
      reverse = f[static_cast<std::size_t>((k0 + 1) & 3)] != c[1];
    }
    for (int j = 0; j + 1 < grid.m; ++j) {
      for (int i = 0; i + 1 < grid.n; ++i) {
        auto id = [&](int a, int b) { return ids[static_cast<std::size_t>(b * grid.n + a)]; };
        Quad q{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
        if (reverse) q = {q[0], q[3], q[2], q[1]};
        mesh.faces.push_back(q);
      }
    }
  }
  return mesh;
}

void write_mesh(const std::string& path, std::span<const PatchGrid> grids, bool weld, const QuadGraph* graph) {
  write_mesh(path, grids_to_mesh(grids, weld, graph));
}

}  // namespace hypnet
