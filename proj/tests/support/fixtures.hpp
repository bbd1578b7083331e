#pragma once

// Mesh generators shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hypnet/anet.hpp"
#include "hypnet/mesh_io.hpp"
#include "hypnet/quad_graph.hpp"

namespace fixtures {

using hypnet::Mesh;
using hypnet::Quad;
using hypnet::Vec3;

// N x N vertices at (i, j, f(i, j)), id = i + N j; face (i, j) is
// (v(i,j), v(i+1,j), v(i+1,j+1), v(i,j+1)).
template <typename F>
Mesh grid(int n, F height) {
  Mesh m;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m.positions.emplace_back(i, j, height(i, j));
  }
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const int v = i + n * j;
      m.faces.push_back({v, v + 1, v + 1 + n, v + n});
    }
  }
  return m;
}

inline Mesh zxy_grid(int n) {
  return grid(n, [](int i, int j) { return static_cast<double>(i) * j; });
}

inline Mesh flat_grid(int n) {
  return grid(n, [](int, int) { return 0.0; });
}

// Rows x cols block of quads (rows+1 by cols+1 vertices), flat.
inline Mesh block(int rows, int cols) {
  Mesh m;
  for (int j = 0; j <= rows; ++j) {
    for (int i = 0; i <= cols; ++i) m.positions.emplace_back(i, j, 0.0);
  }
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const int v = i + (cols + 1) * j;
      m.faces.push_back({v, v + 1, v + 2 + cols, v + 1 + cols});
    }
  }
  return m;
}

// n quads around vertex 0: spokes 1..n, corners n+1..2n,
// face i = (0, spoke i, corner i, spoke i+1).
inline std::vector<Quad> umbrella_faces(int n) {
  std::vector<Quad> faces;
  for (int i = 0; i < n; ++i) faces.push_back({0, 1 + i, 1 + n + i, 1 + (i + 1) % n});
  return faces;
}

// Random umbrella A-net: the center star lies in a plane, each spoke carries a
// random plane through the center and the spoke, and every corner sits on the
// intersection line of the two planes of its face's spokes.
inline Mesh random_umbrella(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Mesh m;
    m.faces = umbrella_faces(n);
    const Vec3 c(u(rng), u(rng), u(rng));
    const Vec3 normal = Vec3(0.3 * u(rng), 0.3 * u(rng), 1.0).normalized();
    const Vec3 e1 = normal.unitOrthogonal();
    const Vec3 e2 = normal.cross(e1);
    m.positions.push_back(c);
    std::vector<Vec3> plane_normals;
    for (int i = 0; i < n; ++i) {
      const double angle = 2.0 * std::numbers::pi * (i + 0.3 * u(rng)) / n;
      const Vec3 d = std::cos(angle) * e1 + std::sin(angle) * e2;
      m.positions.push_back(c + (1.0 + 0.3 * u(rng)) * d);
      const double tilt = 0.6 + 0.4 * u(rng);
      const Vec3 side = normal.cross(d);
      plane_normals.push_back((std::cos(tilt) * normal + std::sin(tilt) * (u(rng) > 0 ? 1 : -1) * side).normalized());
    }
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      Vec3 dir = plane_normals[static_cast<std::size_t>(i)].cross(plane_normals[static_cast<std::size_t>((i + 1) % n)]);
      if (dir.norm() < 0.1) ok = false;
      dir.normalize();
      const Vec3 mid = m.positions[static_cast<std::size_t>(1 + i)] + m.positions[static_cast<std::size_t>(1 + (i + 1) % n)] - 2.0 * c;
      if (dir.dot(mid) < 0) dir = -dir;
      m.positions.push_back(c + (1.0 + 0.5 * std::abs(u(rng))) * dir);
    }
    if (!ok) continue;
    const auto g = hypnet::QuadGraph::build(static_cast<int>(m.positions.size()), m.faces);
    const auto diag = hypnet::diagnose(g, m.positions);
    if (!diag.ok()) continue;
    // Keep the faces clearly non-planar.
    bool skew = true;
    for (const Quad& f : m.faces) {
      const std::array<Vec3, 4> pts{m.positions[static_cast<std::size_t>(f[0])], m.positions[static_cast<std::size_t>(f[1])],
                                    m.positions[static_cast<std::size_t>(f[2])], m.positions[static_cast<std::size_t>(f[3])]};
      const auto fit = hypnet::fit_plane(pts);
      if (fit.residual < 0.02 * fit.diameter) skew = false;
    }
    if (skew) return m;
  }
}

inline hypnet::ANet make_anet(const Mesh& m) {
  auto g = hypnet::QuadGraph::build(static_cast<int>(m.positions.size()), m.faces);
  return hypnet::validate_anet(std::move(g), m.positions);
}

}  // namespace fixtures
