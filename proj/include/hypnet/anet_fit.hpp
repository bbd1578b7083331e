#pragma once

#include <array>
#include <span>
#include <vector>

#include "hypnet/projective.hpp"
#include "hypnet/quad_graph.hpp"

namespace hypnet {

struct Tetrahedron {
  std::array<VertexId, 4> v;
  double weight = 1.0;
};

// Planarity functional S = sum over vertices v and over all 4-subsets of
// star(v) (v together with its neighbors) of weight * Vol^2.
class FitProblem {
 public:
  FitProblem(const QuadGraph& g, std::vector<Vec3> initial, std::span<const VertexId> pinned = {});

  int vertex_count() const { return static_cast<int>(initial_.size()); }
  const std::vector<Vec3>& initial() const { return initial_; }
  bool is_pinned(VertexId v) const { return pinned_[static_cast<std::size_t>(v)]; }
  std::vector<Tetrahedron>& tetrahedra() { return tetrahedra_; }
  const std::vector<Tetrahedron>& tetrahedra() const { return tetrahedra_; }
  // Stars with the center first.
  const std::vector<std::vector<VertexId>>& stars() const { return stars_; }

 private:
  std::vector<Vec3> initial_;
  std::vector<bool> pinned_;
  std::vector<Tetrahedron> tetrahedra_;
  std::vector<std::vector<VertexId>> stars_;
};

double tetra_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

double energy(const FitProblem& p, std::span<const Vec3> x);
// Analytic gradient; entries of pinned vertices are zero.
std::vector<Vec3> gradient(const FitProblem& p, std::span<const Vec3> x);

// Largest best-fit-plane distance over all stars, absolute and relative to the
// star diameter.
struct StarResidual {
  double absolute = 0.0;
  double relative = 0.0;
  VertexId worst = kInvalid;
};
StarResidual max_star_residual(const FitProblem& p, std::span<const Vec3> x);

struct FitOptions {
  int max_iter = 5000;
  double tol_g_rel = 1e-10;  // relative to the initial gradient norm
  int memory = 10;
  // Early exit once every star is planar to this fraction of its diameter.
  double residual_rel = 1e-12;
};

struct FitResult {
  std::vector<Vec3> positions;
  double energy = 0.0;
  double initial_energy = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  StarResidual residual;
  bool converged = false;
  std::vector<double> energy_history;
};

// L-BFGS with Armijo backtracking. Non-convergence is reported through
// FitResult::converged; the final state is always returned.
FitResult fit(const FitProblem& p, const FitOptions& options = {});

}  // namespace hypnet
