#include "hypnet/anet_fit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "hypnet/anet.hpp"
#include "hypnet/error.hpp"

namespace hypnet {
namespace {

using Field = std::vector<Vec3>;

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
  return s;
}

void axpy(double alpha, const Field& x, Field& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace

FitProblem::FitProblem(const QuadGraph& g, std::vector<Vec3> initial, std::span<const VertexId> pinned)
    : initial_(std::move(initial)) {
  if (static_cast<std::int32_t>(initial_.size()) != g.vertex_count()) {
    throw Error(ErrorCode::kInvalidInput, "position count does not match vertex count");
  }
  pinned_.assign(initial_.size(), false);
  for (VertexId v : pinned) {
    if (v < 0 || v >= g.vertex_count()) throw Error(ErrorCode::kInvalidInput, "pinned vertex out of range", v);
    pinned_[static_cast<std::size_t>(v)] = true;
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::vector<VertexId> star{v};
    for (VertexId u : g.vertex_star(v)) star.push_back(u);
    const std::size_t k = star.size();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        for (std::size_t l = j + 1; l < k; ++l)
          for (std::size_t m = l + 1; m < k; ++m) tetrahedra_.push_back({{star[i], star[j], star[l], star[m]}});
    stars_.push_back(std::move(star));
  }
}

double tetra_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double energy(const FitProblem& p, std::span<const Vec3> x) {
  double s = 0.0;
  for (const Tetrahedron& t : p.tetrahedra()) {
    const double vol = tetra_volume(x[static_cast<std::size_t>(t.v[0])], x[static_cast<std::size_t>(t.v[1])],
                                    x[static_cast<std::size_t>(t.v[2])], x[static_cast<std::size_t>(t.v[3])]);
    s += t.weight * vol * vol;
  }
  return s;
}

std::vector<Vec3> gradient(const FitProblem& p, std::span<const Vec3> x) {
  std::vector<Vec3> g(x.size(), Vec3::Zero());
  for (const Tetrahedron& t : p.tetrahedra()) {
    const Vec3& a = x[static_cast<std::size_t>(t.v[0])];
    const Vec3 ab = x[static_cast<std::size_t>(t.v[1])] - a;
    const Vec3 ac = x[static_cast<std::size_t>(t.v[2])] - a;
    const Vec3 ad = x[static_cast<std::size_t>(t.v[3])] - a;
    const double vol = ab.dot(ac.cross(ad)) / 6.0;
    const double f = 2.0 * t.weight * vol / 6.0;
    const Vec3 gb = f * ac.cross(ad);
    const Vec3 gc = f * ad.cross(ab);
    const Vec3 gd = f * ab.cross(ac);
    g[static_cast<std::size_t>(t.v[1])] += gb;
    g[static_cast<std::size_t>(t.v[2])] += gc;
    g[static_cast<std::size_t>(t.v[3])] += gd;
    g[static_cast<std::size_t>(t.v[0])] -= gb + gc + gd;
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (p.is_pinned(static_cast<VertexId>(v))) g[v].setZero();
  }
  return g;
}

StarResidual max_star_residual(const FitProblem& p, std::span<const Vec3> x) {
  StarResidual r;
  std::vector<Vec3> pts;
  for (std::size_t v = 0; v < p.stars().size(); ++v) {
    pts.clear();
    for (VertexId u : p.stars()[v]) pts.push_back(x[static_cast<std::size_t>(u)]);
    const PlaneFit fit = fit_plane(pts);
    const double rel = fit.diameter > 0 ? fit.residual / fit.diameter : 0.0;
    if (fit.residual > r.absolute) {
      r.absolute = fit.residual;
      r.worst = static_cast<VertexId>(v);
    }
    r.relative = std::max(r.relative, rel);
  }
  return r;
}

FitResult fit(const FitProblem& p, const FitOptions& options) {
  FitResult res;
  Field x = p.initial();
  double f = energy(p, x);
  Field g = gradient(p, x);
  double gnorm = std::sqrt(dot(g, g));
  res.initial_energy = f;
  res.energy_history.push_back(f);

  auto finish = [&](bool converged) {
    res.positions = x;
    res.energy = f;
    res.grad_norm = gnorm;
    res.residual = max_star_residual(p, x);
    res.converged = converged;
    return res;
  };
  auto planar_enough = [&] { return max_star_residual(p, x).relative <= options.residual_rel; };

  if (f == 0.0 || gnorm == 0.0 || planar_enough()) return finish(true);
  const double tol_g = options.tol_g_rel * gnorm;

  std::deque<std::pair<Field, Field>> memory;  // (s, y)
  std::deque<double> rho;
  for (int it = 0; it < options.max_iter; ++it) {
    // Two-loop recursion.
    Field d = g;
    std::vector<double> alpha(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
      alpha[i] = rho[i] * dot(memory[i].first, d);
      axpy(-alpha[i], memory[i].second, d);
    }
    double gamma = 1.0;
    if (!memory.empty()) gamma = dot(memory.back().first, memory.back().second) / dot(memory.back().second, memory.back().second);
    for (Vec3& v : d) v *= gamma;
    for (std::size_t i = 0; i < memory.size(); ++i) {
      const double beta = rho[i] * dot(memory[i].second, d);
      axpy(alpha[i] - beta, memory[i].first, d);
    }
    for (Vec3& v : d) v = -v;
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      memory.clear();
      rho.clear();
      d = g;
      for (Vec3& v : d) v = -v;
      slope = -gnorm * gnorm;
    }

    double step = memory.empty() && it == 0 ? std::min(1.0, 1.0 / gnorm) : 1.0;
    Field xn;
    double fn = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      xn = x;
      axpy(step, d, xn);
      fn = energy(p, xn);
      if (fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.iterations = it;
      return finish(planar_enough());
    }
    Field gn = gradient(p, xn);
    Field s(x.size()), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    x = std::move(xn);
    g = std::move(gn);
    f = fn;
    gnorm = std::sqrt(dot(g, g));
    res.energy_history.push_back(f);
    if (sy > 1e-300) {
      memory.emplace_back(std::move(s), std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(memory.size()) > options.memory) {
        memory.pop_front();
        rho.pop_front();
      }
    }
    res.iterations = it + 1;
    if (f == 0.0 || gnorm <= tol_g || planar_enough()) return finish(true);
  }
  return finish(false);
}

}  // namespace hypnet
