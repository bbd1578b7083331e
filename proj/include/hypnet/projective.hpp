#pragma once

// Homogeneous geometry of RP^3 and the (3,3) space of line coordinates.
//
// Conventions used everywhere in this library:
//   * point coordinates are ordered (x, y, z, w); finite points have w = 1;
//   * Plucker coordinates of the line through x and y are the 2x2 minors
//     p_ij = x_i y_j - x_j y_i, stored in the order (p01, p02, p03, p23, p31, p12);
//   * the Plucker product is <a,b> = a01 b23 + a02 b31 + a03 b12
//                                   + a23 b01 + a31 b02 + a12 b03,
//     which equals det[x, y, u, v] for a = x^y and b = u^v.

#include <array>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "hypnet/tolerances.hpp"

namespace hypnet {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat4 = Eigen::Matrix4d;

struct HomPoint {
  Vec4 coords;

  static HomPoint affine(const Vec3& p) { return {Vec4(p.x(), p.y(), p.z(), 1.0)}; }

  bool is_finite(double w_guard = 1e-12) const;
  // Dehomogenize; caller guarantees w != 0.
  Vec3 affine_point() const { return coords.head<3>() / coords.w(); }
};

bool projectively_equal(const HomPoint& a, const HomPoint& b, double tol = 1e-10);

// A line of RP^3; coords is kept at unit Euclidean norm.
struct PluckerLine {
  Vec6 coords;

  // Normalizes; throws kNotDecomposable when |<h,h>| is not small relative to |h|^2.
  static PluckerLine from_coords(const Vec6& coords, double tol = 1e-8);

  // Direction of the line in the affine chart (w = 1); zero for lines at infinity.
  Vec3 direction() const;
  // Moment vector x * y of the affine chart.
  Vec3 moment() const;
};

double plucker_product(const Vec6& a, const Vec6& b);
inline double plucker_product(const PluckerLine& a, const PluckerLine& b) {
  return plucker_product(a.coords, b.coords);
}

// The matrix J with <a,b> = a^T J b.
const Eigen::Matrix<double, 6, 6>& plucker_form();

// Unnormalized minors of x ^ y; exactly the exterior product.
Vec6 wedge(const Vec4& x, const Vec4& y);

PluckerLine line_from_points(const HomPoint& x, const HomPoint& y);
PluckerLine line_from_points(const Vec3& x, const Vec3& y);

// Two points spanning h; their wedge is a positive multiple of h.
std::pair<HomPoint, HomPoint> decompose_line(const PluckerLine& h, double tol = 1e-8);

// Skew matrix L with L_ij = p_ij; its columns are points on the line.
Mat4 primal_matrix(const Vec6& h);
// Dual skew matrix L*; L* x = 0 iff x lies on the line, L* x = plane through
// the line and x otherwise.
Mat4 dual_matrix(const Vec6& h);

bool line_contains(const PluckerLine& h, const HomPoint& x, double tol = 1e-10);

// Residual threshold is relative to unit-normalized inputs.
HomPoint intersect_lines(const PluckerLine& a, const PluckerLine& b, double tol = 1e-8);

struct Signature {
  int plus = 0;
  int minus = 0;
  int zero = 0;

  int size() const { return plus + minus + zero; }
  friend bool operator==(const Signature&, const Signature&) = default;
};

// Inertia of a symmetric matrix with the relative zero threshold.
Signature inertia(const Eigen::MatrixXd& symmetric, double eps_sig = 1e-9);

// Projective subspace of P(R^{3,3}).
class Subspace {
 public:
  // Empty subspace (rank 0).
  Subspace() = default;

  // Keeps a maximal linearly independent subset of the generators (greedy,
  // input order). Throws kZeroSpan if every generator is numerically zero.
  static Subspace span(std::span<const Vec6> generators, const Tolerances& tol = {});
  static Subspace span(std::initializer_list<Vec6> generators, const Tolerances& tol = {});

  // Number of basis vectors; the projective dimension is rank() - 1.
  int rank() const { return static_cast<int>(basis_.cols()); }
  int projective_dim() const { return rank() - 1; }

  const Eigen::Matrix<double, 6, Eigen::Dynamic>& basis() const { return basis_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Signature& signature() const { return signature_; }

  // Euclidean distance of v (normalized) from the linear span.
  double distance(const Vec6& v) const;
  bool contains(const Vec6& v, double tol = 1e-8) const { return distance(v) <= tol; }

 private:
  Subspace(Eigen::Matrix<double, 6, Eigen::Dynamic> basis, double eps_sig);

  Eigen::Matrix<double, 6, Eigen::Dynamic> basis_;
  Eigen::Matrix<double, 6, Eigen::Dynamic> orthonormal_;
  Eigen::MatrixXd gram_;
  Signature signature_;
};

// Orthogonal complement with respect to the Plucker product.
Subspace polar(const Subspace& s, const Tolerances& tol = {});

// Rank of the union of several subspaces' bases.
int joint_rank(std::span<const Subspace> parts, double rel_tol = 1e-9);

// Sign of det(M_P) = 2 <h0,h1><h0,h2><h1,h2>: +1 for a (+--) regulus, -1 for (++-).
// Throws kNotSkew if a pairwise product of the unit vectors is below tol.
int regulus_orientation(const PluckerLine& h0, const PluckerLine& h1, const PluckerLine& h2,
                        double tol = 1e-10);

struct ContactElement {
  HomPoint point;
  Vec4 plane;
  Subspace pencil;
};

// Contact element of the plane through the two (intersecting) lines.
ContactElement contact_element(const PluckerLine& a, const PluckerLine& b, double tol = 1e-8);

// Line of the pencil spanned by basis that passes through the point, i.e. the
// unique line of a regulus plane through a point of the hyperboloid.
PluckerLine line_in_span_through(const Eigen::Matrix<double, 6, Eigen::Dynamic>& basis,
                                 const HomPoint& x);

}  // namespace hypnet
