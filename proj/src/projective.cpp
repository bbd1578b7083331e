#include "hypnet/projective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hypnet/error.hpp"

namespace hypnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCoincidentPoints: return "CoincidentPoints";
    case ErrorCode::kNotDecomposable: return "NotDecomposable";
    case ErrorCode::kSkewLines: return "SkewLines";
    case ErrorCode::kCoincidentLines: return "CoincidentLines";
    case ErrorCode::kZeroSpan: return "ZeroSpan";
    case ErrorCode::kNotSkew: return "NotSkew";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kNotAQuad: return "NotAQuad";
    case ErrorCode::kNonManifold: return "NonManifold";
    case ErrorCode::kNotStronglyRegular: return "NotStronglyRegular";
    case ErrorCode::kNonOrientable: return "NonOrientable";
    case ErrorCode::kClosedStripDetected: return "ClosedStripDetected";
    case ErrorCode::kDisconnectedMesh: return "DisconnectedMesh";
    case ErrorCode::kNotSimplyConnected: return "NotSimplyConnected";
    case ErrorCode::kNonPlanarStar: return "NonPlanarStar";
    case ErrorCode::kDegenerateFace: return "DegenerateFace";
    case ErrorCode::kNonGenericPair: return "NonGenericPair";
    case ErrorCode::kDegenerateParameter: return "DegenerateParameter";
    case ErrorCode::kProjectionDegenerate: return "ProjectionDegenerate";
    case ErrorCode::kOddVertexDegree: return "OddVertexDegree";
    case ErrorCode::kClosureViolation: return "ClosureViolation";
    case ErrorCode::kDegenerateConic: return "DegenerateConic";
    case ErrorCode::kNoAdaptedPatch: return "NoAdaptedPatch";
    case ErrorCode::kNumericallyInfinitePoint: return "NumericallyInfinitePoint";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonQuadFace: return "NonQuadFace";
    case ErrorCode::kIOError: return "IOError";
    case ErrorCode::kNotEquiTwisted: return "NotEquiTwisted";
    case ErrorCode::kDidNotConverge: return "DidNotConverge";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, long index, double value)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index),
      value_(value) {}

bool HomPoint::is_finite(double w_guard) const {
  const double n = coords.norm();
  return n > 0.0 && std::abs(coords.w()) > w_guard * n;
}

bool projectively_equal(const HomPoint& a, const HomPoint& b, double tol) {
  const double na = a.coords.norm();
  const double nb = b.coords.norm();
  if (na == 0.0 || nb == 0.0) return false;
  return std::abs(1.0 - std::abs(a.coords.dot(b.coords)) / (na * nb)) < tol;
}

double plucker_product(const Vec6& a, const Vec6& b) {
  return a[0] * b[3] + a[1] * b[4] + a[2] * b[5] + a[3] * b[0] + a[4] * b[1] + a[5] * b[2];
}

const Eigen::Matrix<double, 6, 6>& plucker_form() {
  static const Eigen::Matrix<double, 6, 6> j = [] {
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    m.topRightCorner<3, 3>().setIdentity();
    m.bottomLeftCorner<3, 3>().setIdentity();
    return m;
  }();
  return j;
}

Vec6 wedge(const Vec4& x, const Vec4& y) {
  auto minor = [&](int i, int j) { return x[i] * y[j] - x[j] * y[i]; };
  Vec6 p;
  p << minor(0, 1), minor(0, 2), minor(0, 3), minor(2, 3), minor(3, 1), minor(1, 2);
  return p;
}

PluckerLine PluckerLine::from_coords(const Vec6& coords, double tol) {
  const double n2 = coords.squaredNorm();
  if (n2 == 0.0) throw Error(ErrorCode::kNotDecomposable, "zero line coordinates");
  if (std::abs(plucker_product(coords, coords)) > tol * n2) {
    throw Error(ErrorCode::kNotDecomposable, "coordinates are off the Plucker quadric", -1,
                plucker_product(coords, coords) / n2);
  }
  return PluckerLine{coords / std::sqrt(n2)};
}

Vec3 PluckerLine::direction() const {
  // p_i3 = x_i - y_i for finite points with w = 1.
  return Vec3(-coords[2], coords[4], -coords[3]);
}

Vec3 PluckerLine::moment() const { return Vec3(coords[5], -coords[1], coords[0]); }

PluckerLine line_from_points(const HomPoint& x, const HomPoint& y) {
  const Vec4 xn = x.coords.normalized();
  const Vec4 yn = y.coords.normalized();
  const Vec6 p = wedge(xn, yn);
  const double n = p.norm();
  // |x ^ y| = sin of the angle between unit representatives.
  if (!(n > 1e-12)) {
    throw Error(ErrorCode::kCoincidentPoints, "points do not span a line", -1, n);
  }
  return PluckerLine{p / n};
}

PluckerLine line_from_points(const Vec3& x, const Vec3& y) {
  return line_from_points(HomPoint::affine(x), HomPoint::affine(y));
}

Mat4 primal_matrix(const Vec6& h) {
  Mat4 l;
  // clang-format off
  l <<      0,  h[0],  h[1],  h[2],
        -h[0],     0,  h[5], -h[4],
        -h[1], -h[5],     0,  h[3],
        -h[2],  h[4], -h[3],     0;
  // clang-format on
  return l;
}

Mat4 dual_matrix(const Vec6& h) {
  Mat4 l;
  // clang-format off
  l <<      0,  h[3],  h[4],  h[5],
        -h[3],     0,  h[2], -h[1],
        -h[4], -h[2],     0,  h[0],
        -h[5],  h[1], -h[0],     0;
  // clang-format on
  return l;
}

std::pair<HomPoint, HomPoint> decompose_line(const PluckerLine& h, double tol) {
  const Vec6& c = h.coords;
  const double n2 = c.squaredNorm();
  if (n2 == 0.0 || std::abs(plucker_product(c, c)) > tol * n2) {
    throw Error(ErrorCode::kNotDecomposable, "coordinates are off the Plucker quadric", -1,
                n2 == 0.0 ? 0.0 : plucker_product(c, c) / n2);
  }
  // (i, j, p_ij) in index order; the first maximum wins.
  const std::array<std::tuple<int, int, double>, 6> minors = {{
      {0, 1, c[0]}, {0, 2, c[1]}, {0, 3, c[2]}, {1, 2, c[5]}, {1, 3, -c[4]}, {2, 3, c[3]},
  }};
  std::size_t best = 0;
  for (std::size_t k = 1; k < minors.size(); ++k) {
    if (std::abs(std::get<2>(minors[k])) > std::abs(std::get<2>(minors[best]))) best = k;
  }
  auto [i, j, pij] = minors[best];
  const Mat4 l = primal_matrix(c);
  // col_i ^ col_j = p_ij * h.
  Vec4 a = l.col(i);
  Vec4 b = l.col(j);
  if (pij < 0) std::swap(a, b);
  return {HomPoint{a.normalized()}, HomPoint{b.normalized()}};
}

bool line_contains(const PluckerLine& h, const HomPoint& x, double tol) {
  return (dual_matrix(h.coords) * x.coords.normalized()).norm() <= tol;
}

HomPoint intersect_lines(const PluckerLine& a, const PluckerLine& b, double tol) {
  const Vec6 an = a.coords.normalized();
  const Vec6 bn = b.coords.normalized();
  if (std::abs(1.0 - std::abs(an.dot(bn))) < 1e-10) {
    throw Error(ErrorCode::kCoincidentLines, "lines are identical");
  }
  const double prod = plucker_product(an, bn);
  if (std::abs(prod) > tol) {
    throw Error(ErrorCode::kSkewLines, "lines do not intersect", -1, prod);
  }
  Eigen::Matrix<double, 8, 4> m;
  m.topRows<4>() = dual_matrix(an);
  m.bottomRows<4>() = dual_matrix(bn);
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 4>> svd(m, Eigen::ComputeFullV);
  const Vec4 x = svd.matrixV().col(3);
  const double residual = svd.singularValues()[3];
  if (residual > std::max(tol, 1e-8) * svd.singularValues()[0]) {
    throw Error(ErrorCode::kSkewLines, "no common point", -1, residual);
  }
  return HomPoint{x};
}

Signature inertia(const Eigen::MatrixXd& symmetric, double eps_sig) {
  Signature s;
  if (symmetric.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (scale == 0.0 || std::abs(ev[i]) < eps_sig * scale) {
      ++s.zero;
    } else if (ev[i] > 0) {
      ++s.plus;
    } else {
      ++s.minus;
    }
  }
  return s;
}

Subspace::Subspace(Eigen::Matrix<double, 6, Eigen::Dynamic> basis, double eps_sig)
    : basis_(std::move(basis)) {
  const Eigen::Index k = basis_.cols();
  orthonormal_.resize(6, k);
  // Modified Gram-Schmidt, two passes.
  for (Eigen::Index i = 0; i < k; ++i) {
    Vec6 v = basis_.col(i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) v -= orthonormal_.col(j).dot(v) * orthonormal_.col(j);
    }
    orthonormal_.col(i) = v.normalized();
  }
  const auto& j = plucker_form();
  gram_ = basis_.transpose() * j * basis_;
  signature_ = inertia(orthonormal_.transpose() * j * orthonormal_, eps_sig);
}

Subspace Subspace::span(std::span<const Vec6> generators, const Tolerances& tol) {
  double max_norm = 0.0;
  for (const Vec6& g : generators) max_norm = std::max(max_norm, g.norm());
  if (max_norm == 0.0) throw Error(ErrorCode::kZeroSpan, "all generators are zero");

  std::vector<Vec6> kept;
  std::vector<Vec6> ortho;
  for (const Vec6& g : generators) {
    const double n = g.norm();
    if (n <= 1e-14 * max_norm) continue;
    const Vec6 u = g / n;
    Vec6 r = u;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec6& q : ortho) r -= q.dot(r) * q;
    }
    if (r.norm() > tol.rank) {
      kept.push_back(u);
      ortho.push_back(r.normalized());
    }
    if (kept.size() == 6) break;
  }
  if (kept.empty()) throw Error(ErrorCode::kZeroSpan, "all generators are numerically zero");
  Eigen::Matrix<double, 6, Eigen::Dynamic> b(6, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = kept[i];
  return Subspace(std::move(b), tol.sig);
}

Subspace Subspace::span(std::initializer_list<Vec6> generators, const Tolerances& tol) {
  return span(std::span<const Vec6>(generators.begin(), generators.size()), tol);
}

double Subspace::distance(const Vec6& v) const {
  const double n = v.norm();
  if (n == 0.0) return 0.0;
  const Vec6 u = v / n;
  return (u - orthonormal_ * (orthonormal_.transpose() * u)).norm();
}

Subspace polar(const Subspace& s, const Tolerances& tol) {
  const Eigen::MatrixXd constraints = s.basis().transpose() * plucker_form();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
  const Eigen::Index r = s.rank();
  if (r == 6) return Subspace();
  std::vector<Vec6> gens;
  for (Eigen::Index i = r; i < 6; ++i) gens.emplace_back(svd.matrixV().col(i));
  return Subspace::span(gens, tol);
}

int joint_rank(std::span<const Subspace> parts, double rel_tol) {
  Eigen::Index cols = 0;
  for (const Subspace& s : parts) cols += s.rank();
  if (cols == 0) return 0;
  Eigen::MatrixXd m(6, cols);
  Eigen::Index c = 0;
  for (const Subspace& s : parts) {
    for (Eigen::Index i = 0; i < s.rank(); ++i) m.col(c++) = s.basis().col(i).normalized();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * sv[0]) ++rank;
  }
  return rank;
}

int regulus_orientation(const PluckerLine& h0, const PluckerLine& h1, const PluckerLine& h2,
                        double tol) {
  const Vec6 a = h0.coords.normalized();
  const Vec6 b = h1.coords.normalized();
  const Vec6 c = h2.coords.normalized();
  const double p01 = plucker_product(a, b);
  const double p02 = plucker_product(a, c);
  const double p12 = plucker_product(b, c);
  if (std::abs(p01) < tol || std::abs(p02) < tol || std::abs(p12) < tol) {
    throw Error(ErrorCode::kNotSkew, "regulus needs three mutually skew lines", -1,
                std::min({std::abs(p01), std::abs(p02), std::abs(p12)}));
  }
  return 2.0 * p01 * p02 * p12 > 0 ? 1 : -1;
}

ContactElement contact_element(const PluckerLine& a, const PluckerLine& b, double tol) {
  const HomPoint x = intersect_lines(a, b, tol);
  const auto [b0, b1] = decompose_line(b, 1e-6);
  const Mat4 da = dual_matrix(a.coords.normalized());
  Vec4 p0 = da * b0.coords;
  Vec4 p1 = da * b1.coords;
  const Vec4 plane = (p0.norm() >= p1.norm() ? p0 : p1).normalized();
  return ContactElement{HomPoint{x.coords.normalized()}, plane,
                        Subspace::span({a.coords, b.coords})};
}

PluckerLine line_in_span_through(const Eigen::Matrix<double, 6, Eigen::Dynamic>& basis,
                                 const HomPoint& x) {
  const Vec4 xn = x.coords.normalized();
  Eigen::MatrixXd m(4, basis.cols());
  for (Eigen::Index k = 0; k < basis.cols(); ++k) m.col(k) = dual_matrix(basis.col(k)) * xn;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd c = svd.matrixV().col(basis.cols() - 1);
  const Vec6 l = basis * c;
  return PluckerLine{l.normalized()};
}

}  // namespace hypnet
