#pragma once

#include <array>
#include <vector>

#include "hypnet/anet.hpp"
#include "hypnet/projective.hpp"
#include "hypnet/tolerances.hpp"

namespace hypnet {

// q(lambda) = g1 + lambda * g2 in the face's diagonal basis. 0 and infinity
// give the isotropic diagonals (the two-plane degenerations).
struct FamilyParameter {
  double lambda = 1.0;
};

// A hyperboloid through the four edge lines of a face, stored as a labeled
// polar pair on H: q[0] belongs to family (1), q[1] to family (2).
struct FaceHyperboloid {
  FaceFrame frame;
  std::array<Vec6, 2> q;  // unit norm
  Subspace P1;            // span(h^(1), h^(1)_2, q1)
  Subspace P2;            // span(h^(2), h^(2)_1, q2)

  FaceId face() const { return frame.face; }
  const Subspace& plane(int family) const { return family == 1 ? P1 : P2; }
};

// Builds P1, P2 from a labeled pair and checks the construction: q's polar to
// each other and to the four lines, with opposite-sign squares.
FaceHyperboloid hyperboloid_from_points(const FaceFrame& frame, const Vec6& q1, const Vec6& q2,
                                        const Tolerances& tol = {});

// q1 = normalize(g1 + lambda g2), q2 = normalize(g1 - lambda g2).
// Throws kDegenerateParameter for lambda = 0 or non-finite lambda.
FaceHyperboloid hyperboloid_from_parameter(const FaceFrame& frame, FamilyParameter t,
                                           const Tolerances& tol = {});

// The point of H polar to q1 (q1 need not be normalized).
Vec6 polar_partner(const FaceFrame& frame, const Vec6& q1);

// lambda with q proportional to g1 + lambda g2 (least squares on H).
// Throws kDegenerateParameter when q is (numerically) the diagonal g2.
double family_parameter_for(const FaceFrame& frame, const Vec6& q);

// Sign of lambda for which the family-(1) regulus orientation matches the
// twist of the family-(1) edge pair, i.e. for which a finite patch exists.
int adapted_lambda_sign(const ANet& a, const FaceFrame& frame);

// Projection from the pencil <q, center> onto polar(target):
//   tau(q) = q - (<q, target> / <center, target>) center.
// Throws kProjectionDegenerate when |<center, target>| of unit vectors is below tol.
Vec6 project_tau(const Vec6& q, const PluckerLine& center, const PluckerLine& target,
                 double tol = 1e-8);

// Family (1 or 2) of a half-edge of the frame's face.
int family_of(const FaceFrame& frame, HalfEdgeId he);

// Carries hb across the half-edge `across` (a half-edge of hb's face with an
// adjacent face) into neighbor_frame. The label of the pair containing the
// shared edge moves to the neighbor pair containing it; the other label to
// the other pair.
FaceHyperboloid propagate_face(const ANet& a, const FaceHyperboloid& hb, HalfEdgeId across,
                               const FaceFrame& neighbor_frame, const Tolerances& tol = {});
// Same, with the neighbor frame chosen so that the shared edge keeps its family.
FaceHyperboloid propagate_face(const ANet& a, const FaceHyperboloid& hb, HalfEdgeId across,
                               const Tolerances& tol = {});

// Frame of the face across `across` in which the shared edge keeps the family
// it has in `frame`.
FaceFrame neighbor_frame(const ANet& a, const FaceFrame& frame, HalfEdgeId across);

// Unit-vector distance up to sign.
double projective_residual(const Vec6& u, const Vec6& v);

struct CycleResult {
  std::vector<FaceId> faces;   // rotation order, starting face first
  FaceHyperboloid returned;    // in the starting face's original frame
  double pair_residual = 0.0;  // labels compared as given
  double set_residual = 0.0;   // best of direct and swapped comparison
  bool labels_swapped = false;
};

// Propagates hb once around the interior vertex v, starting and ending in
// hb's face (which must contain v).
CycleResult propagate_cycle(const ANet& a, VertexId v, const FaceHyperboloid& hb,
                            const Tolerances& tol = {});

struct ClosureEntry {
  EdgeId edge = kInvalid;
  double residual = 0.0;
};

struct PropagationResult {
  FaceId seed = kInvalid;
  double lambda = 0.0;
  std::vector<FaceHyperboloid> faces;  // indexed by face id
  std::vector<TreeEntry> tree;
  std::vector<ClosureEntry> closure;  // non-tree interior edges
  double max_closure = 0.0;
};

// Throws kOddVertexDegree, kNotSimplyConnected, kClosureViolation (edge id,
// residual) and anything raised by the construction steps.
PropagationResult propagate_all(const ANet& a, FaceId seed_face, FamilyParameter t,
                                const Tolerances& tol = {});
// Same with an explicit seed hyperboloid (its frame defines the seed roles).
PropagationResult propagate_all(const ANet& a, const FaceHyperboloid& seed,
                                const Tolerances& tol = {});

// Rank of span(P_A^(i), shared) + span(P_B^(i), shared); 4 means tangency.
int tangency_rank(const FaceHyperboloid& A, const FaceHyperboloid& B, const PluckerLine& shared,
                  int family, double rel_tol = 1e-9);

}  // namespace hypnet
