#pragma once

namespace hypnet {

// Numerical thresholds shared across modules. All are relative unless noted.
struct Tolerances {
  // Eigenvalue counts as zero when |lambda| < sig * max|lambda|.
  double sig = 1e-9;
  // Linear independence threshold for unit-normalized generators.
  double rank = 1e-9;
  // Projective equality of unit 6-vectors: |1 - |<a,b>_euclid|| < proj_equal.
  double proj_equal = 1e-10;
  // Plucker product of unit vectors below this counts as polar / incident.
  double incidence = 1e-8;
  // Star planarity: max distance to best-fit plane <= planar * star diameter.
  double planar = 1e-8;
  // Agreement of propagated hyperboloids around cycles (unit vectors).
  double closure = 1e-8;
  // Construction-level checks (isotropy, polarity of a single step).
  double construction = 1e-10;
  // Guard against sampled points at infinity (|w| of a unit 4-vector).
  double w_guard = 1e-9;
};

}  // namespace hypnet
