#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypnet {

enum class ErrorCode {
  // projective_core
  kCoincidentPoints,
  kNotDecomposable,
  kSkewLines,
  kCoincidentLines,
  kZeroSpan,
  kNotSkew,
  // quad_graph
  kInvalidInput,
  kNotAQuad,
  kNonManifold,
  kNotStronglyRegular,
  kNonOrientable,
  kClosedStripDetected,
  kDisconnectedMesh,
  kNotSimplyConnected,
  // anet
  kNonPlanarStar,
  kDegenerateFace,
  kNonGenericPair,
  // hyperboloid
  kDegenerateParameter,
  kProjectionDegenerate,
  kOddVertexDegree,
  kClosureViolation,
  // patch
  kDegenerateConic,
  kNoAdaptedPatch,
  kNumericallyInfinitePoint,
  // io / pipeline
  kParseError,
  kNonQuadFace,
  kIOError,
  kNotEquiTwisted,
  kDidNotConverge,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `index` carries the offending
/// vertex/face/edge/line id when one applies (-1 otherwise), `value` a
/// residual or determinant when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long index = -1,
        double value = 0.0);

  ErrorCode code() const noexcept { return code_; }
  long index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  long index_;
  double value_;
};

}  // namespace hypnet
