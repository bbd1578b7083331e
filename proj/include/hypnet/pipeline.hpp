#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hypnet/error.hpp"
#include "hypnet/quad_graph.hpp"
#include "hypnet/tolerances.hpp"

namespace hypnet {

enum class Command { kCheck, kFit, kExtend };

struct RunConfig {
  Command command = Command::kCheck;
  std::string input;
  std::string output;  // mesh output (fit, extend)
  std::string report;  // optional JSON report path
  FaceId seed_face = 0;
  double lambda = 1.0;
  int samples_n = 5;
  int samples_m = 5;
  int c1_samples = 9;
  bool weld = true;
  std::vector<VertexId> pins;
  int max_iter = 5000;
  Tolerances tol;
};

// Exit codes: 0 success, 1 usage / input / IO, 2 invalid mesh or A-net or a
// failed fit, 3 odd interior vertex degree, 4 strips not equi-twisted,
// 5 no adapted patch, 6 closure violation.
int exit_code_for(ErrorCode code);

struct RunOutcome {
  int exit_code = 0;
  nlohmann::json report;
};

// Never throws for data problems; they are recorded as violations in the
// report and mapped to the exit code.
RunOutcome run(const RunConfig& config);

// Applies HYPNET_TOL_PLANAR, HYPNET_TOL_CLOSURE, HYPNET_TOL_SIG and
// HYPNET_TOL_W. Throws kInvalidInput for unparsable or non-positive values.
Tolerances tolerances_from_env(Tolerances base = {});

// Pretty JSON with every float printed as %.17g and non-finite values as null.
std::string dump_report(const nlohmann::json& report);

}  // namespace hypnet
