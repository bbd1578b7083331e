// hypnet: check, fit and extend quad meshes as A-nets / hyperbolic nets.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypnet/error.hpp"
#include "hypnet/pipeline.hpp"

namespace {

int finish(const hypnet::RunConfig& cfg, const hypnet::RunOutcome& out) {
  if (cfg.report.empty()) std::cout << hypnet::dump_report(out.report);
  for (const auto& v : out.report["violations"]) {
    std::cerr << "hypnet: " << v["message"].get<std::string>() << "\n";
  }
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extend discrete A-nets to piecewise hyperboloid surfaces"};
  app.require_subcommand(1);

  hypnet::RunConfig cfg;

  auto* check = app.add_subcommand("check", "Report planarity, genericity, degrees and twists");
  check->add_option("input", cfg.input, "Quad mesh (v/f text format)")->required();
  check->add_option("--report", cfg.report, "Write the JSON report here instead of stdout");

  auto* fit = app.add_subcommand("fit", "Planarize vertex stars");
  fit->add_option("input", cfg.input, "Quad mesh")->required();
  fit->add_option("-o,--output", cfg.output, "Fitted mesh")->required();
  fit->add_option("--pin", cfg.pins, "0-based vertex ids held fixed");
  fit->add_option("--max-iter", cfg.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
  fit->add_option("--report", cfg.report, "Write the JSON report here instead of stdout");

  std::vector<int> samples{5, 5};
  auto* extend = app.add_subcommand("extend", "Build and sample the hyperbolic net");
  extend->add_option("input", cfg.input, "A-net quad mesh")->required();
  extend->add_option("-o,--output", cfg.output, "Sampled patch mesh")->required();
  extend->add_option("--seed-face", cfg.seed_face, "0-based seed face id");
  extend->add_option("--lambda", cfg.lambda, "Seed hyperboloid parameter (nonzero)");
  extend->add_option("--samples", samples, "Samples per patch in t and s")->expected(2)->check(CLI::Range(2, 1 << 16));
  extend->add_option("--c1-samples", cfg.c1_samples, "Samples per edge for the C1 check")->check(CLI::Range(2, 1 << 16));
  extend->add_flag("--no-weld", [&](std::int64_t) { cfg.weld = false; }, "Keep patches unconnected");
  extend->add_option("--report", cfg.report, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cfg.tol = hypnet::tolerances_from_env(cfg.tol);
  } catch (const hypnet::Error& e) {
    std::cerr << "hypnet: " << e.what() << "\n";
    return 1;
  }

  if (*check) {
    cfg.command = hypnet::Command::kCheck;
  } else if (*fit) {
    cfg.command = hypnet::Command::kFit;
  } else {
    cfg.command = hypnet::Command::kExtend;
    cfg.samples_n = samples[0];
    cfg.samples_m = samples[1];
  }
  return finish(cfg, hypnet::run(cfg));
}
