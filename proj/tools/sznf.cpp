// sznf: characteristic functions of finite-rank perturbations of unitaries.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sznf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Characteristic functions of finite-rank perturbations of unitary matrices"};
  app.require_subcommand(1);

  sznf::AnalyzeArgs analyze;
  Eigen::Index grid = 0;
  double radius = 0.0;
  auto* an = app.add_subcommand("analyze", "Analyze one model and write a JSON report");
  an->add_option("--spec", analyze.spec, "Model spec (JSON)")->required();
  an->add_option("--out", analyze.out, "Report path")->required();
  auto* grid_opt = an->add_option("--grid", grid, "Boundary grid size");
  auto* radius_opt = an->add_option("--radius", radius, "Sampling radius in (0, 1]");

  std::string suite = "all";
  long seeds = 100;
  auto* ve = app.add_subcommand("verify", "Run a verification suite");
  ve->add_option("--suite", suite, "all, formulas, theorem, corollaries or lemmas")
      ->check(CLI::IsMember({"all", "formulas", "theorem", "corollaries", "lemmas"}));
  ve->add_option("--seeds", seeds, "Number of seeded random instances")->check(CLI::NonNegativeNumber);

  std::vector<long> dims;
  std::vector<long> ranks{1};
  long sweep_seeds = 10;
  std::string sweep_out;
  auto* sw = app.add_subcommand("sweep", "Seeded sweep over dimensions and defect ranks, as CSV");
  sw->add_option("--dims", dims, "Dimensions, comma separated")->required()->delimiter(',');
  sw->add_option("--ranks", ranks, "Defect ranks, comma separated")->delimiter(',');
  sw->add_option("--seeds", sweep_seeds, "Seeds per (dim, rank)")->check(CLI::NonNegativeNumber);
  sw->add_option("--out", sweep_out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sznf::kExitInputError;
  }

  try {
    if (*an) {
      if (*grid_opt) analyze.grid = grid;
      if (*radius_opt) analyze.radius = radius;
      return sznf::cmd_analyze(analyze, std::cerr);
    }
    if (*ve) return sznf::cmd_verify(suite, seeds, std::cout);
    return sznf::cmd_sweep(dims, ranks, sweep_seeds, sweep_out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sznf::kExitInputError;
  }
}
