#pragma once

// Command implementations behind the `sznf` executable.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sznf/model_io.hpp"
#include "sznf/verify.hpp"

namespace sznf {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

nlohmann::json report_to_json(const VerificationReport& r);

/// Full analysis of one model: summary, c.n.u. split, boundary profile and
/// every applicable check. `passed` is false when a conclusive check fails.
/// Raises on invalid input.
nlohmann::json analyze_model(const ModelSpec& spec);

struct AnalyzeArgs {
  std::filesystem::path spec;
  std::filesystem::path out;
  std::optional<Eigen::Index> grid;
  std::optional<double> radius;
};

int cmd_analyze(const AnalyzeArgs& args, std::ostream& log);

struct SuiteLine {
  std::string name;
  long instances = 0;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  long inconclusive = 0;
  std::string note;
};

/// Suites: all, formulas, theorem, corollaries, lemmas. With seeds = 0 only
/// the canonical closed-form models run. Raises InvalidModel for an unknown
/// suite name.
std::vector<SuiteLine> run_suite(const std::string& suite, long seeds);

std::string format_suite_line(const SuiteLine& line);

int cmd_verify(const std::string& suite, long seeds, std::ostream& out);

/// One CSV row per (dim, rank <= dim, seed 1..seeds), in input order.
std::string sweep_csv(const std::vector<long>& dims, const std::vector<long>& ranks, long seeds);

int cmd_sweep(const std::vector<long>& dims, const std::vector<long>& ranks, long seeds,
              const std::filesystem::path& out, std::ostream& log);

}  // namespace sznf
