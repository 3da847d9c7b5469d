#pragma once

// JSON model specifications.
//
// {
//   "matrix":  {"U": <matrix or file>, "K": <matrix or file>}
//   -- or --
//   "measure": {"gamma": <matrix>,
//               "atoms": [{"angle_turns": 0.25, "weight": <matrix>}, ...],
//               "ac": {"grid": 1024, "samples": [<matrix>, ...]}
//                   | {"grid": 1024, "constant": <matrix>}},
//   "options": {"grid": 1024, "radius": "auto" | 0.999, "rank_rel": 1e-8,
//               "rank_floor": 1e-10, "seed": 0}
// }
//
// Matrices are row-major nested arrays; complex entries are [re, im] pairs and
// plain numbers are read as real. A string in place of a matrix names a JSON
// file holding one, relative to the model file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sznf/linalg.hpp"
#include "sznf/measure.hpp"

namespace sznf {

struct MatrixInput {
  ComplexMatrix U;
  ComplexMatrix K;
};

struct AtomInput {
  double angle_turns = 0.0;
  ComplexMatrix weight;
};

struct AcInput {
  Eigen::Index grid = 0;
  std::vector<ComplexMatrix> samples;  ///< empty when `constant` is set
  std::optional<ComplexMatrix> constant;
};

struct MeasureInput {
  ComplexMatrix gamma;
  std::vector<AtomInput> atoms;
  std::optional<AcInput> ac;
};

struct ModelOptions {
  Eigen::Index grid = 1024;
  std::optional<double> radius;  ///< nullopt means "auto"
  RankTolerance rank;
  std::uint64_t seed = 0;
};

struct ModelSpec {
  std::variant<MatrixInput, MeasureInput> input;
  ModelOptions options;

  bool is_matrix() const { return std::holds_alternative<MatrixInput>(input); }
};

/// Default a.c. grid for a constant density without an explicit grid.
inline constexpr Eigen::Index kDefaultConstantGrid = 1024;

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, const char* what);

/// Raises InvalidModel (or the shape/value error of the offending field).
ModelSpec parse_model_spec(const nlohmann::json& j,
                           const std::filesystem::path& base_dir = {});
ModelSpec load_model_spec(const std::filesystem::path& path);

/// Inline serialization; file references are resolved, so the result is self-contained.
nlohmann::json to_json(const ModelSpec& spec);

/// The measure described by a measure input (angles converted to radians).
OperatorMeasure build_measure(const MeasureInput& input);

}  // namespace sznf
