#include "sznf/model_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sznf {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidModel, msg); }

Complex scalar_from_json(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  invalid(std::string(what) + ": entries must be numbers or [re, im] pairs");
}

json scalar_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

const json& require_field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    invalid(std::string(where) + " needs field '" + key + "'");
  }
  return j.at(key);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(path.string() + ": " + e.what());
  }
}

ComplexMatrix matrix_ref(const json& j, const std::filesystem::path& base, const char* what) {
  if (j.is_string()) {
    const std::filesystem::path p = base / j.get<std::string>();
    return matrix_from_json(read_json_file(p), what);
  }
  return matrix_from_json(j, what);
}

double number_field(const json& j, const char* what) {
  if (!j.is_number()) invalid(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(std::string(what) + " must be finite");
  return v;
}

Eigen::Index count_field(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) {
    invalid(std::string(what) + " must be a positive integer");
  }
  return static_cast<Eigen::Index>(j.get<long long>());
}

ModelOptions parse_options(const json& j) {
  ModelOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) invalid("options must be an object");
  if (j.contains("grid")) o.grid = count_field(j["grid"], "options.grid");
  if (j.contains("radius")) {
    const json& r = j["radius"];
    if (r.is_string()) {
      if (r.get<std::string>() != "auto") invalid("options.radius must be \"auto\" or a number");
    } else {
      o.radius = number_field(r, "options.radius");
      if (!(*o.radius > 0.0 && *o.radius <= 1.0)) invalid("options.radius must lie in (0, 1]");
    }
  }
  if (j.contains("rank_rel")) o.rank.relative = number_field(j["rank_rel"], "options.rank_rel");
  if (j.contains("rank_floor")) {
    o.rank.absolute_floor = number_field(j["rank_floor"], "options.rank_floor");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) invalid("options.seed must be a non-negative integer");
    o.seed = j["seed"].get<std::uint64_t>();
  }
  o.rank.validate();
  return o;
}

MeasureInput parse_measure(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) invalid("measure must be an object");
  MeasureInput m;
  m.gamma = matrix_ref(require_field(j, "gamma", "measure"), base, "measure.gamma");
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) invalid("measure.atoms must be an array");
    for (const json& a : j["atoms"]) {
      AtomInput atom;
      atom.angle_turns = number_field(require_field(a, "angle_turns", "atom"), "angle_turns");
      if (atom.angle_turns < 0.0 || atom.angle_turns >= 1.0) {
        invalid("angle_turns must lie in [0, 1)");
      }
      atom.weight = matrix_ref(require_field(a, "weight", "atom"), base, "atom weight");
      m.atoms.push_back(std::move(atom));
    }
  }
  if (j.contains("ac")) {
    const json& a = j["ac"];
    if (!a.is_object()) invalid("measure.ac must be an object");
    AcInput ac;
    if (a.contains("samples") == a.contains("constant")) {
      invalid("measure.ac needs exactly one of 'samples' and 'constant'");
    }
    if (a.contains("constant")) {
      ac.constant = matrix_ref(a["constant"], base, "ac.constant");
      ac.grid = a.contains("grid") ? count_field(a["grid"], "ac.grid") : kDefaultConstantGrid;
    } else {
      if (!a["samples"].is_array()) invalid("ac.samples must be an array");
      for (const json& s : a["samples"]) ac.samples.push_back(matrix_ref(s, base, "ac sample"));
      ac.grid = static_cast<Eigen::Index>(ac.samples.size());
      if (a.contains("grid") && count_field(a["grid"], "ac.grid") != ac.grid) {
        invalid("ac.grid does not match the number of samples");
      }
    }
    m.ac = std::move(ac);
  }
  return m;
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) invalid(std::string(what) + " must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return ComplexMatrix(0, 0);
  if (!j[0].is_array()) invalid(std::string(what) + " must be a nested array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::BadShape, std::string(what) + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = scalar_from_json(row[static_cast<std::size_t>(c)], what);
    }
  }
  require_finite(m, what);
  return m;
}

ModelSpec parse_model_spec(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) invalid("model spec must be a JSON object");
  const bool has_matrix = j.contains("matrix");
  const bool has_measure = j.contains("measure");
  if (has_matrix == has_measure) invalid("model spec needs exactly one of 'matrix' and 'measure'");
  ModelSpec spec;
  if (has_matrix) {
    const json& m = j["matrix"];
    MatrixInput in;
    in.U = matrix_ref(require_field(m, "U", "matrix"), base_dir, "U");
    in.K = matrix_ref(require_field(m, "K", "matrix"), base_dir, "K");
    spec.input = std::move(in);
  } else {
    spec.input = parse_measure(j["measure"], base_dir);
  }
  spec.options = parse_options(j.contains("options") ? j["options"] : json());
  return spec;
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
  return parse_model_spec(read_json_file(path), path.parent_path());
}

json to_json(const ModelSpec& spec) {
  json out;
  if (const auto* m = std::get_if<MatrixInput>(&spec.input)) {
    out["matrix"] = {{"U", matrix_to_json(m->U)}, {"K", matrix_to_json(m->K)}};
  } else {
    const auto& in = std::get<MeasureInput>(spec.input);
    json measure;
    measure["gamma"] = matrix_to_json(in.gamma);
    measure["atoms"] = json::array();
    for (const AtomInput& a : in.atoms) {
      measure["atoms"].push_back(
          {{"angle_turns", a.angle_turns}, {"weight", matrix_to_json(a.weight)}});
    }
    if (in.ac) {
      json ac;
      ac["grid"] = in.ac->grid;
      if (in.ac->constant) {
        ac["constant"] = matrix_to_json(*in.ac->constant);
      } else {
        ac["samples"] = json::array();
        for (const ComplexMatrix& s : in.ac->samples) ac["samples"].push_back(matrix_to_json(s));
      }
      measure["ac"] = std::move(ac);
    }
    out["measure"] = std::move(measure);
  }
  json options;
  options["grid"] = spec.options.grid;
  if (spec.options.radius) {
    options["radius"] = *spec.options.radius;
  } else {
    options["radius"] = "auto";
  }
  options["rank_rel"] = spec.options.rank.relative;
  options["rank_floor"] = spec.options.rank.absolute_floor;
  options["seed"] = spec.options.seed;
  out["options"] = std::move(options);
  return out;
}

OperatorMeasure build_measure(const MeasureInput& input) {
  const Eigen::Index k = input.gamma.rows();
  std::vector<Atom> atoms;
  for (const AtomInput& a : input.atoms) {
    atoms.push_back({2.0 * std::numbers::pi * a.angle_turns, a.weight});
  }
  std::vector<ComplexMatrix> samples;
  if (input.ac) {
    if (input.ac->constant) {
      samples.assign(static_cast<std::size_t>(input.ac->grid), *input.ac->constant);
    } else {
      samples = input.ac->samples;
    }
  }
  return OperatorMeasure(k, std::move(atoms), std::move(samples));
}

}  // namespace sznf
