#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "sznf/commands.hpp"
#include "sznf/model_io.hpp"

using namespace sznf;
using nlohmann::json;
using testing::max_abs;

namespace {

const std::filesystem::path kData = SZNF_TEST_DATA;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidModel;
}

}  // namespace

TEST_CASE("matrix JSON") {
  const ComplexMatrix m = matrix_from_json(json::parse("[[1, [0, 2]], [[3, -1], 4.5]]"), "m");
  CHECK(m(0, 1) == Complex(0.0, 2.0));
  CHECK(m(1, 0) == Complex(3.0, -1.0));
  CHECK(m(1, 1) == Complex(4.5, 0.0));
  CHECK(matrix_from_json(matrix_to_json(m), "m") == m);
  CHECK(code_of([] { matrix_from_json(json::parse("[[1, 2], [3]]"), "m"); }) == ErrorCode::BadShape);
  CHECK(code_of([] { matrix_from_json(json::parse("[[\"x\"]]"), "m"); }) == ErrorCode::InvalidModel);
}

TEST_CASE("spec parsing") {
  const ModelSpec a = load_model_spec(kData / "scalar_atom.json");
  CHECK(a.is_matrix());
  CHECK(a.options.grid == 256);
  CHECK_FALSE(a.options.radius.has_value());

  const ModelSpec f = load_model_spec(kData / "rotation_files.json");
  const auto& in = std::get<MatrixInput>(f.input);
  CHECK(in.U.rows() == 3);
  CHECK(in.U(1, 2) == Complex(0.0, 1.0));

  const ModelSpec d = load_model_spec(kData / "diag_atom.json");
  const auto& mi = std::get<MeasureInput>(d.input);
  REQUIRE(mi.ac.has_value());
  CHECK(mi.ac->grid == 4096);
  const OperatorMeasure mu = build_measure(mi);
  CHECK(max_abs(mu.total_mass() - identity(2)) < 1e-12);
  CHECK(mu.atoms()[0].angle == doctest::Approx(2.0 * 3.141592653589793 * 0.3));
  CHECK(d.options.seed == 3);
}

TEST_CASE("spec errors") {
  CHECK(code_of([] { load_model_spec(kData / "malformed.json"); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { load_model_spec(kData / "missing.json"); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { parse_model_spec(json::parse("{}")); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] {
          parse_model_spec(json::parse(R"({"matrix": {"U": [[1]], "K": [[0]]},
                                           "measure": {"gamma": [[0]]}})"));
        }) == ErrorCode::InvalidModel);
  CHECK(code_of([] {
          parse_model_spec(json::parse(R"({"measure": {"gamma": [[0.5]],
              "atoms": [{"angle_turns": 1.5, "weight": [[1]]}]}})"));
        }) == ErrorCode::InvalidModel);
  CHECK(code_of([] {
          parse_model_spec(json::parse(R"({"matrix": {"U": [[1]], "K": [[0]]},
                                           "options": {"radius": 2}})"));
        }) == ErrorCode::InvalidModel);
}

TEST_CASE("round trip through the embedded model") {
  for (const char* name : {"scalar_atom.json", "diag_atom.json", "rotation_files.json"}) {
    const ModelSpec spec = load_model_spec(kData / name);
    const json once = to_json(spec);
    const ModelSpec again = parse_model_spec(once);
    CHECK(to_json(again) == once);
  }
}

TEST_CASE("analyze: scalar atom model") {
  const json r = analyze_model(load_model_spec(kData / "scalar_atom.json"));
  CHECK(r["passed"].get<bool>());
  for (const json& rank : r["profile"]["rank_delta"]) CHECK(rank.get<int>() == 0);
  CHECK(r["gamma_form"]["defect_rank"].get<int>() == 1);
  CHECK(r["cnu_split"]["dim_h0"].get<int>() == 1);
  // The embedded model re-parses to the same spec.
  CHECK(to_json(parse_model_spec(r["model"])) == r["model"]);
}

TEST_CASE("analyze: scalar Lebesgue model") {
  const json r = analyze_model(load_model_spec(kData / "scalar_lebesgue.json"));
  CHECK(r["passed"].get<bool>());
  for (const json& rank : r["profile"]["rank_delta"]) CHECK(rank.get<int>() == 1);
  for (const json& n : r["profile"]["n_u"]) CHECK(n.get<int>() == 1);
}

TEST_CASE("analyze: model with an isometric direction and unitary part") {
  // U is a 3-cycle, K damps one coordinate: the c.n.u. part is everything
  // reachable from the defect direction.
  const json r = analyze_model(load_model_spec(kData / "rotation_files.json"));
  CHECK(r["passed"].get<bool>());
  CHECK(r["gamma_form"]["defect_rank"].get<int>() == 1);
  CHECK(std::abs(r["gamma_form"]["gamma_eigenvalues"][0].get<double>() - 0.4) < 1e-12);
}

TEST_CASE("cmd_analyze exit codes") {
  std::ostringstream log;
  const auto out = std::filesystem::temp_directory_path() / "sznf_unit_report.json";
  CHECK(cmd_analyze({kData / "scalar_atom.json", out, {}, {}}, log) == kExitPass);
  CHECK(cmd_analyze({kData / "malformed.json", out, {}, {}}, log) == kExitInputError);
  CHECK(log.str().find("parse") != std::string::npos);
  CHECK(cmd_analyze({kData / "not_contraction.json", out, {}, {}}, log) == kExitInputError);
  CHECK(cmd_analyze({kData / "scalar_atom.json", out, 64, 2.0}, log) == kExitInputError);
}

TEST_CASE("sweep") {
  const std::string a = sweep_csv({2, 4, 8}, {1}, 10);
  const std::string b = sweep_csv({2, 4, 8}, {1}, 10);
  CHECK(a == b);
  std::istringstream rows(a);
  std::string line;
  int count = -1;  // header
  while (std::getline(rows, line)) {
    ++count;
    if (count > 0) CHECK(line.ends_with(",1,1,1"));
  }
  CHECK(count == 30);
  CHECK(sweep_csv({2}, {3}, 4).find('\n') == sweep_csv({2}, {3}, 4).size() - 1);  // header only
  CHECK_THROWS_AS(sweep_csv({17}, {1}, 1), Error);
}

TEST_CASE("verify suites") {
  std::ostringstream out;
  CHECK(cmd_verify("lemmas", 5, out) == kExitPass);
  CHECK(out.str().find("woodbury") != std::string::npos);
  CHECK(cmd_verify("nonsense", 1, out) == kExitInputError);
  const std::vector<SuiteLine> lines = run_suite("corollaries", 0);
  REQUIRE_FALSE(lines.empty());
  CHECK(lines[0].instances == 1);  // the canonical scalar model only
}
