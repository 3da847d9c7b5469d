// Acceptance run: one line per criterion, exit status 1 if any fails.
//
// usage: sznf_acceptance [path to the sznf executable]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>

#include "sznf/commands.hpp"
#include "sznf/verify.hpp"

using namespace sznf;

namespace {

constexpr Eigen::Index kAcGrid = 1 << 16;
constexpr Eigen::Index kGrid = 1024;

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d %s  %s: %s [%.1fs]\n", id, o.passed ? "PASS" : "FAIL", title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.passed) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<MeasureModel> canonical(Eigen::Index ac_grid) {
  return {canonical_lebesgue(ac_grid), canonical_diag_atom(ac_grid), canonical_mixed(ac_grid)};
}

// First `count` seeds whose c.n.u. part has spectral radius below 1 - 1e-8.
std::vector<GammaForm> stable_ensemble(int count) {
  std::vector<GammaForm> out;
  for (std::uint64_t s = 1; static_cast<int>(out.size()) < count; ++s) {
    const auto [d, k] = ensemble_shape(s, 8);
    GammaForm g = random_gamma_form(s, d, k);
    if (cnu_split(g).t0_spectral_radius < 1.0 - 1e-8) out.push_back(std::move(g));
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  run(1, "cross-formula equivalence, 100 instances x 25 points", [] {
    double worst = 0.0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
      const auto [d, k] = ensemble_shape(s, 8);
      const VerificationReport r =
          check_cross_formula(random_gamma_form(s, d, k), random_disc_points(s, 25, 0.95));
      worst = std::max(worst, r.worst_residual);
    }
    return Outcome{worst <= 1e-8, fmt("worst %.3e (tol 1e-8)", worst)};
  });

  run(2, "scalar closed form (z - g)/(1 - g z)", [] {
    double worst = 0.0;
    for (double gamma : {0.1, 0.5, 0.9}) {
      worst = std::max(
          worst, check_scalar_closed_form(gamma, random_disc_points(2, 100, 0.99)).worst_residual);
    }
    return Outcome{worst <= 1e-12, fmt("worst %.3e (tol 1e-12)", worst)};
  });

  const std::vector<GammaForm> ensemble = stable_ensemble(100);

  run(3, "two-sided inner boundary values, 100 instances x 512 points", [&] {
    double worst = 0.0;
    bool ok = true;
    for (const GammaForm& g : ensemble) {
      const VerificationReport r = check_two_sided_inner(g, 512);
      ok = ok && r.passed;
      worst = std::max(worst, r.worst_residual);
    }
    return Outcome{ok && worst <= 1e-8, fmt("worst %.3e (tol 1e-8)", worst)};
  });

  run(4, "stability <=> innerness, same ensemble", [&] {
    long disagreements = 0;
    long extended_disagreements = 0;
    long timeouts = 0;
    long inconclusive = 0;
    long slowest = 0;
    for (const GammaForm& g : ensemble) {
      const StabilityInnerness si = check_stability_innerness(g, 512);
      inconclusive += si.report.inconclusive ? 1 : 0;
      disagreements += si.disagreements;
      extended_disagreements += si.extended_disagreements;
      timeouts += si.timeouts > 0 ? 1 : 0;
      slowest = std::max({slowest, si.n_forward_extended.value_or(0),
                          si.n_adjoint_extended.value_or(0)});
    }
    std::ostringstream os;
    os << disagreements << " disagreements at n <= 10^4, " << timeouts
       << " instances not decayed by 10^4 (inconclusive there), " << extended_disagreements
       << " disagreements at n <= 10^9, slowest decay n = " << slowest << ", " << inconclusive
       << " unresolved";
    return Outcome{disagreements == 0 && extended_disagreements == 0 && inconclusive == 0,
                   os.str()};
  });

  const std::vector<MeasureModel> models = canonical(kAcGrid);

  run(5, "rank equality on models (a)-(c), M = 2^16, 1024 points", [&] {
    double worst = 0.0;
    std::ostringstream os;
    for (const MeasureModel& m : models) {
      const VerificationReport r = check_theorem_main(m, kGrid);
      worst = std::max(worst, r.worst_residual);
      os << m.name << " " << r.note << "; ";
    }
    os << "worst disagreement fraction " << worst << " (tol 0.01)";
    return Outcome{worst <= 0.01, os.str()};
  });

  run(6, "Delta identities on models (a)-(c) and quadrature refinement", [&] {
    double worst = 0.0;
    bool ok = true;
    for (const MeasureModel& m : models) {
      const VerificationReport r = check_delta_identities(m, kGrid);
      ok = ok && r.passed && r.sample_count > 0;
      worst = std::max(worst, r.worst_residual);
    }
    std::ostringstream os;
    os << "worst " << worst << " (tol 1e-6); radial residual M -> 2M:";
    for (const auto& build : std::vector<std::function<MeasureModel(Eigen::Index)>>{
             canonical_lebesgue, canonical_diag_atom, canonical_mixed}) {
      const ConvergenceReport c = check_delta_convergence(build, kAcGrid, kGrid);
      ok = ok && c.passed;
      os << " " << c.coarse << " -> " << c.fine << (c.passed ? "" : " (no decrease)") << ";";
    }
    return Outcome{ok, os.str()};
  });

  run(7, "(I - theta)^{-1} = (C2 + I)/2, interior and boundary", [&] {
    double interior = 0.0;
    double boundary = 0.0;
    for (const MeasureModel& m : models) {
      const double r = std::min(0.9, m.mu.r_max());
      interior = std::max(
          interior, check_inverse_identity(m, random_disc_points(7, 25, r)).worst_residual);
      boundary = std::max(boundary, check_inverse_identity_boundary(m, kGrid).worst_residual);
    }
    return Outcome{interior <= 1e-8 && boundary <= 1e-6,
                   fmt("interior %.3e (tol 1e-8), boundary %.3e (tol 1e-6)", interior, boundary)};
  });

  run(8, "F1 identity, Woodbury, polar, reconstruction: 100 instances each", [] {
    double f1 = 0.0, wood = 0.0, polar = 0.0, recon = 0.0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
      const auto [d, k] = ensemble_shape(s, 8);
      f1 = std::max(f1, check_f1_identity(random_gamma_form(s, d, k),
                                          random_disc_points(s, 25, 0.95))
                            .worst_residual);
      wood = std::max(wood, woodbury_residual(s));
      polar = std::max(polar, polar_residual(s));
      recon = std::max(recon, reconstruction_residual(s));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "f1 %.2e, woodbury %.2e, polar %.2e, reconstruction %.2e (tol 1e-10)",
                  f1, wood, polar, recon);
    return Outcome{std::max({f1, wood, polar, recon}) <= 1e-10, buf};
  });

  run(9, "|<Ty, Tx>| for ||Tx|| = ||x||, y orthogonal to x: 1000 triples", [] {
    double worst = 0.0;
    for (std::uint64_t s = 1; s <= 1000; ++s) {
      worst = std::max(worst, isometric_orthogonality_residual(s));
    }
    return Outcome{worst <= 1e-10, fmt("worst %.3e (tol 1e-10)", worst)};
  });

  run(10, "sweep determinism", [&] {
    if (cli.empty()) return Outcome{false, "path to the sznf executable not given"};
    const auto dir = std::filesystem::temp_directory_path();
    const auto a = dir / "sznf_acceptance_sweep_a.csv";
    const auto b = dir / "sznf_acceptance_sweep_b.csv";
    const std::string args = " sweep --dims 2,4,8 --ranks 1,2 --seeds 10 --out ";
    const int ra = std::system((cli + args + a.string()).c_str());
    const int rb = std::system((cli + args + b.string()).c_str());
    const std::string ca = slurp(a);
    const std::string cb = slurp(b);
    const bool same = !ca.empty() && ca == cb;
    std::ostringstream os;
    os << ca.size() << " bytes, exit codes " << ra << "/" << rb
       << (same ? ", identical" : ", DIFFERENT");
    return Outcome{same && ra == 0 && rb == 0, os.str()};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
