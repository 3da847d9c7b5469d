#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "sznf/charfn.hpp"
#include "sznf/verify.hpp"

using namespace sznf;
using testing::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

Complex blaschke(Complex z, double gamma) { return (z - gamma) / (1.0 - gamma * z); }

// Oracle: the defect-operator formula multiplied out with dense inverses and
// eigen-based square roots, without the library's defect helpers.
ComplexMatrix brute_theta(const GammaForm& g, Complex z) {
  const Eigen::Index d = g.dim();
  const ComplexMatrix t = assemble_T(g);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> a(identity(d) - t.adjoint() * t);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> b(identity(d) - t * t.adjoint());
  const auto sqrt_of = [](const Eigen::SelfAdjointEigenSolver<ComplexMatrix>& es) {
    return ComplexMatrix(es.eigenvectors() *
                         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal() *
                         es.eigenvectors().adjoint());
  };
  const ComplexMatrix inv = (identity(d) - z * t.adjoint()).partialPivLu().inverse();
  // theta_T(z) = -T + z D_T* (I - z T*)^{-1} D_T on the full space, compressed
  // to the coordinates V = B* U1 on D_T and V_* = B* on D_T*.
  const ComplexMatrix full = -t + z * sqrt_of(b) * inv * sqrt_of(a);
  return g.B.adjoint() * full * g.U1.adjoint() * g.B;
}

}  // namespace

TEST_CASE("theta(0) = -Gamma for every method") {
  const GammaForm g = random_gamma_form(17, 5, 3);
  for (const ThetaEvaluator& ev :
       {ThetaEvaluator::defect(g), ThetaEvaluator::f1(g, Side::Left),
        ThetaEvaluator::f1(g, Side::Right), ThetaEvaluator::herglotz(g)}) {
    CHECK(max_abs(ev(0.0) + g.Gamma) < 1e-12);
  }
}

TEST_CASE("scalar closed form") {
  const GammaForm g = canonical_scalar_atom(0.5);
  CHECK(std::abs(theta_defect(g, 0.5)(0, 0)) < 1e-15);
  CHECK(std::abs(theta_f1(g, 0.25, Side::Left)(0, 0) + 2.0 / 7.0) < 1e-15);
  const MeasureModel atom = canonical_scalar_atom_measure(0.5);
  CHECK(std::abs(theta_f1(atom.gamma, atom.mu, 0.25, Side::Left)(0, 0) + 2.0 / 7.0) < 1e-15);
  const ThetaEvaluator h = ThetaEvaluator::herglotz(atom.gamma, atom.mu);
  for (Complex z : {Complex(0.0), Complex(0.3, -0.4), Complex(-0.8, 0.1)}) {
    CHECK(std::abs(h(z)(0, 0) - blaschke(z, 0.5)) < 1e-14);
  }
}

TEST_CASE("defect formula against a dense oracle") {
  const GammaForm g = random_gamma_form(17, 6, 3);
  const Complex z(0.3, 0.2);
  CHECK(max_abs(theta_defect(g, z) - brute_theta(g, z)) < 1e-10);
  CHECK(max_abs(theta_defect(g, z) - theta_f1(g, z, Side::Left)) < 1e-9);
}

TEST_CASE("F1 = 0 gives theta = -Gamma") {
  const MeasureModel leb = canonical_lebesgue(1024);
  const ThetaEvaluator ev = ThetaEvaluator::f1(leb.gamma, leb.mu, Side::Left);
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.6, 0.3)}) CHECK(std::abs(ev(z)(0, 0) + 0.5) < 1e-14);
  const ThetaEvaluator h = ThetaEvaluator::herglotz(leb.gamma, leb.mu);
  CHECK(std::abs(h(Complex(0.4, 0.4))(0, 0) + 0.5) < 1e-14);
  CHECK(std::abs(h.boundary(1.0)(0, 0) + 0.5) < 1e-14);
}

TEST_CASE("Gamma = 0 reduces the F1 route to F1 (I + F1)^{-1}") {
  const GammaForm base = random_gamma_form(19, 4, 2);
  const GammaForm g = make_gamma_form(base.U1, base.B, ComplexMatrix::Zero(2, 2));
  const Complex z(-0.2, 0.5);
  const ComplexMatrix f1 = resolvent_f1(g, z);
  const ComplexMatrix expected = f1 * (identity(2) + f1).inverse();
  CHECK(max_abs(theta_f1(g, z, Side::Left) - expected) < 1e-12);
  CHECK(max_abs(ThetaEvaluator::herglotz(g)(z) - expected) < 1e-10);
}

TEST_CASE("left and right brackets agree") {
  const GammaForm g = random_gamma_form(21, 6, 4);
  for (Complex z : random_disc_points(21, 10, 0.95)) {
    CHECK(max_abs(theta_f1(g, z, Side::Left) - theta_f1(g, z, Side::Right)) < 1e-10);
  }
}

TEST_CASE("resolvent expansion of (I - z T*)^{-1}") {
  // T* = U1* (I + B (Gamma - I) B*), so I - z T* = (I - z U1*) - z U1* B (Gamma - I) B*,
  // whose inverse is the Woodbury update of (I - z U1*)^{-1}.
  const GammaForm g = random_gamma_form(23, 5, 2);
  const ComplexMatrix t = assemble_T(g);
  for (Complex z : random_disc_points(23, 10, 0.95)) {
    const ComplexMatrix r0 = (identity(5) - z * g.U1.adjoint()).inverse();
    const ComplexMatrix p = r0 * z * g.U1.adjoint() * g.B * (g.Gamma - identity(2));
    const ComplexMatrix expanded = woodbury_inverse(p, g.B) * r0;
    CHECK(max_abs(expanded - (identity(5) - z * t.adjoint()).inverse()) < 1e-9);
  }
}

TEST_CASE("contractivity") {
  const GammaForm g = random_gamma_form(25, 7, 3);
  const ThetaEvaluator ev = ThetaEvaluator::defect(g);
  for (Complex z : random_disc_points(25, 50, 1.0)) CHECK(op_norm(ev(z)) <= 1.0 + 1e-9);
  for (double a : {0.0, 1.0, 2.5, 5.0}) CHECK(op_norm(ev.boundary(a)) <= 1.0 + 1e-9);
}

TEST_CASE("Herglotz boundary value on an atom is the radial limit") {
  const MeasureModel m = canonical_diag_atom(1024);
  const ThetaEvaluator h = ThetaEvaluator::herglotz(m.gamma, m.mu);
  const double at = 2.0 * kPi * 0.3;
  const ComplexMatrix on_atom = h.boundary(at);
  CHECK(std::abs(on_atom(1, 1) - 1.0) < 1e-12);
  // Boundary values just beside the atom converge to it.
  for (double off : {1e-6, -1e-6}) CHECK(max_abs(on_atom - h.boundary(at + off)) < 1e-5);
  // Purely atomic oracle: the radial limit of the Herglotz form itself.
  const MeasureModel pure = canonical_scalar_atom_measure(0.5);
  const ThetaEvaluator hp = ThetaEvaluator::herglotz(pure.gamma, pure.mu);
  CHECK(std::abs(hp.boundary(0.0)(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(hp(1.0 - 1e-9)(0, 0) - 1.0) < 1e-8);
}

TEST_CASE("boundary profiles") {
  SUBCASE("k = 0 gives empty samples") {
    const GammaForm g = make_gamma_form(identity(2), ComplexMatrix(2, 0), ComplexMatrix(0, 0));
    const BoundaryProfile p = boundary_profile(ThetaEvaluator::defect(g), 8, 1.0);
    CHECK(p.samples.size() == 8);
    CHECK(p.samples[3].theta.size() == 0);
    CHECK(p.samples[3].rank_delta == 0);
  }
  SUBCASE("scalar atom model: unimodular, rank 0") {
    const BoundaryProfile p = boundary_profile(ThetaEvaluator::defect(canonical_scalar_atom()), 64, 1.0);
    for (const BoundarySample& s : p.samples) {
      CHECK(std::abs(std::abs(s.theta(0, 0)) - 1.0) < 1e-14);
      CHECK(s.rank_delta == 0);
      CHECK(s.rank_delta_star == 0);
    }
  }
  SUBCASE("scalar Lebesgue at r = 0.999") {
    const MeasureModel m = canonical_lebesgue(1 << 16);
    const BoundaryProfile p =
        boundary_profile(ThetaEvaluator::herglotz(m.gamma, m.mu), 32, 0.999, &m.mu);
    for (const BoundarySample& s : p.samples) {
      CHECK(std::abs(s.theta(0, 0) + 0.5) < 1e-12);
      CHECK(std::abs(s.delta(0, 0) * s.delta(0, 0) - 0.75) < 1e-12);
      CHECK(s.rank_delta == 1);
      CHECK(s.rank_delta_star == 1);
      CHECK(s.n_u == 1);
    }
  }
}

TEST_CASE("evaluators refuse boundary evaluation near spectral radius 1") {
  // B almost orthogonal to the eigenvector of i: T has an eigenvalue within
  // O(eps^2) of the circle.
  const double eps = 1e-6;
  ComplexMatrix u1 = identity(2);
  u1(1, 1) = Complex(0.0, 1.0);
  ComplexMatrix b(2, 1);
  b << std::cos(eps), std::sin(eps);
  const GammaForm g = make_gamma_form(u1, b, ComplexMatrix::Constant(1, 1, 0.5));
  const ThetaEvaluator ev = ThetaEvaluator::defect(g);
  CHECK(ev.cnu_spectral_radius() >= 1.0 - 1e-8);
  try {
    ev.boundary(0.5);
    FAIL("expected SpectralRadiusTooClose");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpectralRadiusTooClose);
  }
  CHECK(ev.auto_radius() == 1.0 - 1e-6);
  CHECK(check_two_sided_inner(g, 16).inconclusive);
}
