#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "sznf/measure.hpp"
#include "sznf/perturbation.hpp"
#include "sznf/verify.hpp"

using namespace sznf;
using testing::gaussian;
using testing::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

OperatorMeasure unit_atom(double angle = 0.0) {
  return OperatorMeasure(1, {{angle, ComplexMatrix::Identity(1, 1)}});
}

OperatorMeasure scalar_density(Eigen::Index m, const std::function<double(double)>& f) {
  std::vector<ComplexMatrix> s;
  for (Eigen::Index j = 0; j < m; ++j) {
    s.push_back(ComplexMatrix::Constant(1, 1, f(2.0 * kPi * static_cast<double>(j) / m)));
  }
  return OperatorMeasure(1, {}, s);
}

// Oracle: brute-force trapezoid rule for the C2 transform of a scalar density.
Complex quad_c2(const std::function<double(double)>& f, Complex z, int nodes) {
  Complex sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double t = 2.0 * kPi * j / nodes;
    const Complex q = z * std::polar(1.0, -t);
    sum += (1.0 + q) / (1.0 - q) * f(t);
  }
  return sum / static_cast<double>(nodes);
}

}  // namespace

TEST_CASE("measure_from_unitary") {
  SUBCASE("U1 = I gives one atom at 0 of weight I") {
    std::mt19937_64 rng(1);
    Eigen::HouseholderQR<ComplexMatrix> qr(gaussian(rng, 3, 3));
    const ComplexMatrix b = (qr.householderQ() * identity(3)).leftCols(2);
    const OperatorMeasure m = measure_from_unitary(identity(3), b);
    REQUIRE(m.atoms().size() == 1);
    CHECK(m.atoms()[0].angle == 0.0);
    CHECK(max_abs(m.atoms()[0].weight - identity(2)) < 1e-12);
  }
  SUBCASE("diag(1, -1)") {
    ComplexMatrix u = identity(2);
    u(1, 1) = -1.0;
    const OperatorMeasure m = measure_from_unitary(u, identity(2));
    REQUIRE(m.atoms().size() == 2);
    CHECK(m.atoms()[0].angle == doctest::Approx(0.0));
    CHECK(m.atoms()[1].angle == doctest::Approx(kPi));
    CHECK(std::abs(m.atoms()[0].weight(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(m.atoms()[1].weight(1, 1) - 1.0) < 1e-14);
  }
  SUBCASE("seeded 6x6 unitary, rank-2 B: weights resolve the identity") {
    const GammaForm g = random_gamma_form(5, 6, 2);
    const OperatorMeasure m = measure_from_unitary(g.U1, g.B);
    ComplexMatrix total = ComplexMatrix::Zero(2, 2);
    for (const Atom& a : m.atoms()) total += a.weight;
    CHECK(max_abs(total - identity(2)) < 1e-10);
    CHECK(m.atoms().size() == 6);
  }
}

TEST_CASE("OperatorMeasure validation") {
  CHECK_THROWS_AS(OperatorMeasure(1, {}, std::vector<ComplexMatrix>(3, identity(1))), Error);
  try {
    OperatorMeasure(1, {{0.0, ComplexMatrix::Constant(1, 1, -1.0)}});
    FAIL("expected NotPsd");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPsd);
  }
  const OperatorMeasure wrapped(1, {{-0.5 * kPi, identity(1)}});
  CHECK(wrapped.atoms()[0].angle == doctest::Approx(1.5 * kPi));
}

TEST_CASE("Cauchy transforms: closed forms") {
  const OperatorMeasure atom = unit_atom();
  CHECK(std::abs(cauchy_transform(atom, 0.5, CauchyKind::C1)(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(cauchy_transform(atom, 0.5, CauchyKind::C)(0, 0) - 2.0) < 1e-15);
  CHECK(std::abs(cauchy_transform(atom, 0.5, CauchyKind::C2)(0, 0) - 3.0) < 1e-15);
  CHECK(max_abs(cauchy_transform(atom, 0.0, CauchyKind::C1)) == 0.0);
  try {
    cauchy_transform(atom, 1.0, CauchyKind::C);
    FAIL("expected PoleHit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleHit);
  }

  const OperatorMeasure leb = scalar_density(1024, [](double) { return 1.0; });
  for (Complex z : {Complex(0.3, 0.2), Complex(-0.7, 0.1), Complex(0.0, 0.9)}) {
    CHECK(std::abs(cauchy_transform(leb, z, CauchyKind::C1)(0, 0)) < 1e-14);
    CHECK(std::abs(poisson_extension(leb, z)(0, 0) - 1.0) < 1e-14);
  }
  try {
    cauchy_transform(leb, 0.95, CauchyKind::C);
    FAIL("expected RadiusTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RadiusTooLarge);
  }
}

TEST_CASE("Poisson extension") {
  const OperatorMeasure atom = unit_atom();
  for (double r : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(poisson_extension(atom, r)(0, 0) - (1.0 + r) / (1.0 - r)) < 1e-12);
  }
  std::mt19937_64 rng(2);
  const ComplexMatrix g = gaussian(rng, 2, 2);
  const OperatorMeasure m(2, {{1.0, g * g.adjoint()}, {2.0, identity(2)}});
  CHECK(max_abs(poisson_extension(m, 0.0) - m.total_mass()) < 1e-14);
}

TEST_CASE("a.c. Cauchy transform against trapezoid quadrature") {
  const auto f = [](double t) { return std::exp(std::cos(t)) * (1.0 + 0.5 * std::sin(2.0 * t)); };
  const OperatorMeasure m = scalar_density(4096, f);
  for (Complex z : {Complex(0.2, 0.1), Complex(-0.5, 0.6), Complex(0.9, 0.3)}) {
    const Complex oracle = quad_c2(f, z, 1 << 15);
    CHECK(std::abs(cauchy_transform(m, z, CauchyKind::C2)(0, 0) - oracle) < 1e-10);
  }
  // Boundary trace: real part reproduces the density, also between nodes.
  for (double t : {0.0, 0.3, 1.7, 4.0}) {
    const Complex c2 = boundary_cauchy_transform(m, t, CauchyKind::C2)(0, 0);
    CHECK(std::abs(c2.real() - f(t)) < 1e-10);
    CHECK(std::abs(m.density_at(t)(0, 0).real() - f(t)) < 1e-10);
  }
  // and approaches the radial limit.
  const Complex near = cauchy_transform(m, std::polar(0.98, 1.0), CauchyKind::C2)(0, 0);
  const Complex edge = boundary_cauchy_transform(m, 1.0, CauchyKind::C2)(0, 0);
  CHECK(std::abs(near - edge) < 0.1);
}

TEST_CASE("boundary transform of an atom") {
  const OperatorMeasure atom = unit_atom();
  const double t = 1.0;
  const Complex cot(0.0, std::cos(t / 2) / std::sin(t / 2));
  CHECK(std::abs(boundary_cauchy_transform(atom, t, CauchyKind::C2)(0, 0) - cot) < 1e-14);
  // Radial limit oracle.
  const Complex radial = cauchy_transform(atom, std::polar(1.0 - 1e-9, t), CauchyKind::C)(0, 0);
  CHECK(std::abs(boundary_cauchy_transform(atom, t, CauchyKind::C)(0, 0) - radial) < 1e-7);
  CHECK_THROWS_AS(boundary_cauchy_transform(atom, 0.0, CauchyKind::C), Error);
  CHECK(max_abs(atom_weight_at(atom, 2.0 * kPi) - identity(1)) == 0.0);
}

TEST_CASE("trace normalization") {
  const OperatorMeasure m(2, {{0.0, identity(2)}},
                          std::vector<ComplexMatrix>{ComplexMatrix::Zero(2, 2), identity(2) * 3.0});
  const TraceNormalization tn = trace_normalize(m);
  CHECK(std::abs(tn.scalar.atoms()[0].weight(0, 0) - 2.0) < 1e-15);
  CHECK(max_abs(tn.atom_W[0] - identity(2) * 0.5) < 1e-15);
  CHECK(max_abs(tn.sample_W[0]) == 0.0);
  CHECK(std::abs(tn.sample_W[1].trace() - 1.0) < 1e-15);
}

TEST_CASE("beta pushforward") {
  const OperatorMeasure atom = unit_atom();
  const OperatorMeasure same = pushforward_beta(atom, ComplexMatrix::Zero(1, 1));
  CHECK(std::abs(same.atoms()[0].weight(0, 0) - 1.0) < 1e-15);
  const OperatorMeasure tilde = pushforward_beta(atom, ComplexMatrix::Constant(1, 1, 0.5));
  CHECK(std::abs(tilde.atoms()[0].weight(0, 0) - 1.0 / 3.0) < 1e-15);

  std::mt19937_64 rng(3);
  const ComplexMatrix w = Eigen::HouseholderQR<ComplexMatrix>(gaussian(rng, 3, 3)).householderQ() *
                          identity(3);
  RealVector lambda(3);
  lambda << 0.1, 0.5, 0.9;
  const ComplexMatrix gamma = w * lambda.cast<Complex>().asDiagonal() * w.adjoint();
  const ComplexMatrix beta = beta_matrix(gamma);
  CHECK(max_abs(beta - beta.adjoint()) < 1e-12);
  CHECK(max_abs(beta * (identity(3) + gamma) * beta - (identity(3) - gamma)) < 1e-10);
  CHECK_THROWS_AS(beta_matrix(identity(1)), Error);
}
