#include "sznf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

namespace sznf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInnerTol = 1e-8;
constexpr double kTraceGate = 0.1;

double grid_angle(Eigen::Index j, Eigen::Index grid) {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(grid);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Smooth bump exp(1 - 1/(1 - t^2)) on the arc [from, to] (turns), peak 1.
double arc_bump(double turns, double from, double to) {
  const double center = 0.5 * (from + to);
  const double half = 0.5 * (to - from);
  const double t = (turns - center) / half;
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// Congruence by S^{-1/2}, S the total mass, so that the result has mass I.
OperatorMeasure normalize_mass(Eigen::Index k, std::vector<Atom> atoms,
                               std::vector<ComplexMatrix> samples) {
  const OperatorMeasure raw(k, atoms, samples);
  const HermitianEigen eig = hermitian_eigen(raw.total_mass());
  const ComplexMatrix inv_sqrt = eig.vectors *
                                 eig.values.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
                                 eig.vectors.adjoint();
  for (Atom& a : atoms) a.weight = hermitian_part(inv_sqrt * a.weight * inv_sqrt);
  for (ComplexMatrix& s : samples) s = hermitian_part(inv_sqrt * s * inv_sqrt);
  return OperatorMeasure(k, std::move(atoms), std::move(samples));
}

ComplexMatrix outer(const ComplexVector& v) { return v * v.adjoint(); }

double unitarity_residual(const ComplexMatrix& theta) {
  const Eigen::Index k = theta.rows();
  return std::max(op_norm(theta.adjoint() * theta - identity(k)),
                  op_norm(theta * theta.adjoint() - identity(k)));
}

// Radial Delta residual at r = r_max of the model's a.c. grid.
double radial_delta_residual(const MeasureModel& model, Eigen::Index grid) {
  return check_delta_identities(model, grid, model.mu.r_max(), INFINITY).worst_residual;
}

}  // namespace

VerificationReport finish_report(std::string name, double tolerance,
                                 std::vector<ResidualPoint> details) {
  VerificationReport r;
  r.check_name = std::move(name);
  r.tolerance = tolerance;
  r.sample_count = static_cast<Eigen::Index>(details.size());
  for (const ResidualPoint& p : details) r.worst_residual = std::max(r.worst_residual, p.residual);
  r.passed = r.worst_residual <= tolerance;
  r.details = std::move(details);
  return r;
}

ComplexMatrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return g;
}

ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
  if (n == 0) return ComplexMatrix(0, 0);
  const ComplexMatrix g = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * identity(n);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ComplexMatrix random_isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  return random_unitary(rng, rows).leftCols(cols);
}

ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n, double lo, double hi) {
  const ComplexMatrix w = random_unitary(rng, n);
  RealVector lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) lambda(i) = uniform(rng, lo, hi);
  return hermitian_part(w * lambda.cast<Complex>().asDiagonal() * w.adjoint());
}

namespace {

void require_instance_shape(Eigen::Index d, Eigen::Index k) {
  if (!(1 <= k && k <= d && d <= 16)) {
    std::ostringstream os;
    os << "instance shape needs 1 <= k <= d <= 16, got d = " << d << ", k = " << k;
    throw Error(ErrorCode::BadShape, os.str());
  }
}

}  // namespace

GammaForm random_gamma_form(std::uint64_t seed, Eigen::Index d, Eigen::Index k) {
  require_instance_shape(d, k);
  Rng rng(seed);
  ComplexMatrix u1 = random_unitary(rng, d);
  ComplexMatrix b = random_isometry(rng, d, k);
  ComplexMatrix gamma = random_hermitian(rng, k, 0.0, 0.95);
  return make_gamma_form(std::move(u1), std::move(b), std::move(gamma));
}

MeasureModel random_measure_model(std::uint64_t seed, Eigen::Index d, Eigen::Index k,
                                  Eigen::Index ac_grid) {
  require_instance_shape(d, k);
  Rng rng(seed);
  std::vector<Atom> atoms;
  for (Eigen::Index i = 0; i < d - k; ++i) {
    const ComplexMatrix g = random_gaussian(rng, k, k);
    atoms.push_back({kTwoPi * uniform(rng, 0.0, 1.0), g * g.adjoint() / static_cast<double>(k)});
  }
  constexpr int kDegree = 3;
  std::vector<ComplexMatrix> coeffs;
  for (int n = 0; n <= kDegree; ++n) coeffs.push_back(random_gaussian(rng, k, k) / (1.0 + n));
  std::vector<ComplexMatrix> samples(static_cast<std::size_t>(ac_grid));
  for (Eigen::Index j = 0; j < ac_grid; ++j) {
    const Complex xi = std::polar(1.0, grid_angle(j, ac_grid));
    ComplexMatrix p = ComplexMatrix::Zero(k, k);
    Complex power = 1.0;
    for (const ComplexMatrix& c : coeffs) {
      p += power * c;
      power *= xi;
    }
    samples[static_cast<std::size_t>(j)] = p * p.adjoint();
  }
  MeasureModel model;
  std::ostringstream name;
  name << "random_measure_seed" << seed;
  model.name = name.str();
  model.gamma = random_hermitian(rng, k, 0.0, 0.95);
  model.mu = normalize_mass(k, std::move(atoms), std::move(samples));
  return model;
}

std::variant<GammaForm, MeasureModel> random_instance(std::uint64_t seed, Eigen::Index d,
                                                      Eigen::Index k, InstanceMode mode) {
  if (mode == InstanceMode::Matrix) return random_gamma_form(seed, d, k);
  return random_measure_model(seed, d, k);
}

std::pair<Eigen::Index, Eigen::Index> ensemble_shape(std::uint64_t seed, Eigen::Index max_dim) {
  Rng rng(seed ^ 0x5bd1e995ULL);
  const Eigen::Index d = std::uniform_int_distribution<Eigen::Index>(1, max_dim)(rng);
  const Eigen::Index k = std::uniform_int_distribution<Eigen::Index>(1, d)(rng);
  return {d, k};
}

std::vector<Complex> random_disc_points(std::uint64_t seed, std::size_t count, double r_max) {
  Rng rng(seed ^ 0x2545f491ULL);
  std::vector<Complex> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = r_max * std::sqrt(uniform(rng, 0.0, 1.0));
    out.push_back(std::polar(r, kTwoPi * uniform(rng, 0.0, 1.0)));
  }
  return out;
}

MeasureModel canonical_lebesgue(Eigen::Index ac_grid) {
  MeasureModel m;
  m.name = "scalar_lebesgue";
  m.gamma = ComplexMatrix::Constant(1, 1, 0.5);
  m.mu = OperatorMeasure(1, {},
                         std::vector<ComplexMatrix>(static_cast<std::size_t>(ac_grid),
                                                    ComplexMatrix::Identity(1, 1)));
  return m;
}

MeasureModel canonical_diag_atom(Eigen::Index ac_grid) {
  MeasureModel m;
  m.name = "diag_density_with_atom";
  m.gamma = ComplexMatrix::Zero(2, 2);
  m.gamma(0, 0) = 0.5;
  m.gamma(1, 1) = 0.3;
  ComplexMatrix density = ComplexMatrix::Zero(2, 2);
  density(0, 0) = 1.0;
  ComplexMatrix weight = ComplexMatrix::Zero(2, 2);
  weight(1, 1) = 1.0;
  // The atom supplies the mass the density leaves out, so mu(T) = I.
  m.mu = OperatorMeasure(2, {{kTwoPi * 0.3, weight}},
                         std::vector<ComplexMatrix>(static_cast<std::size_t>(ac_grid), density));
  return m;
}

MeasureModel canonical_mixed(Eigen::Index ac_grid) {
  const Complex i(0.0, 1.0);
  ComplexVector p0(2), p1(2), q0(2), q1(2);
  p0 << 1.0, 0.5 * i;
  p1 << 0.3, 0.8;
  q0 << 0.2, 1.0;
  q1 << 0.4 * i, -0.1;
  std::vector<ComplexMatrix> samples(static_cast<std::size_t>(ac_grid));
  for (Eigen::Index j = 0; j < ac_grid; ++j) {
    const double turns = static_cast<double>(j) / static_cast<double>(ac_grid);
    const Complex xi = std::polar(1.0, kTwoPi * turns);
    const ComplexVector p = p0 + xi * p1;
    const ComplexVector q = q0 + std::conj(xi) * q1;
    samples[static_cast<std::size_t>(j)] =
        arc_bump(turns, 0.05, 0.55) * outer(p) + arc_bump(turns, 0.35, 0.85) * outer(q);
  }
  ComplexMatrix weight(2, 2);
  weight << 1.0, 0.2, 0.2, 0.5;

  MeasureModel m;
  m.name = "mixed_atom_and_smooth_density";
  m.gamma.resize(2, 2);
  m.gamma << 0.4, Complex(0.1, 0.05), Complex(0.1, -0.05), 0.6;
  m.mu = normalize_mass(2, {{kTwoPi * 0.45, weight}}, std::move(samples));
  return m;
}

GammaForm canonical_scalar_atom(double gamma) {
  return make_gamma_form(ComplexMatrix::Identity(1, 1), ComplexMatrix::Identity(1, 1),
                         ComplexMatrix::Constant(1, 1, gamma));
}

MeasureModel canonical_scalar_atom_measure(double gamma) {
  MeasureModel m;
  m.name = "scalar_atom";
  m.gamma = ComplexMatrix::Constant(1, 1, gamma);
  m.mu = OperatorMeasure(1, {{0.0, ComplexMatrix::Identity(1, 1)}});
  return m;
}

VerificationReport check_theorem_main(const MeasureModel& model, Eigen::Index grid, double radius,
                                      const RankTolerance& tol) {
  const ThetaEvaluator ev = ThetaEvaluator::herglotz(model.gamma, model.mu);
  const BoundaryProfile profile = boundary_profile(ev, grid, radius, &model.mu, tol);
  std::vector<ResidualPoint> details;
  Eigen::Index disagree = 0;
  for (const BoundarySample& s : profile.samples) {
    const bool ok = s.rank_delta == s.rank_delta_star && s.rank_delta == s.n_u.value_or(0);
    if (!ok) ++disagree;
    details.push_back({std::polar(1.0, s.angle), ok ? 0.0 : 1.0});
  }
  VerificationReport r = finish_report("theorem_rank_equality", 0.01, std::move(details));
  // The check is on the fraction of disagreeing points.
  r.worst_residual = grid > 0 ? static_cast<double>(disagree) / static_cast<double>(grid) : 0.0;
  r.passed = r.worst_residual <= r.tolerance;
  std::ostringstream os;
  os << disagree << " of " << grid << " points disagree";
  r.note = os.str();
  return r;
}

VerificationReport check_two_sided_inner(const GammaForm& g, Eigen::Index grid, double tol) {
  if (g.defect_rank() == 0) {
    VerificationReport r = finish_report("two_sided_inner", tol, {});
    r.note = "k = 0, vacuous";
    return r;
  }
  const ThetaEvaluator ev = ThetaEvaluator::defect(g);
  if (ev.cnu_spectral_radius() >= 1.0 - 1e-8) {
    VerificationReport r = finish_report("two_sided_inner", tol, {});
    r.passed = false;
    r.inconclusive = true;
    r.note = "c.n.u. spectral radius too close to 1";
    return r;
  }
  std::vector<ResidualPoint> details;
  for (Eigen::Index j = 0; j < grid; ++j) {
    const double a = grid_angle(j, grid);
    details.push_back({std::polar(1.0, a), unitarity_residual(ev.boundary(a))});
  }
  return finish_report("two_sided_inner", tol, std::move(details));
}

std::optional<long> decay_exponent(const ComplexMatrix& t, double threshold, long n_max) {
  require_square(t, "T0");
  if (t.rows() == 0) return 0;
  if (n_max < 1) return std::nullopt;
  // squares[m] = T^(2^m), stopping at the first one below the threshold.
  std::vector<ComplexMatrix> squares{t};
  while (op_norm(squares.back()) > threshold) {
    const long next = 1L << squares.size();
    if (next / 2 >= n_max) return std::nullopt;
    squares.push_back(squares.back() * squares.back());
  }
  const std::size_t m = squares.size() - 1;
  if (m == 0) return 1;
  // Largest n in [2^(m-1), 2^m) with ||T^n|| > threshold, bit by bit.
  long n = 1L << (m - 1);
  ComplexMatrix acc = squares[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    ComplexMatrix cand = acc * squares[i];
    if (op_norm(cand) > threshold) {
      acc = std::move(cand);
      n += 1L << i;
    }
  }
  if (n + 1 > n_max) return std::nullopt;
  return n + 1;
}

StabilityResult check_asymptotic_stability(const ComplexMatrix& t0, double threshold, long n_max) {
  StabilityResult out;
  out.n_forward = decay_exponent(t0, threshold, n_max);
  out.n_adjoint = decay_exponent(t0.adjoint(), threshold, n_max);
  const auto norm_at = [&](const ComplexMatrix& m, long power) {
    if (m.rows() == 0) return 0.0;
    ComplexMatrix p = identity(m.rows());
    ComplexMatrix base = m;
    for (long e = power; e > 0; e >>= 1) {
      if (e & 1) p = p * base;
      base = base * base;
    }
    return op_norm(p);
  };
  std::vector<ResidualPoint> details;
  details.push_back({Complex(static_cast<double>(out.n_forward.value_or(n_max)), 0.0),
                     norm_at(t0, out.n_forward.value_or(n_max))});
  details.push_back({Complex(static_cast<double>(out.n_adjoint.value_or(n_max)), 0.0),
                     norm_at(t0.adjoint(), out.n_adjoint.value_or(n_max))});
  out.report = finish_report("asymptotic_stability", threshold, std::move(details));
  if (!out.n_forward || !out.n_adjoint) {
    out.report.passed = false;
    out.report.inconclusive = true;
    out.report.note = "power has not decayed by n_max";
  }
  return out;
}

StabilityInnerness check_stability_innerness(const GammaForm& g, Eigen::Index grid, long n_max) {
  StabilityInnerness out;
  const CnuSplit split = cnu_split(g);
  if (g.defect_rank() > 0 && split.t0_spectral_radius >= 1.0 - 1e-8) {
    out.report = finish_report("stability_innerness", 0.0, {});
    out.report.passed = false;
    out.report.inconclusive = true;
    out.report.note = "c.n.u. spectral radius too close to 1";
    return out;
  }
  out.n_forward = decay_exponent(split.T0, 1e-8, n_max);
  out.n_adjoint = decay_exponent(split.T0.adjoint(), 1e-8, n_max);
  out.n_forward_extended =
      out.n_forward ? out.n_forward : decay_exponent(split.T0, 1e-8, kExtendedHorizon);
  out.n_adjoint_extended = out.n_adjoint
                               ? out.n_adjoint
                               : decay_exponent(split.T0.adjoint(), 1e-8, kExtendedHorizon);

  if (g.defect_rank() == 0) {
    out.inner = out.co_inner = true;
  } else {
    const ThetaEvaluator ev = ThetaEvaluator::defect(g);
    const Eigen::Index k = g.defect_rank();
    double iso = 0.0;
    double coiso = 0.0;
    for (Eigen::Index j = 0; j < grid; ++j) {
      const ComplexMatrix theta = ev.boundary(grid_angle(j, grid));
      iso = std::max(iso, op_norm(theta.adjoint() * theta - identity(k)));
      coiso = std::max(coiso, op_norm(theta * theta.adjoint() - identity(k)));
    }
    out.inner = iso <= kInnerTol;
    out.co_inner = coiso <= kInnerTol;
  }

  bool unresolved = false;
  // inner <=> T0* stable, co-inner <=> T0 stable.
  for (const auto& [innerness, horizon, extended] :
       {std::tuple{out.inner, out.n_adjoint, out.n_adjoint_extended},
        std::tuple{out.co_inner, out.n_forward, out.n_forward_extended}}) {
    if (horizon) {
      out.disagreements += innerness ? 0 : 1;
    } else {
      ++out.timeouts;
      // Not decayed by n_max: only the extended horizon can decide.
      if (!extended) unresolved = true;
    }
    out.extended_disagreements += extended.has_value() != innerness ? 1 : 0;
  }

  std::vector<ResidualPoint> details;
  details.push_back(
      {Complex(0.0, 0.0), static_cast<double>(out.disagreements + out.extended_disagreements)});
  out.report = finish_report("stability_innerness", 0.0, std::move(details));
  if (unresolved && out.disagreements == 0) {
    out.report.passed = false;
    out.report.inconclusive = true;
  }
  std::ostringstream os;
  os << "inner=" << out.inner << " co_inner=" << out.co_inner
     << " n=" << out.n_forward_extended.value_or(-1)
     << " n_adjoint=" << out.n_adjoint_extended.value_or(-1) << " timeouts=" << out.timeouts;
  out.report.note = os.str();
  return out;
}

VerificationReport check_delta_identities(const MeasureModel& model, Eigen::Index grid,
                                          double radius, double tol) {
  const ThetaEvaluator ev = ThetaEvaluator::herglotz(model.gamma, model.mu);
  const OperatorMeasure& mu_tilde = *ev.measure();
  const Eigen::Index k = model.gamma.rows();
  std::vector<ResidualPoint> details;
  for (Eigen::Index j = 0; j < grid; ++j) {
    const double a = grid_angle(j, grid);
    const ComplexMatrix ww = mu_tilde.density_at(a);
    if (ww.trace().real() < kTraceGate) continue;
    if (op_norm(atom_weight_at(mu_tilde, a)) > 0.0) continue;
    const ComplexMatrix theta = radius == 1.0 ? ev.boundary(a) : ev(std::polar(radius, a));
    const ComplexMatrix left = identity(k) - theta;
    const ComplexMatrix delta_sq = identity(k) - theta.adjoint() * theta;
    const ComplexMatrix delta_star_sq = identity(k) - theta * theta.adjoint();
    const double r1 = op_norm(delta_sq - left.adjoint() * ww * left);
    const double r2 = op_norm(delta_star_sq - left * ww * left.adjoint());
    details.push_back({std::polar(radius, a), std::max(r1, r2)});
  }
  return finish_report("delta_identities", tol, std::move(details));
}

ConvergenceReport check_delta_convergence(const std::function<MeasureModel(Eigen::Index)>& build,
                                          Eigen::Index ac_grid, Eigen::Index grid) {
  ConvergenceReport out;
  out.coarse = radial_delta_residual(build(ac_grid), grid);
  out.fine = radial_delta_residual(build(2 * ac_grid), grid);
  out.passed = out.fine < out.coarse || (out.coarse <= 1e-12 && out.fine <= 1e-12);
  return out;
}

VerificationReport check_inverse_identity(const MeasureModel& model,
                                          const std::vector<Complex>& points, double tol) {
  const ThetaEvaluator f1 = ThetaEvaluator::f1(model.gamma, model.mu, Side::Left);
  const OperatorMeasure mu_tilde = pushforward_beta(model.mu, model.gamma);
  const Eigen::Index k = model.gamma.rows();
  std::vector<ResidualPoint> details;
  for (const Complex z : points) {
    const ComplexMatrix left = identity(k) - f1(z);
    const ComplexMatrix c = 0.5 * (cauchy_transform(mu_tilde, z, CauchyKind::C2) + identity(k));
    details.push_back({z, std::max(op_norm(c * left - identity(k)),
                                   op_norm(left * c - identity(k)))});
  }
  return finish_report("inverse_identity_interior", tol, std::move(details));
}

VerificationReport check_inverse_identity_boundary(const MeasureModel& model, Eigen::Index grid,
                                                   double tol) {
  const ThetaEvaluator f1 = ThetaEvaluator::f1(model.gamma, model.mu, Side::Left);
  const OperatorMeasure mu_tilde = pushforward_beta(model.mu, model.gamma);
  const Eigen::Index k = model.gamma.rows();
  std::vector<ResidualPoint> details;
  for (Eigen::Index j = 0; j < grid; ++j) {
    const double a = grid_angle(j, grid);
    if (op_norm(atom_weight_at(model.mu, a)) > 0.0) continue;
    const ComplexMatrix left = identity(k) - f1.boundary(a);
    const ComplexMatrix c =
        0.5 * (boundary_cauchy_transform(mu_tilde, a, CauchyKind::C2) + identity(k));
    details.push_back({std::polar(1.0, a), std::max(op_norm(c * left - identity(k)),
                                                    op_norm(left * c - identity(k)))});
  }
  return finish_report("inverse_identity_boundary", tol, std::move(details));
}

VerificationReport check_f1_identity(const GammaForm& g, const std::vector<Complex>& points,
                                     double tol) {
  const OperatorMeasure mu = measure_from_unitary(g.U1, g.B);
  std::vector<ResidualPoint> details;
  for (const Complex z : points) {
    details.push_back(
        {z, op_norm(resolvent_f1(g, z) - cauchy_transform(mu, z, CauchyKind::C1))});
  }
  return finish_report("f1_identity", tol, std::move(details));
}

namespace {

VerificationReport pairwise(const std::vector<ThetaEvaluator>& evs,
                            const std::vector<Complex>& points, double tol) {
  std::vector<ResidualPoint> details;
  for (const Complex z : points) {
    std::vector<ComplexMatrix> values;
    for (const ThetaEvaluator& ev : evs) values.push_back(ev(z));
    double worst = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a) {
      for (std::size_t b = a + 1; b < values.size(); ++b) {
        worst = std::max(worst, op_norm(values[a] - values[b]));
      }
    }
    details.push_back({z, worst});
  }
  return finish_report("cross_formula", tol, std::move(details));
}

}  // namespace

VerificationReport check_cross_formula(const GammaForm& g, const std::vector<Complex>& points,
                                       double tol) {
  return pairwise({ThetaEvaluator::defect(g), ThetaEvaluator::f1(g, Side::Left),
                   ThetaEvaluator::f1(g, Side::Right), ThetaEvaluator::herglotz(g)},
                  points, tol);
}

VerificationReport check_cross_formula(const MeasureModel& model,
                                       const std::vector<Complex>& points, double tol) {
  return pairwise({ThetaEvaluator::f1(model.gamma, model.mu, Side::Left),
                   ThetaEvaluator::f1(model.gamma, model.mu, Side::Right),
                   ThetaEvaluator::herglotz(model.gamma, model.mu)},
                  points, tol);
}

VerificationReport check_scalar_closed_form(double gamma, const std::vector<Complex>& points,
                                            double tol) {
  const GammaForm g = canonical_scalar_atom(gamma);
  const std::vector<ThetaEvaluator> evs{ThetaEvaluator::defect(g),
                                        ThetaEvaluator::f1(g, Side::Left),
                                        ThetaEvaluator::f1(g, Side::Right),
                                        ThetaEvaluator::herglotz(g)};
  std::vector<ResidualPoint> details;
  for (const Complex z : points) {
    const Complex expected = (z - gamma) / (1.0 - gamma * z);
    double worst = 0.0;
    for (const ThetaEvaluator& ev : evs) worst = std::max(worst, std::abs(ev(z)(0, 0) - expected));
    details.push_back({z, worst});
  }
  return finish_report("scalar_closed_form", tol, std::move(details));
}

double woodbury_residual(std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(1, 8)(rng);
  const Eigen::Index k = std::uniform_int_distribution<Eigen::Index>(1, n)(rng);
  // Scaled so that ||P Q*|| <= 1/2 and both cores are well conditioned.
  ComplexMatrix p = random_gaussian(rng, n, k);
  ComplexMatrix q = random_gaussian(rng, n, k);
  p /= 2.0 * op_norm(p);
  q /= op_norm(q);
  const ComplexMatrix w = woodbury_inverse(p, q);
  return op_norm(w * (identity(n) - p * q.adjoint()) - identity(n));
}

double polar_residual(std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(1, 8)(rng);
  ComplexMatrix r = random_gaussian(rng, n, n);
  if (seed % 2 == 1 && n > 1) {
    const Eigen::Index rank = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    r = random_gaussian(rng, n, rank) * random_gaussian(rng, rank, n);
  }
  r /= std::max(1.0, op_norm(r));
  const PolarDecomposition pd = unitary_polar(r);
  const double scale = std::max(1.0, op_norm(r));
  return std::max({op_norm(pd.unitary.adjoint() * pd.unitary - identity(n)),
                   op_norm(pd.unitary * pd.positive - r) / scale,
                   op_norm(pd.positive - pd.positive.adjoint()),
                   op_norm(pd.positive * pd.positive - r.adjoint() * r) / scale});
}

double reconstruction_residual(std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index d = std::uniform_int_distribution<Eigen::Index>(1, 8)(rng);
  const Eigen::Index k = std::uniform_int_distribution<Eigen::Index>(1, d)(rng);
  const ComplexMatrix u = random_unitary(rng, d);
  const ComplexMatrix b = random_isometry(rng, d, k);
  // A contraction C on the defect directions, sometimes with singular value 1
  // (a direction where T stays isometric) or 0.
  RealVector s(k);
  for (Eigen::Index i = 0; i < k; ++i) s(i) = uniform(rng, 0.0, 0.95);
  if (seed % 3 == 1) s(0) = 1.0;
  if (seed % 5 == 2) s(k - 1) = 0.0;
  const ComplexMatrix c =
      random_unitary(rng, k) * s.cast<Complex>().asDiagonal() * random_unitary(rng, k);
  const ComplexMatrix kpert = u * b * (c - identity(k)) * b.adjoint();
  const GammaForm g = reduce_to_gamma_form(u, kpert);
  return op_norm(assemble_T(g) - (u + kpert));
}

double isometric_orthogonality_residual(std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(2, 8)(rng);
  const Eigen::Index p = std::uniform_int_distribution<Eigen::Index>(1, n)(rng);
  RealVector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = i < p ? 1.0 : uniform(rng, 0.0, 0.99);
  const ComplexMatrix w = random_unitary(rng, n);
  const ComplexMatrix v = random_unitary(rng, n);
  const ComplexMatrix t = w * s.cast<Complex>().asDiagonal() * v.adjoint();
  // x in the span where |T| = 1, y orthogonal to x.
  ComplexVector x = v.leftCols(p) * random_gaussian(rng, p, 1);
  x.normalize();
  ComplexVector y = random_gaussian(rng, n, 1);
  y -= x * x.dot(y);
  y.normalize();
  return std::abs((t * x).dot(t * y));
}

}  // namespace sznf
