#include "sznf/charfn.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sznf {

std::string_view to_string(ThetaMethod method) {
  switch (method) {
    case ThetaMethod::Defect: return "defect";
    case ThetaMethod::F1Left: return "f1_left";
    case ThetaMethod::F1Right: return "f1_right";
    case ThetaMethod::Herglotz: return "herglotz";
  }
  return "unknown";
}

ComplexMatrix resolvent_f1(const GammaForm& g, Complex z) {
  const Eigen::Index d = g.dim();
  const ComplexMatrix x =
      checked_solve(identity(d) - z * g.U1.adjoint(), g.U1.adjoint() * g.B,
                    ErrorCode::SingularResolvent);
  return z * (g.B.adjoint() * x);
}

ComplexMatrix resolvent_c(const GammaForm& g, Complex z) {
  const Eigen::Index d = g.dim();
  const ComplexMatrix x =
      checked_solve(identity(d) - z * g.U1.adjoint(), g.B, ErrorCode::SingularResolvent);
  return g.B.adjoint() * x;
}

ComplexMatrix theta_defect(const GammaForm& g, Complex z) {
  const Eigen::Index k = g.defect_rank();
  if (k == 0) return ComplexMatrix(0, 0);
  const ComplexMatrix t = assemble_T(g);
  const DefectOperators defects = defect_operators(g);
  const ComplexMatrix x =
      checked_solve(identity(g.dim()) - z * t.adjoint(), defects.D_T * (g.U1.adjoint() * g.B),
                    ErrorCode::SingularResolvent);
  return -g.Gamma + z * (g.B.adjoint() * defects.D_Tstar * x);
}

ComplexMatrix theta_from_f1(const ComplexMatrix& gamma, const ComplexMatrix& f1, Side side) {
  const Eigen::Index k = gamma.rows();
  if (k == 0) return ComplexMatrix(0, 0);
  const ComplexMatrix d = gamma_defect(gamma);
  const ComplexMatrix shift = gamma - identity(k);
  if (side == Side::Left) {
    const ComplexMatrix bracket = identity(k) - shift * f1;
    return -gamma + d * f1 * checked_inverse(bracket, ErrorCode::SingularBracket) * d;
  }
  const ComplexMatrix bracket = identity(k) - f1 * shift;
  return -gamma + d * checked_solve(bracket, f1, ErrorCode::SingularBracket) * d;
}

ComplexMatrix theta_f1(const GammaForm& g, Complex z, Side side) {
  return theta_from_f1(g.Gamma, resolvent_f1(g, z), side);
}

ComplexMatrix theta_f1(const ComplexMatrix& gamma, const OperatorMeasure& mu, Complex z,
                       Side side) {
  return theta_from_f1(gamma, cauchy_transform(mu, z, CauchyKind::C1), side);
}

ComplexMatrix theta_from_c2(const ComplexMatrix& c2) {
  const Eigen::Index k = c2.rows();
  if (k == 0) return ComplexMatrix(0, 0);
  return (c2 - identity(k)) * checked_inverse(c2 + identity(k));
}

ComplexMatrix theta_herglotz(const ComplexMatrix& gamma, const OperatorMeasure& mu_tilde,
                             Complex z) {
  if (gamma.rows() != mu_tilde.dim()) throw Error(ErrorCode::BadShape, "Gamma/measure size");
  return theta_from_c2(cauchy_transform(mu_tilde, z, CauchyKind::C2));
}

ComplexMatrix theta_herglotz_boundary(const OperatorMeasure& mu_tilde, double angle) {
  const Eigen::Index k = mu_tilde.dim();
  if (k == 0) return ComplexMatrix(0, 0);
  const ComplexMatrix hit = atom_weight_at(mu_tilde, angle);
  const ComplexMatrix rest = boundary_c2_excluding_hits(mu_tilde, angle);
  const double hit_norm = op_norm(hit);
  if (hit_norm == 0.0) return theta_from_c2(rest);

  const HermitianEigen eig = hermitian_eigen(hit);
  const double cut = 1e-12 * std::max(1.0, hit_norm);
  const Eigen::Index kernel = (eig.values.array() <= cut).count();
  // Eigenvalues are ascending, so ker A is spanned by the leading columns.
  const ComplexMatrix n = eig.vectors.leftCols(kernel);
  const ComplexMatrix compressed = n.adjoint() * (rest + identity(k)) * n;
  return identity(k) - 2.0 * n * checked_inverse(compressed) * n.adjoint();
}

void require_unit_mass(const OperatorMeasure& mu, double tol) {
  const double dev = op_norm(mu.total_mass() - identity(mu.dim()));
  if (dev > tol) {
    std::ostringstream os;
    os << "total mass must be the identity, ||mu(T) - I|| = " << dev;
    throw Error(ErrorCode::InvalidModel, os.str());
  }
}

ThetaEvaluator ThetaEvaluator::defect(const GammaForm& g) {
  ThetaEvaluator ev;
  ev.method_ = ThetaMethod::Defect;
  ev.gamma_ = g.Gamma;
  ev.form_ = g;
  const CnuSplit split = cnu_split(g);
  ev.cnu_form_ = restrict_to_cnu(g, split);
  ev.cnu_radius_ = split.t0_spectral_radius;
  return ev;
}

ThetaEvaluator ThetaEvaluator::f1(const GammaForm& g, Side side) {
  ThetaEvaluator ev = defect(g);
  ev.method_ = side == Side::Left ? ThetaMethod::F1Left : ThetaMethod::F1Right;
  return ev;
}

ThetaEvaluator ThetaEvaluator::f1(const ComplexMatrix& gamma, const OperatorMeasure& mu,
                                  Side side) {
  if (gamma.rows() != mu.dim() || gamma.cols() != mu.dim()) {
    throw Error(ErrorCode::BadShape, "Gamma size must match measure dimension");
  }
  require_unit_mass(mu);
  beta_matrix(gamma);  // strictness check
  ThetaEvaluator ev;
  ev.method_ = side == Side::Left ? ThetaMethod::F1Left : ThetaMethod::F1Right;
  ev.gamma_ = hermitian_part(gamma);
  ev.measure_ = mu;
  return ev;
}

ThetaEvaluator ThetaEvaluator::herglotz(const ComplexMatrix& gamma, const OperatorMeasure& mu) {
  if (gamma.rows() != mu.dim() || gamma.cols() != mu.dim()) {
    throw Error(ErrorCode::BadShape, "Gamma size must match measure dimension");
  }
  require_unit_mass(mu);
  ThetaEvaluator ev;
  ev.method_ = ThetaMethod::Herglotz;
  ev.gamma_ = hermitian_part(gamma);
  ev.measure_ = pushforward_beta(mu, gamma);
  return ev;
}

ThetaEvaluator ThetaEvaluator::herglotz(const GammaForm& g) {
  ThetaEvaluator ev = herglotz(g.Gamma, measure_from_unitary(g.U1, g.B));
  ev.form_ = g;
  const CnuSplit split = cnu_split(g);
  ev.cnu_form_ = restrict_to_cnu(g, split);
  ev.cnu_radius_ = split.t0_spectral_radius;
  return ev;
}

ComplexMatrix ThetaEvaluator::operator()(Complex z) const {
  switch (method_) {
    case ThetaMethod::Defect: return theta_defect(*form_, z);
    case ThetaMethod::F1Left:
    case ThetaMethod::F1Right: {
      const Side side = method_ == ThetaMethod::F1Left ? Side::Left : Side::Right;
      return form_ ? theta_f1(*form_, z, side) : theta_f1(gamma_, *measure_, z, side);
    }
    case ThetaMethod::Herglotz: return theta_herglotz(gamma_, *measure_, z);
  }
  return {};
}

ComplexMatrix ThetaEvaluator::boundary(double angle) const {
  if (dim_out() == 0) return ComplexMatrix(0, 0);
  if (method_ == ThetaMethod::Herglotz) return theta_herglotz_boundary(*measure_, angle);
  if (!form_) {
    const Side side = method_ == ThetaMethod::F1Left ? Side::Left : Side::Right;
    return theta_from_f1(gamma_, boundary_cauchy_transform(*measure_, angle, CauchyKind::C1),
                         side);
  }
  if (cnu_radius_ >= 1.0 - 1e-8) {
    std::ostringstream os;
    os << "spectral radius of the c.n.u. part is " << cnu_radius_;
    throw Error(ErrorCode::SpectralRadiusTooClose, os.str());
  }
  const Complex xi = std::polar(1.0, angle);
  switch (method_) {
    case ThetaMethod::Defect: return theta_defect(*cnu_form_, xi);
    case ThetaMethod::F1Left: return theta_f1(*cnu_form_, xi, Side::Left);
    default: return theta_f1(*cnu_form_, xi, Side::Right);
  }
}

double ThetaEvaluator::auto_radius() const {
  if (!form_ || method_ == ThetaMethod::Herglotz) return 1.0;
  return cnu_radius_ < 1.0 - 1e-8 ? 1.0 : 1.0 - 1e-6;
}

BoundaryProfile boundary_profile(const ThetaEvaluator& evaluator, Eigen::Index grid, double radius,
                                 const OperatorMeasure* attached, const RankTolerance& tol) {
  if (grid <= 0) throw Error(ErrorCode::BadShape, "profile grid must be positive");
  if (!(radius > 0.0 && radius <= 1.0)) {
    throw Error(ErrorCode::BadShape, "profile radius must lie in (0, 1]");
  }
  tol.validate();
  BoundaryProfile out;
  out.grid = grid;
  out.radius = radius;
  out.samples.resize(static_cast<std::size_t>(grid));
  const Eigen::Index k = evaluator.dim_out();
  for (Eigen::Index j = 0; j < grid; ++j) {
    BoundarySample& s = out.samples[static_cast<std::size_t>(j)];
    s.angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid);
    s.theta = radius == 1.0 ? evaluator.boundary(s.angle)
                            : evaluator(std::polar(radius, s.angle));
    const ComplexMatrix defect_sq = hermitian_part(identity(k) - s.theta.adjoint() * s.theta);
    const ComplexMatrix defect_star_sq =
        hermitian_part(identity(k) - s.theta * s.theta.adjoint());
    s.delta = psd_sqrt(defect_sq, 1e-9);
    s.delta_star = psd_sqrt(defect_star_sq, 1e-9);
    s.theta_singular_values = singular_values(s.theta);
    s.rank_delta = numerical_rank(defect_sq, tol);
    s.rank_delta_star = numerical_rank(defect_star_sq, tol);
    if (attached) s.n_u = numerical_rank(attached->density_at(s.angle), tol);
  }
  return out;
}

}  // namespace sznf
