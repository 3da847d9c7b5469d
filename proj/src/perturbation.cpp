#include "sznf/perturbation.hpp"

#include <algorithm>
#include <sstream>

namespace sznf {

void GammaForm::validate() const {
  const Eigen::Index d = U1.rows();
  const Eigen::Index k = B.cols();
  if (U1.cols() != d || B.rows() != d || Gamma.rows() != k || Gamma.cols() != k || k > d) {
    std::ostringstream os;
    os << "inconsistent shapes U1 " << U1.rows() << "x" << U1.cols() << ", B " << B.rows() << "x"
       << B.cols() << ", Gamma " << Gamma.rows() << "x" << Gamma.cols();
    throw Error(ErrorCode::BadShape, os.str());
  }
  require_finite(U1, "U1");
  require_finite(B, "B");
  require_finite(Gamma, "Gamma");
  if (!is_unitary(U1, 1e-10)) throw Error(ErrorCode::NotUnitary, "U1 is not unitary");
  if (!is_isometry(B, 1e-10)) throw Error(ErrorCode::NotIsometry, "B is not an isometry");
  if (k == 0) return;
  if (op_norm(Gamma - Gamma.adjoint()) > 1e-10) {
    throw Error(ErrorCode::NotHermitian, "Gamma is not Hermitian");
  }
  const RealVector ev = hermitian_eigen(Gamma).values;
  if (ev(0) < -1e-10 || ev(ev.size() - 1) > 1.0 - kStrictness) {
    std::ostringstream os;
    os << "Gamma spectrum [" << ev(0) << ", " << ev(ev.size() - 1) << "] outside [0, 1)";
    throw Error(ErrorCode::GammaNotStrict, os.str());
  }
  if (!is_contraction(assemble_T(*this), 1e-8)) {
    throw Error(ErrorCode::NotAContraction, "assembled T is not a contraction");
  }
}

GammaForm make_gamma_form(ComplexMatrix u1, ComplexMatrix b, ComplexMatrix gamma) {
  GammaForm g{std::move(u1), std::move(b), std::move(gamma)};
  g.validate();
  return g;
}

GammaForm reduce_to_gamma_form(const ComplexMatrix& u, const ComplexMatrix& k,
                               const RankTolerance& tol) {
  require_square(u, "U");
  require_square(k, "K");
  if (u.rows() != k.rows()) throw Error(ErrorCode::BadShape, "U and K differ in size");
  require_finite(u, "U");
  require_finite(k, "K");
  tol.validate();
  if (!is_unitary(u, 1e-10)) throw Error(ErrorCode::NotUnitary, "U is not unitary");
  if (!is_contraction(u + k, 1e-10)) {
    throw Error(ErrorCode::NotAContraction, "U + K is not a contraction");
  }
  const Eigen::Index d = u.rows();

  // T* = U* (I + K') with K' = U K*.
  const ComplexMatrix k_prime = u * k.adjoint();

  // D1 = (ker K')^perp, spanned by the leading right singular vectors.
  Eigen::Index r = 0;
  ComplexMatrix d1(d, 0);
  if (d > 0) {
    Eigen::JacobiSVD<ComplexMatrix> svd(k_prime, Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const double cut = std::max(tol.relative * s(0), tol.absolute_floor);
    r = (s.array() > cut).count();
    d1 = svd.matrixV().leftCols(r);
  }

  // R = (I + K') restricted to D1, which it leaves invariant.
  const ComplexMatrix r_block = identity(r) + d1.adjoint() * k_prime * d1;
  const PolarDecomposition polar = unitary_polar(r_block);

  // D2 = D1 minus the eigenspace of |R| at 1; Gamma = |R| on D2.
  const HermitianEigen modulus = hermitian_eigen(polar.positive);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < modulus.values.size(); ++i) {
    if (modulus.values(i) < 1.0 - kStrictness) kept.push_back(i);
  }
  const auto kdim = static_cast<Eigen::Index>(kept.size());
  ComplexMatrix y(r, kdim);
  ComplexMatrix gamma = ComplexMatrix::Zero(kdim, kdim);
  for (Eigen::Index j = 0; j < kdim; ++j) {
    y.col(j) = modulus.vectors.col(kept[static_cast<std::size_t>(j)]);
    gamma(j, j) = std::max(modulus.values(kept[static_cast<std::size_t>(j)]), 0.0);
  }
  const ComplexMatrix b = d1 * y;

  // U1' = U* (V (+) I) is the unitary of the adjoint-side formula; U1 = U1'*.
  const ComplexMatrix v_ext = d1 * polar.unitary * d1.adjoint() + identity(d) - d1 * d1.adjoint();
  GammaForm g{v_ext.adjoint() * u, b, gamma};
  g.validate();
  return g;
}

ComplexMatrix assemble_T(const GammaForm& g) {
  const Eigen::Index k = g.defect_rank();
  if (k == 0) return g.U1;
  return g.U1 + g.B * (g.Gamma - identity(k)) * (g.B.adjoint() * g.U1);
}

ComplexMatrix gamma_defect(const ComplexMatrix& gamma) {
  return psd_sqrt(identity(gamma.rows()) - hermitian_part(gamma * gamma));
}

DefectOperators defect_operators(const GammaForm& g) {
  const Eigen::Index d = g.dim();
  if (g.defect_rank() == 0) return {ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d)};
  const ComplexMatrix dg = gamma_defect(g.Gamma);
  const ComplexMatrix d_tstar = g.B * dg * g.B.adjoint();
  return {g.U1.adjoint() * d_tstar * g.U1, d_tstar};
}

CnuSplit cnu_split(const GammaForm& g, double saturation_tol) {
  const Eigen::Index d = g.dim();
  const ComplexMatrix t = assemble_T(g);
  CnuSplit out;

  ComplexMatrix frame = orthonormal_range(g.B, saturation_tol);
  ComplexMatrix frontier = frame;
  while (frontier.cols() > 0 && frame.cols() < d) {
    ComplexMatrix cand(d, 2 * frontier.cols());
    cand << g.U1 * frontier, g.U1.adjoint() * frontier;
    for (int pass = 0; pass < 2; ++pass) cand -= frame * (frame.adjoint() * cand);
    ComplexMatrix fresh = orthonormal_range(cand, saturation_tol);
    if (fresh.cols() > 0) {
      fresh -= frame * (frame.adjoint() * fresh);
      fresh = orthonormal_range(fresh, saturation_tol);
    }
    ComplexMatrix grown(d, frame.cols() + fresh.cols());
    grown << frame, fresh;
    frame = std::move(grown);
    frontier = std::move(fresh);
  }

  out.basis0 = frame;
  out.basis1 = orthogonal_complement(frame, d);
  out.P0 = frame * frame.adjoint();
  out.T0 = frame.adjoint() * t * frame;
  out.V = out.basis1.adjoint() * t * out.basis1;
  out.t0_spectral_radius = spectral_radius(out.T0);
  return out;
}

GammaForm restrict_to_cnu(const GammaForm& g, const CnuSplit& split) {
  const ComplexMatrix& f = split.basis0;
  return GammaForm{f.adjoint() * g.U1 * f, f.adjoint() * g.B, g.Gamma};
}

}  // namespace sznf
