#include "sznf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sznf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::NotAContraction: return "NotAContraction";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::SingularCore: return "SingularCore";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::SingularBracket: return "SingularBracket";
    case ErrorCode::GammaNotStrict: return "GammaNotStrict";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::SpectralRadiusTooClose: return "SpectralRadiusTooClose";
    case ErrorCode::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

void RankTolerance::validate() const {
  if (!(relative > 0.0 && relative < 1.0) || !(absolute_floor > 0.0)) {
    std::ostringstream os;
    os << "rank tolerance needs relative in (0,1) and floor > 0, got " << relative << ", "
       << absolute_floor;
    throw Error(ErrorCode::BadShape, os.str());
  }
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

RealVector singular_values(const ComplexMatrix& a) {
  if (a.size() == 0) return RealVector(0);
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues();
}

double op_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

void require_finite(const ComplexMatrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has NaN/Inf entries");
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << " must be square, got " << a.rows() << "x" << a.cols();
    throw Error(ErrorCode::BadShape, os.str());
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return (a + a.adjoint()) * 0.5; }

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return op_norm(a - a.adjoint()) <= tol * std::max(1.0, op_norm(a));
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && is_isometry(a, tol);
}

bool is_isometry(const ComplexMatrix& a, double tol) {
  if (a.cols() > a.rows()) return false;
  return op_norm(a.adjoint() * a - identity(a.cols())) <= tol;
}

bool is_contraction(const ComplexMatrix& a, double slack) { return op_norm(a) <= 1.0 + slack; }

double spectral_radius(const ComplexMatrix& a) {
  require_square(a, "spectral_radius argument");
  if (a.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

HermitianEigen hermitian_eigen(const ComplexMatrix& a) {
  require_square(a, "Hermitian eigenproblem");
  if (a.size() == 0) return {RealVector(0), ComplexMatrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a, double negative_tolerance) {
  require_square(a, "psd_sqrt argument");
  require_finite(a, "psd_sqrt argument");
  if (!is_hermitian(a, 1e-12)) {
    throw Error(ErrorCode::NotHermitian, "psd_sqrt argument is not Hermitian");
  }
  auto [values, vectors] = hermitian_eigen(a);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < -negative_tolerance) {
      std::ostringstream os;
      os << "eigenvalue " << values(i) << " below -" << negative_tolerance;
      throw Error(ErrorCode::NotPsd, os.str());
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

PolarDecomposition unitary_polar(const ComplexMatrix& r) {
  require_square(r, "unitary_polar argument");
  require_finite(r, "unitary_polar argument");
  if (r.size() == 0) return {ComplexMatrix(0, 0), ComplexMatrix(0, 0)};
  Eigen::JacobiSVD<ComplexMatrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix& left = svd.matrixU();
  const ComplexMatrix& right = svd.matrixV();
  ComplexMatrix positive =
      right * svd.singularValues().cast<Complex>().asDiagonal() * right.adjoint();
  return {left * right.adjoint(), hermitian_part(positive)};
}

namespace {

void check_condition(const ComplexMatrix& a, ErrorCode code) {
  const RealVector s = singular_values(a);
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || smax / smin >= kConditionCutoff) {
    std::ostringstream os;
    os << "condition number " << (smin > 0.0 ? smax / smin : INFINITY) << " of " << a.rows()
       << "x" << a.cols() << " matrix";
    throw Error(code, os.str());
  }
}

}  // namespace

ComplexMatrix checked_inverse(const ComplexMatrix& a, ErrorCode code) {
  require_square(a, "inverse argument");
  if (a.size() == 0) return ComplexMatrix(0, 0);
  require_finite(a, "inverse argument");
  check_condition(a, code);
  return a.partialPivLu().inverse();
}

ComplexMatrix checked_solve(const ComplexMatrix& a, const ComplexMatrix& b, ErrorCode code) {
  require_square(a, "solve argument");
  if (a.rows() != b.rows()) throw Error(ErrorCode::BadShape, "solve: row mismatch");
  if (a.size() == 0) return ComplexMatrix(0, b.cols());
  require_finite(a, "solve argument");
  check_condition(a, code);
  return a.partialPivLu().solve(b);
}

ComplexMatrix woodbury_inverse(const ComplexMatrix& p, const ComplexMatrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw Error(ErrorCode::BadShape, "woodbury_inverse: P and Q must have equal shapes");
  }
  const Eigen::Index n = p.rows();
  const Eigen::Index k = p.cols();
  const ComplexMatrix core = identity(k) - q.adjoint() * p;
  return identity(n) + p * checked_solve(core, q.adjoint(), ErrorCode::SingularCore);
}

Eigen::Index numerical_rank(const ComplexMatrix& a, const RankTolerance& tol) {
  tol.validate();
  const RealVector s = singular_values(a);
  if (s.size() == 0) return 0;
  const double cut = std::max(tol.relative * s(0), tol.absolute_floor);
  return (s.array() > cut).count();
}

ComplexMatrix orthonormal_range(const ComplexMatrix& a, double tol) {
  if (a.cols() == 0 || a.rows() == 0) return ComplexMatrix(a.rows(), 0);
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(a);
  const auto& packed = qr.matrixQR();
  const Eigen::Index diag = std::min(a.rows(), a.cols());
  Eigen::Index rank = 0;
  while (rank < diag && std::abs(packed(rank, rank)) > tol) ++rank;
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(a.rows(), rank);
  return q;
}

ComplexMatrix orthogonal_complement(const ComplexMatrix& q, Eigen::Index rows) {
  if (q.cols() == 0) return identity(rows);
  if (q.rows() != rows) throw Error(ErrorCode::BadShape, "orthogonal_complement: row mismatch");
  Eigen::HouseholderQR<ComplexMatrix> qr(q);
  const ComplexMatrix full = qr.householderQ() * identity(rows);
  return full.rightCols(rows - q.cols());
}

}  // namespace sznf
