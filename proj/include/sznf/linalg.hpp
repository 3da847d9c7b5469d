#pragma once

// Dense complex linear algebra used throughout the toolkit. Everything here is
// a pure function of its arguments.

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "sznf/error.hpp"

namespace sznf {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Condition numbers at or above this are treated as singular.
inline constexpr double kConditionCutoff = 1e12;

/// Thresholds for deciding which singular values count toward the rank.
struct RankTolerance {
  double relative = 1e-8;
  double absolute_floor = 1e-10;

  /// Throws BadShape unless relative is in (0, 1) and absolute_floor > 0.
  void validate() const;
};

ComplexMatrix identity(Eigen::Index n);

/// Largest singular value; 0 for empty matrices.
double op_norm(const ComplexMatrix& a);

RealVector singular_values(const ComplexMatrix& a);

bool all_finite(const ComplexMatrix& a);
void require_finite(const ComplexMatrix& a, const char* what);
void require_square(const ComplexMatrix& a, const char* what);

/// (A + A*)/2.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// ||A - A*|| <= tol * max(1, ||A||).
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-12);

/// ||A*A - I|| <= tol.
bool is_unitary(const ComplexMatrix& a, double tol = 1e-10);

/// ||A*A - I_cols|| <= tol.
bool is_isometry(const ComplexMatrix& a, double tol = 1e-10);

/// Largest singular value <= 1 + slack.
bool is_contraction(const ComplexMatrix& a, double slack = 1e-10);

double spectral_radius(const ComplexMatrix& a);

/// Eigenvalues (ascending) and orthonormal eigenvectors of the Hermitian part of A.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};
HermitianEigen hermitian_eigen(const ComplexMatrix& a);

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in [-negative_tolerance, 0) are clamped to zero; anything more
/// negative raises NotPsd. Asymmetry beyond 1e-12 * max(1, ||A||) raises
/// NotHermitian.
ComplexMatrix psd_sqrt(const ComplexMatrix& a, double negative_tolerance = 1e-10);

/// Polar factors R = V * P with V unitary and P = (R*R)^{1/2}.
///
/// V is taken from the full SVD R = X S Y* as V = X Y*, so left and right
/// singular vectors of the zero singular values are paired in index order.
/// This maps ker R onto ker R* and gives V = I for R = 0.
struct PolarDecomposition {
  ComplexMatrix unitary;
  ComplexMatrix positive;
};
PolarDecomposition unitary_polar(const ComplexMatrix& r);

/// Inverse with a condition-number guard. Raises `code` when cond >= 1e12.
ComplexMatrix checked_inverse(const ComplexMatrix& a, ErrorCode code = ErrorCode::SingularMatrix);

/// Solves A X = B with the same guard as checked_inverse.
ComplexMatrix checked_solve(const ComplexMatrix& a, const ComplexMatrix& b,
                            ErrorCode code = ErrorCode::SingularMatrix);

/// (I_n - P Q*)^{-1} via the k x k core: I_n + P (I_k - Q* P)^{-1} Q*.
/// Raises SingularCore when the core is numerically singular.
ComplexMatrix woodbury_inverse(const ComplexMatrix& p, const ComplexMatrix& q);

/// Number of singular values above max(tol.relative * sigma_max, tol.absolute_floor).
Eigen::Index numerical_rank(const ComplexMatrix& a, const RankTolerance& tol = {});

/// Orthonormal basis for the column span of A, determined by column-pivoted
/// QR with |R_ii| > tol treated as nonzero.
ComplexMatrix orthonormal_range(const ComplexMatrix& a, double tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of an orthonormal frame Q
/// inside C^rows.
ComplexMatrix orthogonal_complement(const ComplexMatrix& q, Eigen::Index rows);

}  // namespace sznf
