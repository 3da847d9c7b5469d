#pragma once

#include "sznf/linalg.hpp"

namespace sznf {

/// Eigenvalues of |R| within this distance of 1 belong to the unitary part and
/// are dropped from the auxiliary space.
inline constexpr double kStrictness = 1e-12;

/// Canonical representation T = U1 + B (Gamma - I) B* U1 of a contraction that
/// is a finite-rank perturbation of a unitary.
///
/// U1 is d x d unitary, B is a d x k isometry and Gamma is a k x k Hermitian
/// strict contraction with spectrum in [0, 1). k = 0 is legal and means T = U1.
struct GammaForm {
  ComplexMatrix U1;
  ComplexMatrix B;
  ComplexMatrix Gamma;

  Eigen::Index dim() const { return U1.rows(); }
  Eigen::Index defect_rank() const { return B.cols(); }

  /// Throws (BadShape, NotUnitary, NotIsometry, NotHermitian, GammaNotStrict,
  /// NotAContraction) when one of the invariants fails.
  void validate() const;
};

/// Builds and validates a GammaForm.
GammaForm make_gamma_form(ComplexMatrix u1, ComplexMatrix b, ComplexMatrix gamma);

/// Rewrites T = U + K in canonical form.
///
/// Works on the adjoint: T* = U*(I + K') with K' = U K*. On D1 = (ker K')^perp
/// the operator R = (I + K')|D1 is polar-decomposed as V|R|; directions where
/// |R| = 1 are split off, |R| on the rest becomes Gamma, and U1 = (V (+) I)* U
/// after taking adjoints back.
GammaForm reduce_to_gamma_form(const ComplexMatrix& u, const ComplexMatrix& k,
                               const RankTolerance& tol = {});

/// U1 + B (Gamma - I) B* U1.
ComplexMatrix assemble_T(const GammaForm& g);

struct DefectOperators {
  ComplexMatrix D_T;      ///< (I - T*T)^{1/2} = U1* B D_Gamma B* U1
  ComplexMatrix D_Tstar;  ///< (I - TT*)^{1/2} = B D_Gamma B*
};

/// D_Gamma = (I - Gamma^2)^{1/2}; Gamma is Hermitian so both defects coincide.
ComplexMatrix gamma_defect(const ComplexMatrix& gamma);

DefectOperators defect_operators(const GammaForm& g);

/// Orthogonal split of the space into H0 (generated by Ran B under U1 and U1*)
/// and its complement H1, on which T acts unitarily.
struct CnuSplit {
  ComplexMatrix P0;      ///< orthogonal projection onto H0
  ComplexMatrix basis0;  ///< orthonormal frame of H0 (d x dim H0)
  ComplexMatrix basis1;  ///< orthonormal frame of H1
  ComplexMatrix T0;      ///< compression of T to H0
  ComplexMatrix V;       ///< compression of T (= U1) to H1
  double t0_spectral_radius = 0.0;

  Eigen::Index dim_h0() const { return basis0.cols(); }
  Eigen::Index dim_h1() const { return basis1.cols(); }
};

/// Block Krylov accumulation of U1^n B and (U1*)^n B; each new block is
/// orthogonalized twice against the current frame and rank-revealed with
/// column-pivoted QR at `saturation_tol`.
CnuSplit cnu_split(const GammaForm& g, double saturation_tol = 1e-10);

/// The same GammaForm compressed to H0: U0 = basis0* U1 basis0, B0 = basis0* B.
/// Its characteristic function equals that of g.
GammaForm restrict_to_cnu(const GammaForm& g, const CnuSplit& split);

}  // namespace sznf
