#pragma once

// Characteristic function theta of T = U1 + B (Gamma - I) B* U1, in the
// coordinates V = B* U1, V_* = B*, by three independent routes:
//
//   Defect:   -Gamma + B* z D_T* (I - z T*)^{-1} D_T U1* B
//   F1:       -Gamma + D F1 (I - (Gamma - I) F1)^{-1} D     (left)
//             -Gamma + D (I - F1 (Gamma - I))^{-1} F1 D     (right)
//   Herglotz: (C2 mu~ - I)(C2 mu~ + I)^{-1},  mu~ = beta mu beta
//
// with D = (I - Gamma^2)^{1/2} and F1 = C1 mu.

#include <optional>
#include <variant>
#include <vector>

#include "sznf/linalg.hpp"
#include "sznf/measure.hpp"
#include "sznf/perturbation.hpp"

namespace sznf {

enum class ThetaMethod { Defect, F1Left, F1Right, Herglotz };
enum class Side { Left, Right };

std::string_view to_string(ThetaMethod method);

/// z B* (I - z U1*)^{-1} U1* B.
ComplexMatrix resolvent_f1(const GammaForm& g, Complex z);

/// B* (I - z U1*)^{-1} B.
ComplexMatrix resolvent_c(const GammaForm& g, Complex z);

ComplexMatrix theta_defect(const GammaForm& g, Complex z);

/// theta from a given F1 value; raises SingularBracket if the bracket is singular.
ComplexMatrix theta_from_f1(const ComplexMatrix& gamma, const ComplexMatrix& f1, Side side);

ComplexMatrix theta_f1(const GammaForm& g, Complex z, Side side);
ComplexMatrix theta_f1(const ComplexMatrix& gamma, const OperatorMeasure& mu, Complex z,
                       Side side);

/// (C2 - I)(C2 + I)^{-1}.
ComplexMatrix theta_from_c2(const ComplexMatrix& c2);

ComplexMatrix theta_herglotz(const ComplexMatrix& gamma, const OperatorMeasure& mu_tilde,
                             Complex z);

/// Boundary value of the Herglotz form at exp(i angle). On an atom of mu~ with
/// weight A the radial limit is I - 2 N (N* (M + I) N)^{-1} N*, where N spans
/// ker A and M is the C2 trace of the remaining mass.
ComplexMatrix theta_herglotz_boundary(const OperatorMeasure& mu_tilde, double angle);

/// mu(T) must equal I for the F1 and Herglotz routes to describe a contraction.
void require_unit_mass(const OperatorMeasure& mu, double tol = 1e-9);

/// A characteristic-function evaluator bound to one formula and one model.
///
/// GammaForm-backed evaluators evaluate interior points on the full space and
/// boundary points on the c.n.u. compression, where (I - xi T0*) is invertible
/// as long as the spectral radius of T0 is below 1.
class ThetaEvaluator {
 public:
  static ThetaEvaluator defect(const GammaForm& g);
  static ThetaEvaluator f1(const GammaForm& g, Side side);
  static ThetaEvaluator f1(const ComplexMatrix& gamma, const OperatorMeasure& mu, Side side);
  static ThetaEvaluator herglotz(const ComplexMatrix& gamma, const OperatorMeasure& mu);
  /// Herglotz evaluator for a GammaForm, via mu = B* E B of U1.
  static ThetaEvaluator herglotz(const GammaForm& g);

  ThetaMethod method() const { return method_; }
  Eigen::Index dim_out() const { return gamma_.rows(); }
  const ComplexMatrix& gamma() const { return gamma_; }
  bool is_matrix_model() const { return form_.has_value(); }

  /// Spectral radius of T0 (matrix models only; 0 for measure models).
  double cnu_spectral_radius() const { return cnu_radius_; }

  /// The measure mu~ for Herglotz evaluators, mu for measure-backed F1.
  const OperatorMeasure* measure() const { return measure_ ? &*measure_ : nullptr; }

  ComplexMatrix operator()(Complex z) const;

  /// theta(exp(i angle)). Raises SpectralRadiusTooClose for matrix models whose
  /// T0 has spectral radius >= 1 - 1e-8.
  ComplexMatrix boundary(double angle) const;

  /// Radius used for boundary sampling: 1 when the boundary value can be
  /// evaluated directly, otherwise 1 - 1e-6.
  double auto_radius() const;

 private:
  ThetaMethod method_ = ThetaMethod::Defect;
  ComplexMatrix gamma_;
  std::optional<GammaForm> form_;
  std::optional<GammaForm> cnu_form_;
  double cnu_radius_ = 0.0;
  std::optional<OperatorMeasure> measure_;
};

struct BoundarySample {
  double angle = 0.0;
  ComplexMatrix theta;
  ComplexMatrix delta;       ///< (I - theta* theta)^{1/2}
  ComplexMatrix delta_star;  ///< (I - theta theta*)^{1/2}
  RealVector theta_singular_values;
  Eigen::Index rank_delta = 0;
  Eigen::Index rank_delta_star = 0;
  std::optional<Eigen::Index> n_u;  ///< rank of the a.c. density, when a measure is attached
};

struct BoundaryProfile {
  Eigen::Index grid = 0;
  double radius = 1.0;
  std::vector<BoundarySample> samples;
};

/// Samples theta at radius * exp(2 pi i j / grid). Eigenvalues of I - theta* theta
/// in [-1e-9, 0) are clamped. Ranks are computed on the squared defects, which
/// have the same rank as the defects and are free of square-root noise
/// amplification. With an attached measure, n_u is the rank of its density.
BoundaryProfile boundary_profile(const ThetaEvaluator& evaluator, Eigen::Index grid, double radius,
                                 const OperatorMeasure* attached = nullptr,
                                 const RankTolerance& tol = {});

}  // namespace sznf
