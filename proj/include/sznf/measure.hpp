#pragma once

// Matrix-valued measures on the unit circle: point masses plus an absolutely
// continuous part sampled on a uniform grid, together with their Cauchy and
// Poisson transforms.

#include <optional>
#include <vector>

#include "sznf/linalg.hpp"

namespace sznf {

struct Atom {
  double angle = 0.0;  ///< radians in [0, 2pi)
  ComplexMatrix weight;
};

enum class CauchyKind {
  C,   ///< integral of 1 / (1 - z conj(xi))
  C1,  ///< integral of z conj(xi) / (1 - z conj(xi))
  C2,  ///< integral of (1 + z conj(xi)) / (1 - z conj(xi))
};

/// A k x k positive matrix-valued measure on the circle.
///
/// The a.c. part is given by M samples (M a power of two, or 0), sample j being
/// the density at exp(2 pi i j / M) with respect to normalized arc length.
/// Fourier moments c_n = int conj(xi)^n dmu are computed once at construction:
/// atoms exactly, the a.c. part by FFT of the samples.
class OperatorMeasure {
 public:
  OperatorMeasure() = default;

  /// Validates that every weight and sample is k x k Hermitian positive
  /// semidefinite (to 1e-10); small negative eigenvalues are clamped to 0.
  OperatorMeasure(Eigen::Index dim, std::vector<Atom> atoms,
                  std::vector<ComplexMatrix> ac_samples = {});

  Eigen::Index dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  Eigen::Index ac_grid() const { return static_cast<Eigen::Index>(samples_.size()); }
  const std::vector<ComplexMatrix>& ac_samples() const { return samples_; }
  bool has_ac() const { return !samples_.empty(); }

  /// Combined moments c_0 .. c_M (just c_0 when there is no a.c. part).
  const std::vector<ComplexMatrix>& moments() const { return moments_; }

  /// Discrete moments of the a.c. part alone, n = 0 .. M-1.
  const std::vector<ComplexMatrix>& ac_moments() const { return ac_moments_; }

  /// mu(T) = c_0.
  const ComplexMatrix& total_mass() const { return moments_.front(); }

  /// Largest interior radius at which the truncated moment series is trusted:
  /// 1 - 64/M with an a.c. part, +inf otherwise.
  double r_max() const;

  /// Density of the a.c. part at an angle: the grid sample when the angle is a
  /// grid node, the trigonometric interpolant otherwise, zero without a.c. part.
  ComplexMatrix density_at(double angle) const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<Atom> atoms_;
  std::vector<ComplexMatrix> samples_;
  std::vector<ComplexMatrix> ac_moments_;
  std::vector<ComplexMatrix> moments_;
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double angle);

/// mu(E) = B* E(E) B for the spectral measure E of U1. Eigenvalues closer than
/// 1e-10 share one spectral projection; zero-weight atoms are dropped.
OperatorMeasure measure_from_unitary(const ComplexMatrix& u1, const ComplexMatrix& b);

/// Cauchy transform at an interior (or, for purely atomic measures, exterior)
/// point. Raises RadiusTooLarge when |z| > r_max with an a.c. part present and
/// PoleHit when z sits on an atom.
ComplexMatrix cauchy_transform(const OperatorMeasure& m, Complex z, CauchyKind kind);

/// Boundary trace of the Cauchy transform at exp(i angle). The a.c. part uses
/// the one-sided (analytic) half of the discrete spectrum, so its Hermitian
/// part reproduces the density; atoms contribute i cot((angle - a)/2) terms.
/// Raises PoleHit when the angle coincides with an atom.
ComplexMatrix boundary_cauchy_transform(const OperatorMeasure& m, double angle, CauchyKind kind);

/// Angular distance below which a boundary point is considered to sit on an atom.
inline constexpr double kAtomHitTolerance = 1e-12;

/// Sum of the weights of atoms sitting at `angle` (zero matrix if none).
ComplexMatrix atom_weight_at(const OperatorMeasure& m, double angle,
                             double tol = kAtomHitTolerance);

/// C2 boundary trace with the atoms at `angle` left out.
ComplexMatrix boundary_c2_excluding_hits(const OperatorMeasure& m, double angle,
                                         double tol = kAtomHitTolerance);

/// Re C2 mu(z) = (C2 + C2*)/2.
ComplexMatrix poisson_extension(const OperatorMeasure& m, Complex z);

struct TraceNormalization {
  OperatorMeasure scalar;               ///< tr mu, as a 1 x 1 measure
  std::vector<ComplexMatrix> atom_W;    ///< weight / trace per atom
  std::vector<ComplexMatrix> sample_W;  ///< sample / trace per grid node
};

/// Splits dmu = W d(tr mu). W has unit trace wherever tr > 1e-14 and is zero
/// elsewhere.
TraceNormalization trace_normalize(const OperatorMeasure& m);

/// beta = (I - Gamma)^{1/2} (I + Gamma)^{-1/2}. Raises GammaNotStrict unless the
/// spectrum of Gamma lies in [-1e-10, 1 - 1e-12].
ComplexMatrix beta_matrix(const ComplexMatrix& gamma);

/// The measure beta mu beta.
OperatorMeasure pushforward_beta(const OperatorMeasure& m, const ComplexMatrix& gamma);

}  // namespace sznf
