#pragma once

// Numerical checks of the structural results about characteristic functions,
// seeded random instances and the canonical measure models.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "sznf/charfn.hpp"
#include "sznf/linalg.hpp"
#include "sznf/measure.hpp"
#include "sznf/perturbation.hpp"

namespace sznf {

struct ResidualPoint {
  Complex location;  ///< z, or exp(i angle) on the circle
  double residual = 0.0;
};

struct VerificationReport {
  std::string check_name;
  bool passed = false;
  bool inconclusive = false;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  Eigen::Index sample_count = 0;
  std::vector<ResidualPoint> details;
  std::string note;
};

/// Fills worst_residual, sample_count and passed (worst <= tolerance).
VerificationReport finish_report(std::string name, double tolerance,
                                 std::vector<ResidualPoint> details);

/// A measure model (Gamma, mu) with mu(T) = I.
struct MeasureModel {
  std::string name;
  ComplexMatrix gamma;
  OperatorMeasure mu;
};

enum class InstanceMode { Matrix, Measure };

using Rng = std::mt19937_64;

ComplexMatrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);
/// QR of a complex Gaussian matrix with the phases of diag R moved into Q.
ComplexMatrix random_unitary(Rng& rng, Eigen::Index n);
ComplexMatrix random_isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols);
/// W diag(lambda) W* with lambda uniform in [lo, hi].
ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n, double lo, double hi);

/// Deterministic for a fixed seed; raises BadShape unless 1 <= k <= d <= 16.
GammaForm random_gamma_form(std::uint64_t seed, Eigen::Index d, Eigen::Index k);

/// k x k model: d - k atoms with random psd weights plus a smooth density
/// P(xi) P(xi)* with P a random trigonometric polynomial, the whole measure
/// congruence-normalized to total mass I.
MeasureModel random_measure_model(std::uint64_t seed, Eigen::Index d, Eigen::Index k,
                                  Eigen::Index ac_grid = 4096);

std::variant<GammaForm, MeasureModel> random_instance(std::uint64_t seed, Eigen::Index d,
                                                      Eigen::Index k, InstanceMode mode);

/// Dimension and defect rank used for ensemble member `seed`: d in 1..max_dim,
/// k in 1..d, both drawn from the seed.
std::pair<Eigen::Index, Eigen::Index> ensemble_shape(std::uint64_t seed, Eigen::Index max_dim);

/// Points in the closed disc of radius r_max, deterministic per seed.
std::vector<Complex> random_disc_points(std::uint64_t seed, std::size_t count, double r_max);

/// Canonical models. Each returns mass-I measures on an a.c. grid of size M.
MeasureModel canonical_lebesgue(Eigen::Index ac_grid = 1 << 16);   ///< scalar, gamma 0.5
MeasureModel canonical_diag_atom(Eigen::Index ac_grid = 1 << 16);  ///< 2 x 2, diag(1,0) density
MeasureModel canonical_mixed(Eigen::Index ac_grid = 1 << 16);      ///< 2 x 2, bump density + atom
/// Scalar atom at 1 with gamma 0.5, as a GammaForm (U1 = [1], B = [1]).
GammaForm canonical_scalar_atom(double gamma = 0.5);
MeasureModel canonical_scalar_atom_measure(double gamma = 0.5);

/// Rank equality rank Delta = rank Delta_* = rank(W w) on the boundary grid.
/// The residual at each point is 1 if the three ranks disagree, 0 otherwise;
/// the check passes when at most 1% of points disagree.
VerificationReport check_theorem_main(const MeasureModel& model, Eigen::Index grid,
                                      double radius = 1.0, const RankTolerance& tol = {});

/// max(||theta* theta - I||, ||theta theta* - I||) over the boundary grid.
/// Inconclusive when the c.n.u. spectral radius is too close to 1.
VerificationReport check_two_sided_inner(const GammaForm& g, Eigen::Index grid,
                                         double tol = 1e-8);

/// Smallest n <= n_max with ||T^n|| <= threshold, by repeated squaring and a
/// binary refinement. Assumes ||T|| <= 1 so that ||T^n|| is non-increasing.
std::optional<long> decay_exponent(const ComplexMatrix& t, double threshold = 1e-8,
                                   long n_max = 10000);

/// Horizon used to resolve stability checks that time out at n_max.
inline constexpr long kExtendedHorizon = 1000000000L;

struct StabilityResult {
  std::optional<long> n_forward;  ///< for T0
  std::optional<long> n_adjoint;  ///< for T0*
  VerificationReport report;      ///< inconclusive when a power has not decayed by n_max
};

/// Stability of T0 and T0*. The report passes when both powers decay by
/// n_max; a power that has not decayed yet makes it inconclusive, since a
/// finite horizon cannot refute T0^n -> 0.
StabilityResult check_asymptotic_stability(const ComplexMatrix& t0, double threshold = 1e-8,
                                           long n_max = 10000);

struct StabilityInnerness {
  bool inner = false;
  bool co_inner = false;
  /// Decay exponents at the n_max horizon (nullopt: not decayed yet).
  std::optional<long> n_forward;
  std::optional<long> n_adjoint;
  /// Decay exponents at kExtendedHorizon.
  std::optional<long> n_forward_extended;
  std::optional<long> n_adjoint_extended;
  /// Mismatches among the conclusive n_max comparisons.
  Eigen::Index disagreements = 0;
  /// Mismatches with stability taken at the extended horizon.
  Eigen::Index extended_disagreements = 0;
  /// Comparisons that timed out at n_max.
  Eigen::Index timeouts = 0;
  VerificationReport report;
};

/// inner <=> T0*^n -> 0 and co-inner <=> T0^n -> 0, with inner and co-inner
/// taken as isometric and co-isometric boundary values within 1e-8 and
/// stability as ||T0^n|| <= 1e-8 for some n <= n_max. A comparison whose power
/// has not decayed by n_max is re-decided at kExtendedHorizon. The report
/// passes when both disagreement counts are zero; it is inconclusive when even
/// the extended horizon is not enough or the spectral radius is too close to 1.
StabilityInnerness check_stability_innerness(const GammaForm& g, Eigen::Index grid,
                                             long n_max = 10000);

/// Delta^2 = (I - theta*) W w (I - theta) and Delta_*^2 = (I - theta) W w (I - theta*)
/// for mu~, at grid points with tr(W w) >= 0.1. At radius 1 the boundary
/// values are used, below 1 theta is taken at radius * xi.
VerificationReport check_delta_identities(const MeasureModel& model, Eigen::Index grid,
                                          double radius = 1.0, double tol = 1e-6);

struct ConvergenceReport {
  double coarse = 0.0;  ///< radial residual with grid M at r_max(M)
  double fine = 0.0;    ///< radial residual with grid 2M at r_max(2M)
  bool passed = false;
};

/// Quadrature refinement: the radial Delta identity residual must shrink when
/// the a.c. grid doubles, or be at roundoff on both grids.
ConvergenceReport check_delta_convergence(
    const std::function<MeasureModel(Eigen::Index)>& build, Eigen::Index ac_grid,
    Eigen::Index grid);

/// (I - theta)^{-1} = (C2 mu~ + I)/2, with theta from the F1 route on mu.
/// Interior points use tolerance 1e-8.
VerificationReport check_inverse_identity(const MeasureModel& model,
                                          const std::vector<Complex>& points, double tol = 1e-8);

/// The same identity on the boundary grid, skipping atoms; tolerance 1e-6.
VerificationReport check_inverse_identity_boundary(const MeasureModel& model, Eigen::Index grid,
                                                   double tol = 1e-6);

/// z B* (I - z U1*)^{-1} U1* B against C1 mu(z) for mu = B* E B.
VerificationReport check_f1_identity(const GammaForm& g, const std::vector<Complex>& points,
                                     double tol = 1e-10);

/// Max pairwise deviation among the defect, F1 left, F1 right and Herglotz
/// evaluators.
VerificationReport check_cross_formula(const GammaForm& g, const std::vector<Complex>& points,
                                       double tol = 1e-8);

/// Same comparison for a measure model (F1 left, F1 right, Herglotz).
VerificationReport check_cross_formula(const MeasureModel& model,
                                       const std::vector<Complex>& points, double tol = 1e-8);

/// theta(z) = (z - gamma) / (1 - gamma z) for the scalar model.
VerificationReport check_scalar_closed_form(double gamma, const std::vector<Complex>& points,
                                            double tol = 1e-12);

/// (I - P Q*)^{-1} from the Woodbury core, for a seeded pair with I - Q* P
/// well conditioned. Residual ||W (I - P Q*) - I||.
double woodbury_residual(std::uint64_t seed);

/// max(||V*V - I||, ||V P - R||, ||P - (R*R)^{1/2}||) for a seeded R, rank
/// deficient for odd seeds.
double polar_residual(std::uint64_t seed);

/// Random contraction U + K, reduced and reassembled: ||T - (U + K)||.
double reconstruction_residual(std::uint64_t seed);

/// |<Ty, Tx>| for a seeded contraction T, a unit x with ||Tx|| = ||x|| and a
/// unit y orthogonal to x.
double isometric_orthogonality_residual(std::uint64_t seed);

}  // namespace sznf
