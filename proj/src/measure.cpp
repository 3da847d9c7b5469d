#include "sznf/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace sznf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

ComplexMatrix clean_psd(const ComplexMatrix& a, Eigen::Index dim, const char* what) {
  if (a.rows() != dim || a.cols() != dim) {
    std::ostringstream os;
    os << what << " must be " << dim << "x" << dim << ", got " << a.rows() << "x" << a.cols();
    throw Error(ErrorCode::BadShape, os.str());
  }
  require_finite(a, what);
  const double scale = std::max(1.0, op_norm(a));
  if (op_norm(a - a.adjoint()) > 1e-10 * scale) {
    throw Error(ErrorCode::NotHermitian, std::string(what) + " is not Hermitian");
  }
  ComplexMatrix h = hermitian_part(a);
  if (dim == 0) return h;
  const HermitianEigen eig = hermitian_eigen(h);
  if (eig.values(0) < -1e-10 * scale) {
    std::ostringstream os;
    os << what << " has eigenvalue " << eig.values(0);
    throw Error(ErrorCode::NotPsd, os.str());
  }
  if (eig.values(0) < 0.0) {
    const RealVector clamped = eig.values.cwiseMax(0.0);
    h = eig.vectors * clamped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    h = hermitian_part(h);
  }
  return h;
}

// Horner evaluation of sum_{n=first}^{last} coeffs[n] x^n.
ComplexMatrix horner(const std::vector<ComplexMatrix>& coeffs, std::size_t first, std::size_t last,
                     Complex x, Eigen::Index dim) {
  if (last < first) return ComplexMatrix::Zero(dim, dim);
  ComplexMatrix acc = coeffs[last];
  for (std::size_t n = last; n-- > first;) acc = acc * x + coeffs[n];
  if (first > 0) acc *= std::pow(x, static_cast<double>(first));
  return acc;
}

// 2 * (c_0/2 + sum_{0<n<M/2} c_n xi^n + c_{M/2} xi^{M/2} / 2): the C2 trace of
// the a.c. part on the circle.
ComplexMatrix ac_boundary_c2(const OperatorMeasure& m, double angle) {
  const auto& c = m.ac_moments();
  const std::size_t half = c.size() / 2;
  const Complex xi = std::polar(1.0, angle);
  if (half == 0) return c[0];
  ComplexMatrix acc = c[half] * 0.5;
  for (std::size_t n = half; n-- > 1;) acc = acc * xi + c[n];
  acc = acc * xi;
  return c[0] + 2.0 * acc;
}

Complex atom_boundary_kernel(double cot_half, CauchyKind kind) {
  switch (kind) {
    case CauchyKind::C: return {0.5, 0.5 * cot_half};
    case CauchyKind::C1: return {-0.5, 0.5 * cot_half};
    case CauchyKind::C2: return {0.0, cot_half};
  }
  return {};
}

bool hits(double angle, double atom_angle, double tol) {
  return std::abs(1.0 - std::polar(1.0, angle - atom_angle)) < tol;
}

ComplexMatrix boundary_transform(const OperatorMeasure& m, double angle, CauchyKind kind,
                                 bool skip_hits, double tol) {
  const Eigen::Index k = m.dim();
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (const Atom& a : m.atoms()) {
    if (hits(angle, a.angle, tol)) {
      if (skip_hits) continue;
      throw Error(ErrorCode::PoleHit, "boundary point coincides with an atom");
    }
    const double half = 0.5 * (angle - a.angle);
    out += atom_boundary_kernel(std::cos(half) / std::sin(half), kind) * a.weight;
  }
  if (m.has_ac()) {
    const ComplexMatrix c2 = ac_boundary_c2(m, angle);
    const ComplexMatrix& c0 = m.ac_moments().front();
    switch (kind) {
      case CauchyKind::C: out += (c2 + c0) * 0.5; break;
      case CauchyKind::C1: out += (c2 - c0) * 0.5; break;
      case CauchyKind::C2: out += c2; break;
    }
  }
  return out;
}

}  // namespace

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

OperatorMeasure::OperatorMeasure(Eigen::Index dim, std::vector<Atom> atoms,
                                 std::vector<ComplexMatrix> ac_samples)
    : dim_(dim), atoms_(std::move(atoms)), samples_(std::move(ac_samples)) {
  if (dim < 0) throw Error(ErrorCode::BadShape, "negative measure dimension");
  if (!samples_.empty() && (!is_power_of_two(samples_.size()) || samples_.size() < 2)) {
    std::ostringstream os;
    os << "a.c. grid size must be a power of two >= 2, got " << samples_.size();
    throw Error(ErrorCode::BadShape, os.str());
  }
  for (Atom& a : atoms_) {
    if (!std::isfinite(a.angle)) throw Error(ErrorCode::NonFinite, "atom angle");
    a.angle = wrap_angle(a.angle);
    a.weight = clean_psd(a.weight, dim_, "atom weight");
  }
  for (ComplexMatrix& s : samples_) s = clean_psd(s, dim_, "a.c. sample");

  const std::size_t grid = samples_.size();
  if (grid > 0) {
    ac_moments_.assign(grid, ComplexMatrix::Zero(dim_, dim_));
    Eigen::FFT<double> fft;
    std::vector<Complex> series(grid);
    std::vector<Complex> spectrum;
    for (Eigen::Index r = 0; r < dim_; ++r) {
      for (Eigen::Index c = 0; c < dim_; ++c) {
        for (std::size_t j = 0; j < grid; ++j) series[j] = samples_[j](r, c);
        fft.fwd(spectrum, series);
        for (std::size_t n = 0; n < grid; ++n) {
          ac_moments_[n](r, c) = spectrum[n] / static_cast<double>(grid);
        }
      }
    }
    // Keep the mean exactly Hermitian.
    ac_moments_[0] = hermitian_part(ac_moments_[0]);
  }

  const std::size_t count = grid + 1;
  moments_.assign(count, ComplexMatrix::Zero(dim_, dim_));
  for (std::size_t n = 0; n < count; ++n) {
    if (grid > 0) moments_[n] += ac_moments_[n % grid];
    for (const Atom& a : atoms_) {
      moments_[n] += std::polar(1.0, -static_cast<double>(n) * a.angle) * a.weight;
    }
  }
}

double OperatorMeasure::r_max() const {
  if (samples_.empty()) return INFINITY;
  return 1.0 - 64.0 / static_cast<double>(samples_.size());
}

ComplexMatrix OperatorMeasure::density_at(double angle) const {
  if (samples_.empty()) return ComplexMatrix::Zero(dim_, dim_);
  const double grid = static_cast<double>(samples_.size());
  const double pos = wrap_angle(angle) / kTwoPi * grid;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) {
    return samples_[static_cast<std::size_t>(nearest) % samples_.size()];
  }
  return hermitian_part(ac_boundary_c2(*this, angle));
}

OperatorMeasure measure_from_unitary(const ComplexMatrix& u1, const ComplexMatrix& b) {
  require_square(u1, "U1");
  if (b.rows() != u1.rows()) throw Error(ErrorCode::BadShape, "B rows must match U1");
  if (!is_unitary(u1, 1e-10)) throw Error(ErrorCode::NotUnitary, "U1 is not unitary");
  if (!is_isometry(b, 1e-10)) throw Error(ErrorCode::NotIsometry, "B is not an isometry");
  const Eigen::Index d = u1.rows();
  const Eigen::Index k = b.cols();
  if (d == 0) return OperatorMeasure(k, {});

  // Schur vectors of a normal matrix are orthonormal eigenvectors.
  Eigen::ComplexSchur<ComplexMatrix> schur(u1);
  const ComplexMatrix& q = schur.matrixU();
  const ComplexVector lambda = schur.matrixT().diagonal();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> angle(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) angle[i] = wrap_angle(std::arg(lambda(i)));
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return angle[x] < angle[y]; });

  std::vector<std::vector<Eigen::Index>> clusters;
  for (Eigen::Index idx : order) {
    if (!clusters.empty() && std::abs(lambda(idx) - lambda(clusters.back().front())) <= 1e-10) {
      clusters.back().push_back(idx);
    } else {
      clusters.push_back({idx});
    }
  }
  // Eigenvalues just below 2pi belong with those at 0.
  if (clusters.size() > 1 &&
      std::abs(lambda(clusters.back().front()) - lambda(clusters.front().front())) <= 1e-10) {
    clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
    clusters.pop_back();
  }

  std::vector<Atom> atoms;
  for (const auto& cl : clusters) {
    ComplexMatrix frame(d, static_cast<Eigen::Index>(cl.size()));
    Complex sum = 0.0;
    for (std::size_t j = 0; j < cl.size(); ++j) {
      frame.col(static_cast<Eigen::Index>(j)) = q.col(cl[j]);
      sum += lambda(cl[j]);
    }
    const ComplexMatrix coords = frame.adjoint() * b;
    ComplexMatrix weight = hermitian_part(coords.adjoint() * coords);
    if (op_norm(weight) <= 1e-14) continue;
    atoms.push_back({wrap_angle(std::arg(sum)), std::move(weight)});
  }
  return OperatorMeasure(k, std::move(atoms));
}

ComplexMatrix cauchy_transform(const OperatorMeasure& m, Complex z, CauchyKind kind) {
  const Eigen::Index k = m.dim();
  const double radius = std::abs(z);
  if (m.has_ac() && radius > m.r_max() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "|z| = " << radius << " exceeds r_max = " << m.r_max() << " for grid "
       << m.ac_grid();
    throw Error(ErrorCode::RadiusTooLarge, os.str());
  }
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (const Atom& a : m.atoms()) {
    const Complex q = z * std::polar(1.0, -a.angle);
    if (std::abs(1.0 - q) < 1e-14) throw Error(ErrorCode::PoleHit, "z coincides with an atom");
    Complex kernel;
    switch (kind) {
      case CauchyKind::C: kernel = 1.0 / (1.0 - q); break;
      case CauchyKind::C1: kernel = q / (1.0 - q); break;
      case CauchyKind::C2: kernel = (1.0 + q) / (1.0 - q); break;
    }
    out += kernel * a.weight;
  }
  if (!m.has_ac()) return out;

  const auto& c = m.ac_moments();
  ComplexMatrix tail = ComplexMatrix::Zero(k, k);  // sum_{n>=1} z^n c_n
  if (radius > 0.0) {
    const double mass = std::max(op_norm(c[0]), 1e-300);
    // Smallest N with mass |z|^{N+1} / (1 - |z|) < 1e-16.
    const double n_float =
        std::ceil(std::log(1e-16 * (1.0 - radius) / mass) / std::log(radius)) - 1.0;
    const auto last = static_cast<std::size_t>(
        std::clamp(n_float, 1.0, static_cast<double>(c.size() - 1)));
    tail = horner(c, 1, last, z, k);
  }
  switch (kind) {
    case CauchyKind::C: out += c[0] + tail; break;
    case CauchyKind::C1: out += tail; break;
    case CauchyKind::C2: out += c[0] + 2.0 * tail; break;
  }
  return out;
}

ComplexMatrix boundary_cauchy_transform(const OperatorMeasure& m, double angle, CauchyKind kind) {
  return boundary_transform(m, angle, kind, false, kAtomHitTolerance);
}

ComplexMatrix atom_weight_at(const OperatorMeasure& m, double angle, double tol) {
  ComplexMatrix w = ComplexMatrix::Zero(m.dim(), m.dim());
  for (const Atom& a : m.atoms()) {
    if (hits(angle, a.angle, tol)) w += a.weight;
  }
  return w;
}

ComplexMatrix boundary_c2_excluding_hits(const OperatorMeasure& m, double angle, double tol) {
  return boundary_transform(m, angle, CauchyKind::C2, true, tol);
}

ComplexMatrix poisson_extension(const OperatorMeasure& m, Complex z) {
  return hermitian_part(cauchy_transform(m, z, CauchyKind::C2));
}

TraceNormalization trace_normalize(const OperatorMeasure& m) {
  const Eigen::Index k = m.dim();
  auto split = [k](const ComplexMatrix& w, ComplexMatrix& scalar) {
    const double tr = w.trace().real();
    scalar = ComplexMatrix::Constant(1, 1, Complex(tr > 1e-14 ? tr : std::max(tr, 0.0), 0.0));
    if (tr > 1e-14) return ComplexMatrix(w / tr);
    return ComplexMatrix(ComplexMatrix::Zero(k, k));
  };
  TraceNormalization out;
  std::vector<Atom> atoms;
  for (const Atom& a : m.atoms()) {
    ComplexMatrix s;
    out.atom_W.push_back(split(a.weight, s));
    atoms.push_back({a.angle, s});
  }
  std::vector<ComplexMatrix> samples;
  for (const ComplexMatrix& smp : m.ac_samples()) {
    ComplexMatrix s;
    out.sample_W.push_back(split(smp, s));
    samples.push_back(s);
  }
  out.scalar = OperatorMeasure(1, std::move(atoms), std::move(samples));
  return out;
}

ComplexMatrix beta_matrix(const ComplexMatrix& gamma) {
  require_square(gamma, "Gamma");
  const Eigen::Index k = gamma.rows();
  if (k == 0) return ComplexMatrix(0, 0);
  if (op_norm(gamma - gamma.adjoint()) > 1e-10) {
    throw Error(ErrorCode::NotHermitian, "Gamma is not Hermitian");
  }
  const RealVector ev = hermitian_eigen(gamma).values;
  if (ev(0) < -1e-10 || ev(k - 1) > 1.0 - 1e-12) {
    std::ostringstream os;
    os << "Gamma spectrum [" << ev(0) << ", " << ev(k - 1) << "] not inside [0, 1)";
    throw Error(ErrorCode::GammaNotStrict, os.str());
  }
  const ComplexMatrix g = hermitian_part(gamma);
  const ComplexMatrix minus = psd_sqrt(identity(k) - g);
  const ComplexMatrix plus = psd_sqrt(identity(k) + g);
  // The two square roots commute, so beta is Hermitian.
  return hermitian_part(minus * checked_inverse(plus));
}

OperatorMeasure pushforward_beta(const OperatorMeasure& m, const ComplexMatrix& gamma) {
  if (gamma.rows() != m.dim()) throw Error(ErrorCode::BadShape, "Gamma size must match measure");
  const ComplexMatrix beta = beta_matrix(gamma);
  std::vector<Atom> atoms;
  atoms.reserve(m.atoms().size());
  for (const Atom& a : m.atoms()) {
    atoms.push_back({a.angle, hermitian_part(beta * a.weight * beta)});
  }
  std::vector<ComplexMatrix> samples;
  samples.reserve(m.ac_samples().size());
  for (const ComplexMatrix& s : m.ac_samples()) samples.push_back(hermitian_part(beta * s * beta));
  return OperatorMeasure(m.dim(), std::move(atoms), std::move(samples));
}

}  // namespace sznf
